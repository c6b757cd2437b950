#include "kgh/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgh/error.hpp"
#include "kgh/evolve.hpp"
#include "kgh/spectral.hpp"

namespace kgh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum h^n |g|^r over a real magnitude array, r finite, or max for r = inf.
double magnitude_norm(const std::vector<double>& mag, double r, double cell) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double v : mag) m = std::max(m, v);
    return m;
  }
  double sum = 0.0;
  if (r == 2.0) {
    for (double v : mag) sum += v * v;
    return std::sqrt(sum * cell);
  }
  for (double v : mag) sum += std::pow(v, r);
  return std::pow(sum * cell, 1.0 / r);
}

void check_r(double r) {
  if (!(r >= 1.0)) throw ContractViolation("Lebesgue exponent must be >= 1 (got " + std::to_string(r) + ")");
}

const std::vector<double>& spectral_modulus(const Grid& grid) {
  // small per-call cost compared to the FFTs; no cache needed beyond k2's
  static thread_local std::vector<double> kabs;
  const auto& k2 = wavenumber_squared(grid);
  kabs.resize(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) kabs[i] = std::sqrt(k2[i]);
  return kabs;
}

}  // namespace

double delta_exponent(int n, double r) {
  if (std::isinf(r)) return 0.5 * n;
  return n * (0.5 - 1.0 / r);
}

double sobolev_critical_exponent(int n) { return n <= 2 ? kInf : 2.0 * n / (n - 2.0); }

double lebesgue_norm(const Field& f, double r) {
  check_r(r);
  const Field p = f.is_physical() ? f : to_physical(f);
  std::vector<double> mag(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mag[i] = std::abs(p[i]);
  return magnitude_norm(mag, r, p.grid().cell_volume());
}

double lebesgue_norm(std::span<const Field> components, double r) {
  check_r(r);
  if (components.empty()) return 0.0;
  std::vector<double> mag(components.front().size(), 0.0);
  for (const Field& c : components) {
    if (c.grid() != components.front().grid()) throw ContractViolation("vector components on different grids");
    const Field p = c.is_physical() ? c : to_physical(c);
    for (std::size_t i = 0; i < p.size(); ++i) mag[i] += std::norm(p[i]);
  }
  for (double& v : mag) v = std::sqrt(v);
  return magnitude_norm(mag, r, components.front().grid().cell_volume());
}

double sobolev_norm(const Field& f, double s) {
  if (s == 0.0) return lebesgue_norm(f, 2.0);
  return lebesgue_norm(apply_omega_power(f, s), 2.0);
}

double besov_norm(const Field& f, double s, double r) { return besov_norm(std::span<const Field>(&f, 1), s, r); }

double besov_norm(std::span<const Field> components, double s, double r) {
  check_r(r);
  if (components.empty()) return 0.0;
  const Grid& grid = components.front().grid();
  std::vector<Field> spectra;
  spectra.reserve(components.size());
  for (const Field& c : components) {
    if (c.grid() != grid) throw ContractViolation("vector components on different grids");
    spectra.push_back(c.is_spectral() ? c : to_spectral(c));
  }
  const auto& kabs = spectral_modulus(grid);
  const int J = DyadicProfile::resolved_bands(grid);

  std::vector<double> symbol(grid.size());
  std::vector<double> mag(grid.size());
  ComplexBuffer work(grid.size());
  double total = 0.0;
  for (int j = 0; j <= J; ++j) {
    bool empty = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      symbol[i] = j == 0 ? DyadicProfile::psi0_hat(kabs[i]) : DyadicProfile::delta_j(kabs[i], j);
      if (symbol[i] != 0.0) empty = false;
    }
    if (empty) continue;
    std::fill(mag.begin(), mag.end(), 0.0);
    for (const Field& sp : spectra) {
      for (std::size_t i = 0; i < grid.size(); ++i) work[i] = symbol[i] * sp[i];
      fft_inverse(work, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) mag[i] += std::norm(work[i]);
    }
    for (double& v : mag) v = std::sqrt(v);
    const double band = magnitude_norm(mag, r, grid.cell_volume());
    const double weight = j == 0 ? 1.0 : std::ldexp(1.0, j);
    total += std::pow(weight, 2.0 * s) * band * band;
  }
  return std::sqrt(total);
}

double birman_solomjak_norm(const Field& f, double m, double r, double sigma) {
  check_r(r);
  if (!(m >= 1.0)) throw ContractViolation("sequence exponent m must be >= 1");
  const Grid& grid = f.grid();
  const double cubes_d = grid.extent() / sigma;
  const double cells_d = sigma / grid.spacing();
  const long cubes = std::lround(cubes_d);
  const long cells = std::lround(cells_d);
  if (!(sigma > 0.0) || std::abs(cubes_d - cubes) > 1e-9 * cubes_d || std::abs(cells_d - cells) > 1e-9 * cells_d ||
      cubes < 1 || cells < 1) {
    std::ostringstream msg;
    msg << "cube edge " << sigma << " must divide the extent " << grid.extent() << " into whole cells of size "
        << grid.spacing();
    throw ContractViolation(msg.str());
  }
  const Field p = f.is_physical() ? f : to_physical(f);
  const int n = grid.dim();
  long ncubes = 1;
  for (int a = 0; a < n; ++a) ncubes *= cubes;
  std::vector<double> acc(ncubes, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto idx = grid.unflatten(i);
    long c = 0;
    for (int a = 0; a < n; ++a) c = c * cubes + idx[a] / cells;
    const double v = std::abs(p[i]);
    if (std::isinf(r))
      acc[c] = std::max(acc[c], v);
    else
      acc[c] += r == 2.0 ? v * v : std::pow(v, r);
  }
  if (!std::isinf(r))
    for (double& a : acc) a = std::pow(a * grid.cell_volume(), 1.0 / r);
  if (std::isinf(m)) return *std::max_element(acc.begin(), acc.end());
  double sum = 0.0;
  for (double a : acc) sum += std::pow(a, m);
  return std::pow(sum, 1.0 / m);
}

AdmissibilityReport check_admissible(int n, const AdmissibleTriple& t, std::optional<double> declared_mu) {
  AdmissibilityReport rep;
  std::ostringstream why;
  const double tol = 1e-12;
  const double gap = delta_exponent(n, t.r) / n;  // 1/2 - 1/r
  rep.two_over_q = std::isinf(t.q) ? 0.0 : 2.0 / t.q;
  rep.bound = std::min((n - 1 + t.theta) * gap, 1.0);
  rep.mu = t.rho + (n + t.theta) * gap - (std::isinf(t.q) ? 0.0 : 1.0 / t.q);
  rep.inequality_holds = rep.two_over_q <= rep.bound + tol;
  rep.excluded_endpoint = n == 3 && t.theta == 0.0 && t.q == 2.0 && std::isinf(t.r);

  auto near = [&](double a, double b) { return std::abs(a - b) <= 1e-9; };
  const bool standard = near(rep.mu, 0.0) || near(rep.mu, 0.5) || near(rep.mu, 1.0);
  rep.mu_allowed = declared_mu ? (near(rep.mu, *declared_mu) && standard) : standard;

  bool ranges = true;
  if (!(t.theta >= 0.0 && t.theta <= 1.0)) {
    why << "theta outside [0,1]; ";
    ranges = false;
  }
  if (!(t.q >= 2.0) || !(t.r >= 2.0)) {
    why << "q and r must be >= 2; ";
    ranges = false;
  }
  if (!rep.inequality_holds) why << "2/q = " << rep.two_over_q << " exceeds " << rep.bound << "; ";
  if (rep.excluded_endpoint) why << "(theta, n, q, r) = (0, 3, 2, inf) is excluded; ";
  if (!rep.mu_allowed) {
    why << "mu = " << rep.mu;
    if (declared_mu) why << " differs from declared " << *declared_mu;
    else why << " not in {0, 1/2, 1}";
    why << "; ";
  }
  rep.valid = ranges && rep.inequality_holds && !rep.excluded_endpoint && rep.mu_allowed;
  rep.reason = why.str();
  if (rep.reason.size() >= 2) rep.reason.resize(rep.reason.size() - 2);
  return rep;
}

std::vector<AdmissibleTriple> x1_exponent_set(int n) {
  std::vector<AdmissibleTriple> out;
  const double p = 2.0 * (n + 2) / n;
  out.push_back({1.0, p, p, -0.5});
  if (n == 3) out.push_back({0.0, 4.0, 4.0, -0.5});
  if (n >= 4) {
    const double p0 = 2.0 * (n + 1) / (n - 1);
    out.push_back({0.0, p0, p0, -0.5});
  }
  return out;
}

EnergyBreakdown energy(const PhaseState& state, const PotentialSpec& spec) {
  HartreeOperator op(spec, state.grid());
  return energy(state, op);
}

EnergyBreakdown energy(const PhaseState& state, HartreeOperator& hartree) {
  EnergyBreakdown e;
  const double cell = state.grid().cell_volume();
  const Field v = to_physical(state.udot);
  const Field u = to_physical(state.u);
  const Field uh = to_spectral(u);
  const auto& k2 = wavenumber_squared(state.grid());
  double kin = 0.0, mass = 0.0, grad = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    kin += std::norm(v[i]);
    mass += std::norm(u[i]);
    grad += k2[i] * std::norm(uh[i]);
  }
  e.kinetic = 0.5 * kin * cell;
  e.mass = 0.5 * mass * cell;
  e.gradient = 0.5 * grad * cell;
  e.interaction = hartree.is_zero() ? 0.0 : hartree.interaction_energy(u.values());
  e.total = e.kinetic + e.gradient + e.mass + e.interaction;
  return e;
}

double time_lebesgue_norm(const std::vector<double>& times, const std::vector<double>& values, double q) {
  if (times.size() != values.size()) throw ContractViolation("time series length mismatch");
  if (values.empty()) return 0.0;
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double a = std::pow(std::abs(values[i - 1]), q);
    const double b = std::pow(std::abs(values[i]), q);
    sum += 0.5 * (a + b) * (times[i] - times[i - 1]);
  }
  return std::pow(sum, 1.0 / q);
}

namespace {

std::vector<std::size_t> snapshots_in(const Trajectory& traj, std::pair<double, double> interval) {
  if (traj.snapshots.empty()) throw ContractViolation("trajectory has no snapshots");
  const double slack = 1e-9 * std::max(1.0, std::abs(traj.t_end()));
  if (!(interval.first <= interval.second) || interval.first < traj.t_begin() - slack ||
      interval.second > traj.t_end() + slack) {
    std::ostringstream msg;
    msg << "interval [" << interval.first << ", " << interval.second << "] outside trajectory span ["
        << traj.t_begin() << ", " << traj.t_end() << "]";
    throw ContractViolation(msg.str());
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const double t = traj.snapshots[i].time;
    if (t >= interval.first - slack && t <= interval.second + slack) idx.push_back(i);
  }
  return idx;
}

std::vector<Field> component_fields(const PhaseState& s, Component c) {
  std::vector<Field> out;
  if (c == Component::u) out.push_back(s.u);
  else if (c == Component::udot) out.push_back(s.udot);
  else
    for (int a = 0; a < s.grid().dim(); ++a) out.push_back(partial_derivative(s.u, a));
  return out;
}

}  // namespace

double strichartz_norm(const Trajectory& traj, const AdmissibleTriple& triple, std::pair<double, double> interval,
                       Component component) {
  const auto idx = snapshots_in(traj, interval);
  std::vector<double> times, values;
  for (std::size_t i : idx) {
    const auto comps = component_fields(traj.snapshots[i], component);
    times.push_back(traj.snapshots[i].time);
    values.push_back(besov_norm(std::span<const Field>(comps), triple.rho, triple.r));
  }
  return time_lebesgue_norm(times, values, triple.q);
}

double x1_norm(const Trajectory& traj, std::pair<double, double> interval) {
  const auto idx = snapshots_in(traj, interval);
  const int n = traj.snapshots.front().grid().dim();
  const auto set = x1_exponent_set(n);
  const Component parts[] = {Component::u, Component::udot, Component::gradient};

  double sup_part = 0.0;
  std::vector<double> strichartz(set.size(), 0.0);
  for (Component c : parts) {
    std::vector<double> times, l2;
    std::vector<std::vector<double>> besov(set.size());
    for (std::size_t i : idx) {
      const auto comps = component_fields(traj.snapshots[i], c);
      times.push_back(traj.snapshots[i].time);
      l2.push_back(lebesgue_norm(std::span<const Field>(comps), 2.0));
      for (std::size_t s = 0; s < set.size(); ++s)
        besov[s].push_back(besov_norm(std::span<const Field>(comps), set[s].rho, set[s].r));
    }
    sup_part += time_lebesgue_norm(times, l2, kInf);
    for (std::size_t s = 0; s < set.size(); ++s) strichartz[s] += time_lebesgue_norm(times, besov[s], set[s].q);
  }
  return sup_part + *std::max_element(strichartz.begin(), strichartz.end());
}

}  // namespace kgh
