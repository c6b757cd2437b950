#include "kgh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgh/error.hpp"
#include "kgh/norms.hpp"
#include "kgh/spectral.hpp"

namespace kgh {

std::vector<double>& DiagnosticsSeries::column(const std::string& name) {
  for (auto& [n, v] : columns)
    if (n == name) return v;
  columns.emplace_back(name, std::vector<double>{});
  return columns.back().second;
}

const std::vector<double>& DiagnosticsSeries::column(const std::string& name) const {
  for (const auto& [n, v] : columns)
    if (n == name) return v;
  throw ContractViolation("no series named " + name);
}

bool DiagnosticsSeries::has(const std::string& name) const {
  return std::any_of(columns.begin(), columns.end(), [&](const auto& c) { return c.first == name; });
}

std::string exponent_label(double r) {
  if (std::isinf(r)) return "inf";
  std::ostringstream s;
  s << r;
  return s.str();
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (g[i] + g[i - 1]) * (t[i] - t[i - 1]);
  return s;
}

// Exact integral of the piecewise-linear interpolant of g over [a, b].
double integrate_between(const std::vector<double>& t, const std::vector<double>& g, double a, double b) {
  auto value_at = [&](double x) {
    if (x <= t.front()) return g.front();
    if (x >= t.back()) return g.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return (1 - w) * g[i - 1] + w * g[i];
  };
  std::vector<double> xs{a};
  std::vector<double> ys{value_at(a)};
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] > a && t[i] < b) {
      xs.push_back(t[i]);
      ys.push_back(g[i]);
    }
  xs.push_back(b);
  ys.push_back(value_at(b));
  return trapezoid(xs, ys);
}

double default_pad(const Grid& g) { return 2.0 * g.spacing(); }

std::vector<const PhaseState*> snapshots_in(const Trajectory& traj, std::pair<double, double> interval) {
  if (traj.snapshots.empty()) throw ContractViolation("trajectory has no snapshots");
  const double slack = 1e-9 * std::max(1.0, std::abs(traj.t_end()));
  if (interval.first > interval.second || interval.first < traj.t_begin() - slack ||
      interval.second > traj.t_end() + slack) {
    std::ostringstream msg;
    msg << "interval [" << interval.first << ", " << interval.second << "] outside trajectory span ["
        << traj.t_begin() << ", " << traj.t_end() << "]";
    throw ContractViolation(msg.str());
  }
  std::vector<const PhaseState*> out;
  for (const auto& s : traj.snapshots)
    if (s.time >= interval.first - slack && s.time <= interval.second + slack) out.push_back(&s);
  return out;
}

}  // namespace

SpatialSplit spatial_split(const Field& f, double t, std::optional<double> radius) {
  if (!(t >= 0.0)) throw ContractViolation("spatial split needs t >= 0");
  const Field p = f.is_physical() ? f : to_physical(f);
  SpatialSplit out{Field(p.grid()), Field(p.grid())};
  out.radius = radius.value_or(2.0 * t);
  out.outside_empty = out.radius >= 0.5 * p.grid().extent();
  const auto& r2 = radius_squared(p.grid());
  const double R2 = out.radius * out.radius;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (r2[i] > R2)
      out.outside[i] = p[i];
    else
      out.inside[i] = p[i];
  }
  return out;
}

double outside_mass_fraction(const Field& f, double R) {
  const Field p = f.is_physical() ? f : to_physical(f);
  const auto& r2 = radius_squared(p.grid());
  double out = 0.0, total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = std::norm(p[i]);
    total += m;
    if (r2[i] > R * R) out += m;
  }
  return total > 0.0 ? out / total : 0.0;
}

ConeReport causality_residual(const Trajectory& traj, double R, std::optional<double> pad) {
  if (traj.snapshots.empty()) throw ContractViolation("trajectory has no snapshots");
  const Grid& grid = traj.snapshots.front().grid();
  ConeReport rep;
  rep.pad = pad.value_or(default_pad(grid));

  const PhaseState& first = traj.snapshots.front();
  const double fu = outside_mass_fraction(first.u, R);
  const double fv = outside_mass_fraction(first.udot, R);
  if (fu >= 1e-12 || fv >= 1e-12) {
    std::ostringstream msg;
    msg << "datum is not supported in the ball of radius " << R << " (outside mass fractions " << fu << ", " << fv
        << ")";
    throw ContractViolation(msg.str());
  }
  const double horizon = traj.t_end() - traj.t_begin();
  if (!(horizon + R + rep.pad < 0.5 * grid.extent())) {
    std::ostringstream msg;
    msg << "light cone radius " << horizon + R + rep.pad << " does not fit in the box half-width "
        << 0.5 * grid.extent();
    throw ContractViolation(msg.str());
  }

  for (const auto& s : traj.snapshots) {
    const double t = s.time - traj.t_begin();
    const Field u = to_physical(s.u);
    const auto& r2 = radius_squared(grid);
    const double cone = R + t + rep.pad;
    double out = 0.0, total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double m = std::norm(u[i]);
      total += m;
      if (r2[i] > cone * cone) out += m;
    }
    const double cell = grid.cell_volume();
    const double rel = total > 0.0 ? std::sqrt(out / total) : 0.0;
    rep.times.push_back(s.time);
    rep.outside_l2.push_back(std::sqrt(out * cell));
    rep.relative.push_back(rel);
    rep.mass_fraction.push_back(rel * rel);
    rep.max_relative = std::max(rep.max_relative, rel);
    rep.max_mass_fraction = std::max(rep.max_mass_fraction, rel * rel);
  }
  return rep;
}

namespace {

// -int |u|^2 (x / a(x)) . grad(V * |u|^2) dx at one time.
double morawetz_integrand(const PhaseState& s, HartreeOperator& op, double sigma) {
  const Grid& grid = s.grid();
  if (op.is_zero()) return 0.0;
  const Field u = to_physical(s.u);
  std::vector<double> pot(grid.size());
  op.potential(u.values(), pot);
  Field P(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) P[i] = pot[i];
  Field Ps = to_spectral(std::move(P));
  const auto& r2 = radius_squared(grid);
  std::vector<double> radial(grid.size(), 0.0);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const Field d = to_physical(partial_derivative(Ps, axis));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto idx = grid.unflatten(i);
      radial[i] += grid.coordinate(idx[axis]) * d[i].real();
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) sum -= std::norm(u[i]) * radial[i] / std::sqrt(r2[i] + sigma * sigma);
  return sum * grid.cell_volume();
}

}  // namespace

MorawetzReport morawetz_check(const Trajectory& traj, const PotentialSpec& spec, const MorawetzConfig& cfg) {
  const auto snaps = snapshots_in(traj, cfg.interval);
  MorawetzReport rep;
  if (snaps.empty()) throw ContractViolation("no snapshots in the Morawetz interval");
  const Grid& grid = snaps.front()->grid();
  rep.sigma = cfg.sigma.value_or(default_pad(grid));
  if (!(rep.sigma > 0.0)) throw ContractViolation("Morawetz regularization sigma must be positive");
  HartreeOperator op(spec, grid);

  std::vector<double> full, half;
  double sup_v = 0.0, sup_grad = 0.0;
  rep.min_integrand = std::numeric_limits<double>::infinity();
  for (const PhaseState* s : snaps) {
    rep.series.times.push_back(s->time);
    full.push_back(morawetz_integrand(*s, op, rep.sigma));
    half.push_back(morawetz_integrand(*s, op, 0.5 * rep.sigma));
    rep.min_integrand = std::min(rep.min_integrand, full.back());
    sup_v = std::max(sup_v, lebesgue_norm(s->udot, 2.0));
    std::vector<Field> grad;
    for (int a = 0; a < grid.dim(); ++a) grad.push_back(partial_derivative(s->u, a));
    sup_grad = std::max(sup_grad, lebesgue_norm(std::span<const Field>(grad), 2.0));
  }
  rep.lhs = trapezoid(rep.series.times, full);
  rep.lhs_half_sigma = trapezoid(rep.series.times, half);
  rep.rhs = 4.0 * sup_v * sup_grad;
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-6);
  rep.margin = rep.rhs - rep.lhs;
  rep.series.column("integrand") = full;
  rep.series.column("integrand_half_sigma") = half;
  return rep;
}

WeightedMorawetz weighted_morawetz(const Trajectory& traj, double alpha, double a, double sigma,
                                   std::pair<double, double> interval) {
  if (interval.first < 1.0) throw ContractViolation("weighted Morawetz bound is stated for t1 >= 1");
  if (!(a > 0.0)) throw ContractViolation("weighted Morawetz needs a > 0");
  const auto snaps = snapshots_in(traj, interval);
  WeightedMorawetz out;
  std::vector<double> weighted;
  auto& g = out.series.column("g");
  const double m = alpha + 4.0;
  for (const PhaseState* s : snaps) {
    const SpatialSplit split = spatial_split(s->u, s->time);
    const double bs = birman_solomjak_norm(split.inside, m, 2.0, sigma);
    out.series.times.push_back(s->time);
    g.push_back(std::pow(bs, m));
    weighted.push_back(g.back() / (2.0 * s->time + a));
  }
  out.series.column("weighted") = weighted;
  out.value = trapezoid(out.series.times, weighted);
  return out;
}

QuietWindow find_quiet_window(const std::vector<double>& times, const std::vector<double>& g, double l, double eps,
                              double t1, double M, double a) {
  if (times.size() != g.size() || times.empty()) throw ContractViolation("quiet window needs a nonempty series");
  if (!(l > 0.0) || !(eps > 0.0)) throw ContractViolation("quiet window needs l > 0 and eps > 0");
  if (t1 < times.front() - 1e-12) throw ContractViolation("series does not cover t1");
  QuietWindow out;
  const double expo = (2.0 + a) * M * l / eps;
  out.bound = std::exp(expo) * (t1 + l + 1.0) - 1.0;
  const double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
  for (double t2 : times) {
    if (t2 < t1 + l - slack) continue;
    const double integral = integrate_between(times, g, t2 - l, t2);
    out.window_ends.push_back(t2);
    out.window_integrals.push_back(integral);
    if (!out.t2 && integral <= eps) out.t2 = t2;
  }
  out.within_bound = out.t2.has_value() && *out.t2 <= out.bound;
  return out;
}

PerturbationReport perturbation_experiment(const PhaseState& base, const PhaseState& delta, double forcing_eps,
                                           const PotentialSpec& spec, const IntegratorConfig& config,
                                           std::optional<Field> profile) {
  if (!(forcing_eps >= 0.0)) throw ContractViolation("forcing size must be nonnegative");
  const double dn = energy_space_norm(delta);
  if (dn > forcing_eps * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "perturbation size " << dn << " exceeds forcing_eps " << forcing_eps;
    throw ContractViolation(msg.str());
  }
  Field shape = profile ? to_physical(*profile) : to_physical(base.u);
  const double norm = lebesgue_norm(shape, 2.0);
  if (!(norm > 0.0)) throw ContractViolation("forcing profile must be nonzero");
  shape *= 1.0 / norm;

  PhaseState perturbed(to_physical(base.u) + to_physical(delta.u), to_physical(base.udot) + to_physical(delta.udot),
                       base.time);
  const Trajectory a = integrate(perturbed, spec, config);
  IntegrateOptions opt;
  if (forcing_eps > 0.0) {
    opt.forcing = [&shape, forcing_eps](double, std::span<cplx> out) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = forcing_eps * shape[i];
    };
  }
  const Trajectory b = integrate(base, spec, config, opt);
  if (a.snapshots.size() != b.snapshots.size())
    throw IntegrationFailure("perturbation runs ended at different times", std::min(a.final_time, b.final_time));

  PerturbationReport rep;
  rep.forcing_eps = forcing_eps;
  std::vector<double> besov, l4, en;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    const Field w = to_physical(a.snapshots[i].u) - to_physical(b.snapshots[i].u);
    rep.series.times.push_back(a.snapshots[i].time);
    besov.push_back(besov_norm(w, 0.5, 4.0));
    l4.push_back(lebesgue_norm(w, 4.0));
    en.push_back(energy_space_distance(a.snapshots[i], b.snapshots[i]));
  }
  rep.y_norm = time_lebesgue_norm(rep.series.times, besov, 4.0) + time_lebesgue_norm(rep.series.times, l4, 4.0);
  rep.energy_sup = time_lebesgue_norm(rep.series.times, en, std::numeric_limits<double>::infinity());
  rep.ratio = forcing_eps > 0.0 ? rep.y_norm / forcing_eps : 0.0;
  rep.series.column("besov_half_4") = besov;
  rep.series.column("L4") = l4;
  rep.series.column("energy_distance") = en;
  return rep;
}

DecayScan decay_scan(const Trajectory& traj, const std::vector<double>& r_list, double N, const PotentialSpec& spec) {
  if (traj.snapshots.empty()) throw ContractViolation("trajectory has no snapshots");
  if (!(N > 0.0)) throw ContractViolation("frequency cutoff must be positive");
  const Grid& grid = traj.snapshots.front().grid();
  const int n = grid.dim();
  const double rmax = sobolev_critical_exponent(n);
  for (double r : r_list) {
    if (!(r > 2.0) || !(r < rmax)) {
      std::ostringstream msg;
      msg << "decay scan needs 2 < r < " << rmax << " (got r = " << r << ")";
      throw RangeError(msg.str());
    }
  }
  DecayScan out;
  out.cutoff = N;
  out.worst_slack = std::numeric_limits<double>::infinity();
  HartreeOperator op(spec, grid);
  for (const auto& s : traj.snapshots) {
    out.series.times.push_back(s.time);
    const double E = energy(s, op).total;
    out.series.column("energy").push_back(E);
    const Field hi = project(s.u, projector::HighPass{N});
    const Field lo = project(s.u, projector::LowPass{N});
    for (double r : r_list) {
      const std::string tag = exponent_label(r);
      const double high = lebesgue_norm(hi, r);
      const double bound = std::sqrt(std::max(E, 0.0)) * std::pow(N, delta_exponent(n, r) - 1.0);
      out.series.column("L" + tag).push_back(lebesgue_norm(s.u, r));
      out.series.column("high" + tag).push_back(high);
      out.series.column("low" + tag).push_back(lebesgue_norm(lo, r));
      out.series.column("bound" + tag).push_back(bound);
      out.worst_slack = std::min(out.worst_slack, bound - high);
      if (high > bound + 1e-10) out.bound_holds = false;
    }
  }
  return out;
}

}  // namespace kgh
