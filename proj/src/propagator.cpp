#include "kgh/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <memory>
#include <sstream>
#include <tuple>

#include "kgh/error.hpp"
#include "kgh/norms.hpp"

namespace kgh {

PhaseState::PhaseState(Field u_, Field udot_, double t) : u(std::move(u_)), udot(std::move(udot_)), time(t) {
  if (u.grid() != udot.grid()) throw ContractViolation("phase state components live on different grids");
}

PhaseState PhaseState::zero(const Grid& grid, double t) { return PhaseState(Field(grid), Field(grid), t); }

const std::vector<double>& dispersion(const Grid& grid) {
  static std::map<std::tuple<int, double, int>, std::unique_ptr<std::vector<double>>> cache;
  auto key = std::make_tuple(grid.dim(), grid.extent(), grid.points());
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  const auto& k2 = wavenumber_squared(grid);
  auto table = std::make_unique<std::vector<double>>(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) (*table)[i] = std::sqrt(1.0 + k2[i]);
  return *cache.emplace(key, std::move(table)).first->second;
}

FreeFlowMultipliers::FreeFlowMultipliers(const Grid& grid, double tau)
    : tau_(tau), cos_(grid.size()), sin_over_lambda_(grid.size()), lambda_sin_(grid.size()) {
  const auto& lam = dispersion(grid);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double s = std::sin(tau * lam[i]);
    cos_[i] = std::cos(tau * lam[i]);
    sin_over_lambda_[i] = s / lam[i];
    lambda_sin_[i] = lam[i] * s;
  }
}

void FreeFlowMultipliers::apply(std::span<cplx> u, std::span<cplx> v) const {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const cplx a = u[i];
    const cplx b = v[i];
    u[i] = cos_[i] * a + sin_over_lambda_[i] * b;
    v[i] = -lambda_sin_[i] * a + cos_[i] * b;
  }
}

PhaseState apply_free(const PhaseState& state, double t) {
  if (!std::isfinite(t)) throw ContractViolation("apply_free needs a finite time");
  Field u = to_spectral(state.u);
  Field v = to_spectral(state.udot);
  if (t != 0.0) FreeFlowMultipliers(state.grid(), t).apply(u.values(), v.values());
  return PhaseState(to_physical(std::move(u)), to_physical(std::move(v)), state.time + t);
}

Field apply_K(const Field& f, double t, bool derivative) {
  if (!std::isfinite(t)) throw ContractViolation("apply_K needs a finite time");
  if (derivative) return apply_radial_multiplier(f, [t](double k2) { return std::cos(t * std::sqrt(1.0 + k2)); });
  return apply_radial_multiplier(f, [t](double k2) {
    const double lam = std::sqrt(1.0 + k2);
    return std::sin(t * lam) / lam;
  });
}

namespace {
double weighted_spectral_sum(const Field& f, bool with_omega) {
  Field s = to_spectral(f);
  const auto& k2 = wavenumber_squared(s.grid());
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += (with_omega ? 1.0 + k2[i] : 1.0) * std::norm(s[i]);
  return sum * s.grid().cell_volume();
}
}  // namespace

double energy_space_norm(const PhaseState& state) {
  return std::sqrt(weighted_spectral_sum(state.u, true) + weighted_spectral_sum(state.udot, false));
}

double energy_space_distance(const PhaseState& a, const PhaseState& b) {
  Field du = to_physical(a.u) - to_physical(b.u);
  Field dv = to_physical(a.udot) - to_physical(b.udot);
  return energy_space_norm(PhaseState(std::move(du), std::move(dv), 0.0));
}

double free_energy(const PhaseState& state) {
  const double n = energy_space_norm(state);
  return 0.5 * n * n;
}

double loglog_slope(const std::vector<double>& times, const std::vector<double>& values, double t_lo, double t_hi,
                    int* used) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi || !(times[i] > 0.0) || !(values[i] > 0.0)) continue;
    const double x = std::log(times[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (used) *used = count;
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

namespace {

Projector band_projector(Band band, double cutoff) {
  if (band == Band::low) return projector::LowPass{cutoff};
  return projector::HighPass{cutoff};
}

void check_wraparound(double extent, const std::vector<double>& times) {
  const double tmax = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  if (!(tmax < extent / 4.0)) {
    std::ostringstream msg;
    msg << "dispersive bench horizon t = " << tmax << " needs box extent > " << 4.0 * tmax << " (have " << extent
        << ")";
    throw ContractViolation(msg.str());
  }
}

}  // namespace

DispersiveSeries free_dispersive_bench(const PhaseState& data, Band band, double cutoff, double r,
                                       const std::vector<double>& times, double fit_lo, double fit_hi) {
  check_wraparound(data.grid().extent(), times);
  const Projector proj = band_projector(band, cutoff);
  Field u = to_spectral(project(data.u, proj));
  Field v = to_spectral(project(data.udot, proj));

  DispersiveSeries out;
  const auto& lam = dispersion(data.grid());
  Field work(data.grid(), Representation::spectral);
  for (double t : times) {
    for (std::size_t i = 0; i < work.size(); ++i) {
      const double s = std::sin(t * lam[i]);
      work[i] = std::cos(t * lam[i]) * u[i] + (s / lam[i]) * v[i];
    }
    out.times.push_back(t);
    out.norms.push_back(lebesgue_norm(to_physical(work), r));
  }
  out.fit_lo = fit_lo;
  out.fit_hi = std::min(fit_hi, times.empty() ? 0.0 : *std::max_element(times.begin(), times.end()));
  out.slope = loglog_slope(out.times, out.norms, out.fit_lo, out.fit_hi, &out.fit_points);
  return out;
}

DispersiveSeries radial_dispersive_bench(const RadialDatum& datum, Band band, double cutoff, double r,
                                         const std::vector<double>& times, double extent, int points,
                                         double fit_lo, double fit_hi) {
  check_wraparound(extent, times);
  const Grid line(1, extent, points);
  const double h = line.spacing();
  const int center = points / 2;  // x = 0
  Field v0(line), v1(line);
  for (int i = 0; i < points; ++i) {
    const double x = line.coordinate(i);
    const double rr = std::abs(x);
    const double sign = x < 0.0 ? -1.0 : 1.0;
    v0[i] = x == 0.0 ? 0.0 : sign * rr * datum.u0(rr);
    v1[i] = x == 0.0 ? 0.0 : sign * rr * datum.u1(rr);
  }
  // One-dimensional |k| multipliers reproduce the three-dimensional radial ones.
  const Projector proj = band_projector(band, cutoff);
  Field a = to_spectral(project(v0, proj));
  Field b = to_spectral(project(v1, proj));
  const auto& lam = dispersion(line);

  DispersiveSeries out;
  Field work(line, Representation::spectral);
  for (double t : times) {
    for (int i = 0; i < points; ++i) {
      const double s = std::sin(t * lam[i]);
      work[i] = std::cos(t * lam[i]) * a[i] + (s / lam[i]) * b[i];
    }
    const Field v = to_physical(work);
    double norm = 0.0;
    if (std::isinf(r)) {
      const Field dv = partial_derivative(v, 0);
      norm = std::abs(dv[center]);  // u(0) = v'(0)
      for (int i = center + 1; i < points; ++i) norm = std::max(norm, std::abs(v[i]) / line.coordinate(i));
    } else {
      double sum = 0.0;
      for (int i = center + 1; i < points; ++i) {
        const double x = line.coordinate(i);
        sum += 4.0 * std::numbers::pi * x * x * std::pow(std::abs(v[i]) / x, r);
      }
      norm = std::pow(sum * h, 1.0 / r);
    }
    out.times.push_back(t);
    out.norms.push_back(norm);
  }
  out.fit_lo = fit_lo;
  out.fit_hi = std::min(fit_hi, times.empty() ? 0.0 : *std::max_element(times.begin(), times.end()));
  out.slope = loglog_slope(out.times, out.norms, out.fit_lo, out.fit_hi, &out.fit_points);
  return out;
}

}  // namespace kgh
