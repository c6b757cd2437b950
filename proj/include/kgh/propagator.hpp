#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "kgh/field.hpp"
#include "kgh/spectral.hpp"

namespace kgh {

// (u, du/dt) at a time stamp. Both fields share one grid; library functions
// return physical-space states.
struct PhaseState {
  Field u;
  Field udot;
  double time = 0.0;

  PhaseState(Field u_, Field udot_, double t = 0.0);
  static PhaseState zero(const Grid& grid, double t = 0.0);
  const Grid& grid() const { return u.grid(); }
};

// lambda(k) = sqrt(1 + |k|^2) per lattice point, storage order.
const std::vector<double>& dispersion(const Grid& grid);

// Spectral multipliers of the free flow V0(tau) for one fixed tau.
class FreeFlowMultipliers {
 public:
  FreeFlowMultipliers(const Grid& grid, double tau);
  double tau() const { return tau_; }
  // (u, v) <- (cos u + sin/lambda v, -lambda sin u + cos v), spectral storage.
  void apply(std::span<cplx> u, std::span<cplx> v) const;
  std::span<const double> cos_table() const { return cos_; }
  std::span<const double> sinc_table() const { return sin_over_lambda_; }
  std::span<const double> lambda_sin_table() const { return lambda_sin_; }

 private:
  double tau_;
  std::vector<double> cos_;
  std::vector<double> sin_over_lambda_;
  std::vector<double> lambda_sin_;
};

// Exact free Klein-Gordon flow V0(t); the time stamp advances by t.
PhaseState apply_free(const PhaseState& state, double t);

// K(t) = sin(t omega)/omega (derivative = false) or K'(t) = cos(t omega).
Field apply_K(const Field& f, double t, bool derivative);

// Free-flow energy 1/2 (||udot||^2 + ||grad u||^2 + ||u||^2).
double free_energy(const PhaseState& state);

// ||(u, udot)||_{H^1 x L^2} with the omega-based H^1 norm.
double energy_space_norm(const PhaseState& state);
double energy_space_distance(const PhaseState& a, const PhaseState& b);

enum class Band { low, high };

struct DispersiveSeries {
  std::vector<double> times;
  std::vector<double> norms;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  int fit_points = 0;
};

// Least-squares slope of log(values) against log(times) over [t_lo, t_hi].
double loglog_slope(const std::vector<double>& times, const std::vector<double>& values, double t_lo, double t_hi,
                    int* used = nullptr);

// L^r norms of the free evolution of the banded datum, plus the log-log slope
// over the fit window. Refuses when max(times) >= L/4.
DispersiveSeries free_dispersive_bench(const PhaseState& data, Band band, double cutoff, double r,
                                       const std::vector<double>& times, double fit_lo = 3.0,
                                       double fit_hi = std::numeric_limits<double>::infinity());

// Radial data in three dimensions reduce exactly to the one-dimensional flow
// of v = r u with odd extension; Fourier multipliers in |k| act identically.
struct RadialDatum {
  std::function<double(double)> u0;
  std::function<double(double)> u1;
};

DispersiveSeries radial_dispersive_bench(const RadialDatum& datum, Band band, double cutoff, double r,
                                         const std::vector<double>& times, double extent, int points,
                                         double fit_lo = 3.0,
                                         double fit_hi = std::numeric_limits<double>::infinity());

}  // namespace kgh
