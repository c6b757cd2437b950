#pragma once

#include <functional>
#include <span>
#include <variant>

#include "kgh/field.hpp"
#include "kgh/grid.hpp"

namespace kgh {

// estimate: plans are a pure function of the shape, so results are bitwise
// reproducible run to run. measure: timed planning, faster on large grids but
// the chosen algorithm (and the last bits) can vary. Affects plans created
// after the call only.
enum class FftPlanner { estimate, measure };
void set_fft_planner(FftPlanner planner);
FftPlanner fft_planner();

enum class Direction { forward, inverse };

// In-place unitary DFT on raw storage laid out for `grid` (no representation
// bookkeeping). Used by the hot loops of the integrator.
void fft_forward(std::span<cplx> data, const Grid& grid);
void fft_inverse(std::span<cplx> data, const Grid& grid);

// Unitary DFT. Forward requires a physical field, inverse a spectral one.
Field transform(Field f, Direction direction);

Field to_spectral(Field f);
Field to_physical(Field f);

// Multiplies the spectrum by symbol(|k|^2); the result keeps the input's
// representation.
Field apply_radial_multiplier(Field f, const std::function<double(double)>& symbol);

// Multiplier (1 + |k|^2)^{s/2}, i.e. omega^s with omega = (1 - Laplacian)^{1/2}.
Field apply_omega_power(Field f, double s);

// d/dx_axis as the multiplier i*k_axis. The Nyquist mode is dropped so real
// fields stay real.
Field partial_derivative(Field f, int axis);

// Littlewood-Paley profile: psi0_hat == 1 on |xi| <= 1, == 0 on |xi| >= 2,
// with a C-infinity transition; psi_hat(xi) = psi0_hat(xi) - psi0_hat(2 xi).
struct DyadicProfile {
  static double psi0_hat(double xi_abs);
  static double psi_hat(double xi_abs);
  // Symbol of Delta_j: psi_hat(xi / 2^j).
  static double delta_j(double xi_abs, int j);
  // Number of bands j = 1..J needed so the partition covers every lattice mode.
  static int resolved_bands(const Grid& grid);
};

namespace projector {
struct DeltaJ {
  int j;
};
struct P0 {};
struct LowPass {
  double cutoff;
};
struct HighPass {
  double cutoff;
};
}  // namespace projector

using Projector = std::variant<projector::DeltaJ, projector::P0, projector::LowPass, projector::HighPass>;

// Symbol of the projector evaluated at |xi|.
double projector_symbol(const Projector& kind, double xi_abs);

Field project(Field f, const Projector& kind);

}  // namespace kgh
