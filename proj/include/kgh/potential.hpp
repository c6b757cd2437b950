#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kgh/field.hpp"
#include "kgh/grid.hpp"

namespace kgh {

enum class PotentialKind { none, power_law, radial_table };
enum class PotentialMode { theorem, exploratory };
enum class K0Policy { zero, screened };

// Radial interaction V(x) = v(|x|) together with the (H1)/(H2) metadata the
// theory attaches to it.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::none;
  PotentialMode mode = PotentialMode::exploratory;
  int dim = 3;
  double gamma = 0.0;
  std::vector<std::pair<double, double>> table;  // (r, v(r)), r increasing

  // (H1) split exponents: V in L^{p1} + L^{p2}, p2 <= p1. NaN when no
  // admissible straddle exists (exploratory potentials).
  double p1 = 0.0;
  double p2 = 0.0;

  // (H2) data: v(r1) - v(r2) >= (A_alpha / alpha)(r2^alpha - r1^alpha) on (0, a].
  double alpha = 2.0;
  double A_alpha = 0.0;
  double a = 1.0;

  K0Policy k0_policy = K0Policy::zero;
  double screening_mass = 1.0;

  // When set, the power law is cut off at |x| = radius and the symbol is the
  // exact Fourier transform of the truncated kernel instead of the Riesz
  // symbol (free-space convolution for data supported within radius/2).
  std::optional<double> truncation_radius;

  static PotentialSpec zero(int dim);
  static PotentialSpec radial_table(int dim, std::vector<std::pair<double, double>> samples, PotentialMode mode);

  double radial_value(double r) const;
  bool is_zero() const { return kind == PotentialKind::none; }
};

std::string to_string(PotentialKind kind);
std::string to_string(PotentialMode mode);
std::string to_string(K0Policy policy);

// V(x) = |x|^{-gamma}. Theorem mode enforces 2 < gamma < min(4, n); the
// (p1, p2) pair straddles n/gamma following the unit-ball split.
PotentialSpec make_power_potential(double gamma, const Grid& grid, PotentialMode mode);

// Riesz constant c(n, gamma) with FT(|x|^{-gamma}) = c |xi|^{gamma - n}.
double riesz_constant(int n, double gamma);

// Spectral multiplier of V* on a grid (storage order).
struct HartreeSymbol {
  Grid grid;
  std::vector<double> multiplier;
  double k0_value = 0.0;
};

HartreeSymbol hartree_symbol(const PotentialSpec& spec, const Grid& grid);

// Reusable evaluator of f(u) = (V * |u|^2) u with its own work buffers.
class HartreeOperator {
 public:
  HartreeOperator(const PotentialSpec& spec, const Grid& grid);
  explicit HartreeOperator(HartreeSymbol symbol);

  const HartreeSymbol& symbol() const { return symbol_; }
  bool is_zero() const { return zero_; }

  // Writes f(u) in physical space. `u` is physical storage of the grid.
  void apply(std::span<const cplx> u, std::span<cplx> out);

  // V * rho for real rho = |u|^2, returned real in physical space.
  void potential(std::span<const cplx> u, std::span<double> out);

  // 1/4 sum_k Vhat(k) |rho_hat(k)|^2 times the cell volume.
  double interaction_energy(std::span<const cplx> u);

  // Mean of |u|^2 at the last apply(); the coefficient of the constant the
  // k = 0 policy removes or replaces.
  double last_mean_density() const { return last_mean_density_; }

 private:
  void density_spectrum(std::span<const cplx> u);

  HartreeSymbol symbol_;
  bool zero_ = false;
  ComplexBuffer work_;
  double last_mean_density_ = 0.0;
};

// One-shot f(u) for a physical field.
Field hartree_apply(const Field& u, const PotentialSpec& spec);

struct H2Report {
  double A_alpha_measured = 0.0;
  bool pass = false;
  bool monotone = true;
  double witness_r1 = 0.0;
  double witness_r2 = 0.0;
  std::string reason;
};

// Sampled check of (H2) on random pairs 0 < r1 < r2 <= a.
H2Report validate_h2(const PotentialSpec& spec, int sample_count = 10000, std::uint64_t seed = 12345);

}  // namespace kgh
