#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgh/field.hpp"
#include "kgh/potential.hpp"
#include "kgh/propagator.hpp"

namespace kgh {

enum class Scheme { gautschi2, duhamel_rk4 };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::gautschi2;
  double dt = 0.01;
  double t_end = 1.0;
  int snapshot_stride = 1;
  // Absolute free-energy ceiling; unset means blowup_factor x initial energy.
  std::optional<double> blowup_threshold;
  double blowup_factor = 1e3;
  bool adaptive = false;
  double adaptive_tolerance = 1e-8;  // local error per unit time, energy norm
  int energy_stride = 1;             // steps between energy evaluations
  bool keep_snapshots = true;        // false: observer only, saves memory

  // Throws ConfigError when an invariant fails for this grid.
  void validate(const Grid& grid) const;
  // Fixed-step runs take this many steps of size t_end / steps <= dt.
  long step_count() const;
};

// Right-hand side e(t) of  u'' + (1 - Laplacian) u + f(u) = e, written into a
// physical buffer.
using Forcing = std::function<void(double t, std::span<cplx> out)>;

struct Trajectory {
  std::vector<PhaseState> snapshots;
  IntegratorConfig config;
  PotentialSpec potential;

  std::vector<double> energy_times;
  std::vector<double> energy_values;
  double initial_energy = 0.0;
  double max_relative_drift = 0.0;
  std::vector<double> mean_density;  // k = 0 coefficient per energy sample
  double max_tail_fraction = 0.0;    // top-third spectral energy fraction

  bool blowup_suspected = false;
  double final_time = 0.0;
  int steps_taken = 0;

  double t_begin() const;
  double t_end() const;
  std::vector<double> times() const;
  // Snapshot whose time stamp is closest to t.
  const PhaseState& at(double t) const;
};

// Single-step propagator with cached multipliers. Works on spectral storage.
class Stepper {
 public:
  Stepper(const Grid& grid, const PotentialSpec& spec, Scheme scheme, double dt);
  Stepper(const Grid& grid, std::shared_ptr<HartreeOperator> hartree, Scheme scheme, double dt);

  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  HartreeOperator& hartree() { return *hartree_; }

  void set_forcing(Forcing forcing) { forcing_ = std::move(forcing); }

  // Advances spectral (u, v) from t to t + dt in place.
  void advance(std::span<cplx> u, std::span<cplx> v, double t);

 private:
  void nonlinear_spectral(std::span<const cplx> u_hat, double t, std::span<cplx> out_hat);
  void advance_gautschi(std::span<cplx> u, std::span<cplx> v, double t);
  void advance_rk4(std::span<cplx> u, std::span<cplx> v, double t);

  Grid grid_;
  std::shared_ptr<HartreeOperator> hartree_;
  Scheme scheme_;
  double dt_;
  FreeFlowMultipliers half_;
  FreeFlowMultipliers full_;
  Forcing forcing_;
  ComplexBuffer phys_, nonlin_, forcing_buf_;
  std::vector<ComplexBuffer> stages_;
};

// One step of size dt (negative dt runs backward).
PhaseState step(const PhaseState& state, double dt, const PotentialSpec& spec, Scheme scheme);

using SnapshotObserver = std::function<void(const PhaseState&)>;

struct IntegrateOptions {
  Forcing forcing;
  SnapshotObserver observer;
};

Trajectory integrate(const PhaseState& initial, const PotentialSpec& spec, const IntegratorConfig& config,
                     const IntegrateOptions& options = {});

// Same scheme with negative dt, from final.time down to final.time - t_end.
// Snapshots are stored in increasing time order.
Trajectory backward_integrate(const PhaseState& final_state, const PotentialSpec& spec, const IntegratorConfig& config,
                              const IntegrateOptions& options = {});

// Fraction of the H^1 x L^2 energy carried by modes with |k| above 2/3 of the
// largest lattice wavenumber.
double spectral_tail_fraction(const PhaseState& state);

}  // namespace kgh
