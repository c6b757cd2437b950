#pragma once

#include <utility>
#include <vector>

#include "kgh/diagnostics.hpp"
#include "kgh/evolve.hpp"
#include "kgh/propagator.hpp"

namespace kgh {

// Free data (u0+, u1+) at time 0 whose free flow the solution approaches.
struct AsymptoticState {
  explicit AsymptoticState(PhaseState d) : data(std::move(d)) {}
  PhaseState data;
  double extraction_time = 0.0;
  std::vector<double> times;
  std::vector<double> gaps;  // ||V0(-t_{i+1}) u(t_{i+1}) - V0(-t_i) u(t_i)||, H1 x L2
  double cauchy_gap = 0.0;   // last entry of gaps
  bool not_yet_asymptotic = false;
};

// V0(-t) u(t) at each requested time; the latest one is kept. Every time must
// match a snapshot.
AsymptoticState extract_asymptotic_state(const Trajectory& traj, const std::vector<double>& times);

struct WaveOperatorConfig {
  std::vector<double> schedule{10.0, 20.0, 40.0, 80.0};
  double tolerance = 1e-4;  // successive-T gap relative to ||state||
  double eta0 = 0.1;
  double smallness_window = 10.0;  // free Strichartz norm over [T0, T0 + window]
  double smallness_step = 0.5;
  bool require_small = true;  // throw RangeError when the check fails
};

struct WaveOperatorResult {
  explicit WaveOperatorResult(PhaseState s) : state(std::move(s)) {}
  PhaseState state;  // Omega(data) at time 0
  std::vector<double> schedule_used;
  std::vector<double> gaps;  // relative, between consecutive schedule entries
  bool converged = false;
  double smallness = 0.0;
  double asymptotic_energy = 0.0;  // free energy of the scattering data
  double energy = 0.0;             // full energy of state
};

// Solves backward from V0(T) data at t = T to t = 0 for each T in the schedule.
WaveOperatorResult wave_operator(const PhaseState& asymptotic, const PotentialSpec& spec,
                                 const IntegratorConfig& config, const WaveOperatorConfig& wcfg = {});

// Incoming operator through t -> -t: Omega_-(phi, psi) = R Omega_+(phi, -psi),
// R(u, v) = (u, -v).
WaveOperatorResult incoming_wave_operator(const PhaseState& asymptotic, const PotentialSpec& spec,
                                          const IntegratorConfig& config, const WaveOperatorConfig& wcfg = {});

// "abs" and "rel" columns: ||u(t) - V0(t) data|| per snapshot.
DiagnosticsSeries completeness_residual(const Trajectory& traj, const PhaseState& asymptotic);

// Free Strichartz size of the data: sum over the X1 exponent set of the
// u-component norms over [t0, t0 + window].
double free_strichartz_size(const PhaseState& data, double t0, double window, double step);

struct RoundtripConfig {
  WaveOperatorConfig incoming;
  double t_out = 40.0;
  std::vector<double> extraction_times;  // default t_out / 4, t_out / 2, t_out
};

struct RoundtripReport {
  RoundtripReport(WaveOperatorResult in, const Grid& grid)
      : incoming(std::move(in)), interacting(PhaseState::zero(grid)), outgoing(PhaseState::zero(grid)) {}
  WaveOperatorResult incoming;
  PhaseState interacting;  // Omega_-(phi, psi)
  AsymptoticState outgoing;
  double energy_in = 0.0;
  double energy_out = 0.0;
  double energy_defect = 0.0;  // |out - in| / in
};

// S(phi, psi) = Omega_+^{-1} Omega_-(phi, psi).
RoundtripReport scattering_roundtrip(const PhaseState& asymptotic, const PotentialSpec& spec,
                                     const IntegratorConfig& config, const RoundtripConfig& rcfg = {});

}  // namespace kgh
