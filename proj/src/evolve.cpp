#include "kgh/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kgh/error.hpp"
#include "kgh/log.hpp"
#include "kgh/norms.hpp"
#include "kgh/spectral.hpp"

namespace kgh {

std::string to_string(Scheme scheme) { return scheme == Scheme::gautschi2 ? "gautschi2" : "duhamel_rk4"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "gautschi2") return Scheme::gautschi2;
  if (name == "duhamel_rk4") return Scheme::duhamel_rk4;
  throw ConfigError("unknown scheme '" + name + "' (expected gautschi2 or duhamel_rk4)");
}

void IntegratorConfig::validate(const Grid& grid) const {
  std::ostringstream why;
  if (!(dt > 0.0) || !std::isfinite(dt)) why << "dt must be positive; ";
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) why << "t_end must be finite and >= 0; ";
  if (snapshot_stride < 1) why << "snapshot_stride must be >= 1; ";
  if (energy_stride < 1) why << "energy_stride must be >= 1; ";
  if (!(blowup_factor > 1.0)) why << "blowup_factor must exceed 1; ";
  if (adaptive && !(adaptive_tolerance > 0.0)) why << "adaptive_tolerance must be positive; ";
  const double lam_max = std::sqrt(1.0 + grid.max_wavenumber() * grid.max_wavenumber());
  if (dt * lam_max > std::numbers::pi * (1.0 + 1e-12))
    why << "dt * max lambda = " << dt * lam_max << " exceeds pi (dt <= " << std::numbers::pi / lam_max << "); ";
  const std::string s = why.str();
  if (!s.empty()) throw ConfigError("integrator: " + s.substr(0, s.size() - 2));
}

long IntegratorConfig::step_count() const {
  return t_end == 0.0 ? 0 : static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

double Trajectory::t_begin() const { return snapshots.empty() ? 0.0 : snapshots.front().time; }
double Trajectory::t_end() const { return snapshots.empty() ? 0.0 : snapshots.back().time; }

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.time);
  return t;
}

const PhaseState& Trajectory::at(double t) const {
  if (snapshots.empty()) throw ContractViolation("trajectory has no snapshots");
  auto best = snapshots.begin();
  for (auto it = snapshots.begin(); it != snapshots.end(); ++it)
    if (std::abs(it->time - t) < std::abs(best->time - t)) best = it;
  return *best;
}

Stepper::Stepper(const Grid& grid, const PotentialSpec& spec, Scheme scheme, double dt)
    : Stepper(grid, std::make_shared<HartreeOperator>(spec, grid), scheme, dt) {}

Stepper::Stepper(const Grid& grid, std::shared_ptr<HartreeOperator> hartree, Scheme scheme, double dt)
    : grid_(grid),
      hartree_(std::move(hartree)),
      scheme_(scheme),
      dt_(dt),
      half_(grid, 0.5 * dt),
      full_(grid, dt),
      phys_(grid.size()),
      nonlin_(grid.size()) {
  if (scheme_ == Scheme::duhamel_rk4) stages_.assign(8, ComplexBuffer(grid.size()));
}

// out = FFT(e(t) - f(u)): the force in u'' + omega^2 u = e - f(u).
void Stepper::nonlinear_spectral(std::span<const cplx> u_hat, double t, std::span<cplx> out) {
  const bool forced = static_cast<bool>(forcing_);
  if (hartree_->is_zero() && !forced) {
    std::fill(out.begin(), out.end(), cplx{});
    return;
  }
  std::copy(u_hat.begin(), u_hat.end(), phys_.begin());
  fft_inverse(phys_, grid_);
  if (hartree_->is_zero()) {
    std::fill(out.begin(), out.end(), cplx{});
  } else {
    hartree_->apply(phys_, out);
    for (auto& z : out) z = -z;
  }
  if (forced) {
    forcing_buf_.resize(grid_.size());
    forcing_(t, forcing_buf_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += forcing_buf_[i];
  }
  fft_forward(out, grid_);
}

void Stepper::advance(std::span<cplx> u, std::span<cplx> v, double t) {
  if (scheme_ == Scheme::gautschi2)
    advance_gautschi(u, v, t);
  else
    advance_rk4(u, v, t);
}

// Free half step, kick with the force at the midpoint, free half step.
void Stepper::advance_gautschi(std::span<cplx> u, std::span<cplx> v, double t) {
  half_.apply(u, v);
  nonlinear_spectral(u, t + 0.5 * dt_, nonlin_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += dt_ * nonlin_[i];
  half_.apply(u, v);
}

// Lawson RK4 in the interaction picture, folded so only half-step and
// full-step multipliers are needed.
void Stepper::advance_rk4(std::span<cplx> u, std::span<cplx> v, double t) {
  const double h = dt_;
  const std::size_t N = u.size();
  auto& yu = stages_[0];
  auto& yv = stages_[1];
  auto& hu = stages_[2];  // E(h/2) y
  auto& hv = stages_[3];
  auto& k1 = stages_[4];
  auto& k2 = stages_[5];
  auto& k3 = stages_[6];
  auto& k4 = stages_[7];

  nonlinear_spectral(u, t, k1);

  for (std::size_t i = 0; i < N; ++i) {
    yu[i] = u[i];
    yv[i] = v[i] + 0.5 * h * k1[i];
  }
  half_.apply(yu, yv);
  nonlinear_spectral(yu, t + 0.5 * h, k2);

  std::copy(u.begin(), u.end(), hu.begin());
  std::copy(v.begin(), v.end(), hv.begin());
  half_.apply(hu, hv);
  for (std::size_t i = 0; i < N; ++i) {
    yu[i] = hu[i];
    yv[i] = hv[i] + 0.5 * h * k2[i];
  }
  nonlinear_spectral(yu, t + 0.5 * h, k3);

  // E(h) y + h E(h/2) (0, k3) = E(h/2) (E(h/2) y + h (0, k3))
  for (std::size_t i = 0; i < N; ++i) {
    yu[i] = hu[i];
    yv[i] = hv[i] + h * k3[i];
  }
  half_.apply(yu, yv);
  nonlinear_spectral(yu, t + h, k4);

  for (std::size_t i = 0; i < N; ++i) v[i] += h / 6.0 * k1[i];
  half_.apply(u, v);
  for (std::size_t i = 0; i < N; ++i) v[i] += h / 3.0 * (k2[i] + k3[i]);
  half_.apply(u, v);
  for (std::size_t i = 0; i < N; ++i) v[i] += h / 6.0 * k4[i];
}

PhaseState step(const PhaseState& state, double dt, const PotentialSpec& spec, Scheme scheme) {
  if (!(std::isfinite(dt)) || dt == 0.0) throw ContractViolation("step needs a finite nonzero dt");
  Stepper stepper(state.grid(), spec, scheme, dt);
  Field u = to_spectral(state.u);
  Field v = to_spectral(state.udot);
  stepper.advance(u.values(), v.values(), state.time);
  return PhaseState(to_physical(std::move(u)), to_physical(std::move(v)), state.time + dt);
}

double spectral_tail_fraction(const PhaseState& state) {
  const Field u = to_spectral(state.u);
  const Field v = to_spectral(state.udot);
  const auto& k2 = wavenumber_squared(state.grid());
  const double kc = 2.0 / 3.0 * state.grid().max_wavenumber();
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = (1.0 + k2[i]) * std::norm(u[i]) + std::norm(v[i]);
    total += e;
    if (k2[i] > kc * kc) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

namespace {

bool all_finite(std::span<const cplx> a) {
  for (const auto& z : a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

PhaseState physical_state(const Field& u_hat, const Field& v_hat, double t) {
  return PhaseState(to_physical(u_hat), to_physical(v_hat), t);
}

// Shared driver; direction = +1 forward, -1 backward.
Trajectory run(const PhaseState& initial, const PotentialSpec& spec, const IntegratorConfig& config,
               const IntegrateOptions& options, int direction) {
  const Grid& grid = initial.grid();
  config.validate(grid);
  if (!all_finite(initial.u.values()) || !all_finite(initial.udot.values()))
    throw ContractViolation("initial state has non-finite values");

  Trajectory traj;
  traj.config = config;
  traj.potential = spec;

  auto hartree = std::make_shared<HartreeOperator>(spec, grid);
  const PhaseState start(to_physical(initial.u), to_physical(initial.udot), initial.time);
  const EnergyBreakdown e0 = energy(start, *hartree);
  traj.initial_energy = e0.total;
  const double threshold = config.blowup_threshold.value_or(config.blowup_factor * std::max(free_energy(start), 1e-300));

  bool tail_warned = false;
  auto record_energy = [&](const PhaseState& s) {
    const EnergyBreakdown e = energy(s, *hartree);
    traj.energy_times.push_back(s.time);
    traj.energy_values.push_back(e.total);
    const double scale = std::abs(e0.total) > 0.0 ? std::abs(e0.total) : 1.0;
    traj.max_relative_drift = std::max(traj.max_relative_drift, std::abs(e.total - e0.total) / scale);
    double mean = 0.0;
    for (const auto& z : s.u.values()) mean += std::norm(z);
    traj.mean_density.push_back(mean / static_cast<double>(grid.size()));
    const double tail = spectral_tail_fraction(s);
    traj.max_tail_fraction = std::max(traj.max_tail_fraction, tail);
    if (tail > 1e-8 && !tail_warned) {
      tail_warned = true;
      std::ostringstream msg;
      msg << "spectral-tail: top-third band carries " << tail << " of the energy at t = " << s.time;
      warn(msg.str());
    }
    return free_energy(s);
  };
  auto emit = [&](const PhaseState& s) {
    if (options.observer) options.observer(s);
    if (config.keep_snapshots) traj.snapshots.push_back(s);
  };

  record_energy(start);
  emit(start);

  Field u = to_spectral(start.u);
  Field v = to_spectral(start.udot);
  double t = start.time;
  const double dir = direction > 0 ? 1.0 : -1.0;

  auto fail_check = [&](double t_valid) {
    if (!all_finite(u.values()) || !all_finite(v.values())) {
      std::ostringstream msg;
      msg << "non-finite values after t = " << t_valid;
      throw IntegrationFailure(msg.str(), t_valid);
    }
  };

  if (!config.adaptive) {
    const long nsteps = config.step_count();
    const double h = nsteps > 0 ? config.t_end / nsteps : config.dt;
    Stepper stepper(grid, hartree, config.scheme, dir * h);
    if (options.forcing) stepper.set_forcing(options.forcing);
    for (long k = 1; k <= nsteps; ++k) {
      const double t_prev = t;
      stepper.advance(u.values(), v.values(), t);
      t = start.time + dir * h * k;
      fail_check(t_prev);
      ++traj.steps_taken;
      const bool snap = k % config.snapshot_stride == 0;
      const bool probe = k % config.energy_stride == 0 || k == nsteps;
      if (!snap && !probe) continue;
      const PhaseState s = physical_state(u, v, t);
      if (probe && record_energy(s) > threshold) {
        traj.blowup_suspected = true;
        warn("blow-up suspected: free energy exceeded the threshold at t = " + std::to_string(t));
        emit(s);
        break;
      }
      if (snap) emit(s);
    }
  } else {
    // Step doubling; steps are clamped to land on the snapshot times
    // start + k * stride * dt.
    const double lam_max = std::sqrt(1.0 + grid.max_wavenumber() * grid.max_wavenumber());
    const double h_cap = std::numbers::pi / lam_max;
    const double spacing = config.snapshot_stride * config.dt;
    const double order = config.scheme == Scheme::gautschi2 ? 2.0 : 4.0;
    double h = config.dt;
    double elapsed = 0.0;
    long next_snap = 1;
    long accepted = 0;
    while (elapsed < config.t_end * (1.0 - 1e-12)) {
      const double target = std::min(next_snap * spacing, config.t_end);
      double trial = std::min({h, h_cap, target - elapsed});
      Field u1 = u, v1 = v, u2 = u, v2 = v;
      Stepper big(grid, hartree, config.scheme, dir * trial);
      Stepper small(grid, hartree, config.scheme, dir * trial / 2.0);
      if (options.forcing) {
        big.set_forcing(options.forcing);
        small.set_forcing(options.forcing);
      }
      big.advance(u1.values(), v1.values(), t);
      small.advance(u2.values(), v2.values(), t);
      small.advance(u2.values(), v2.values(), t + dir * trial / 2.0);
      if (!all_finite(u2.values()) || !all_finite(v2.values())) {
        std::ostringstream msg;
        msg << "non-finite values after t = " << t;
        throw IntegrationFailure(msg.str(), t);
      }
      const double err =
          energy_space_distance(physical_state(u1, v1, 0.0), physical_state(u2, v2, 0.0)) / (std::pow(2.0, order) - 1.0);
      const double allowed = config.adaptive_tolerance * trial;
      const double factor = err > 0.0 ? 0.9 * std::pow(allowed / err, 1.0 / (order + 1.0)) : 2.0;
      if (err > allowed && trial > 1e-12) {
        h = trial * std::clamp(factor, 0.2, 0.9);
        continue;
      }
      u = std::move(u2);
      v = std::move(v2);
      elapsed += trial;
      t = start.time + dir * elapsed;
      ++traj.steps_taken;
      ++accepted;
      h = std::min(h_cap, trial * std::clamp(factor, 0.2, 2.0));
      const bool snap = std::abs(elapsed - target) <= 1e-12 * std::max(1.0, target);
      if (snap) ++next_snap;
      if (!snap && accepted % config.energy_stride != 0) continue;
      const PhaseState s = physical_state(u, v, t);
      if (record_energy(s) > threshold) {
        traj.blowup_suspected = true;
        warn("blow-up suspected: free energy exceeded the threshold at t = " + std::to_string(t));
        emit(s);
        break;
      }
      if (snap) emit(s);
    }
  }
  traj.final_time = t;
  if (traj.blowup_suspected && spec.mode == PotentialMode::theorem)
    warn("theorem-mode potential triggered blow-up detection; check resolution and dt");

  if (direction < 0) {
    std::reverse(traj.snapshots.begin(), traj.snapshots.end());
    std::reverse(traj.energy_times.begin(), traj.energy_times.end());
    std::reverse(traj.energy_values.begin(), traj.energy_values.end());
    std::reverse(traj.mean_density.begin(), traj.mean_density.end());
  }
  return traj;
}

}  // namespace

Trajectory integrate(const PhaseState& initial, const PotentialSpec& spec, const IntegratorConfig& config,
                     const IntegrateOptions& options) {
  return run(initial, spec, config, options, +1);
}

Trajectory backward_integrate(const PhaseState& final_state, const PotentialSpec& spec, const IntegratorConfig& config,
                              const IntegrateOptions& options) {
  return run(final_state, spec, config, options, -1);
}

}  // namespace kgh
