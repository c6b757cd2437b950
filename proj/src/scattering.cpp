#include "kgh/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "kgh/error.hpp"
#include "kgh/log.hpp"
#include "kgh/norms.hpp"

namespace kgh {

namespace {

PhaseState reflect(const PhaseState& s) { return PhaseState(s.u, cplx(-1.0) * s.udot, -s.time); }

const PhaseState& snapshot_at(const Trajectory& traj, double t) {
  const PhaseState& s = traj.at(t);
  const double tol = 1e-9 * std::max(1.0, std::abs(t)) + 1e-6 * traj.config.dt;
  if (std::abs(s.time - t) > tol) {
    std::ostringstream msg;
    msg << "no snapshot at t = " << t << " (nearest " << s.time << ")";
    throw ContractViolation(msg.str());
  }
  return s;
}

// Integration config with snapshots only at the ends.
IntegratorConfig endpoints_only(IntegratorConfig c, double span) {
  c.t_end = span;
  c.adaptive = false;
  const long steps = std::max(1L, c.step_count());
  c.snapshot_stride = static_cast<int>(steps);
  c.energy_stride = static_cast<int>(std::max(1L, steps / 20));
  return c;
}

}  // namespace

AsymptoticState extract_asymptotic_state(const Trajectory& traj, const std::vector<double>& times) {
  if (times.empty()) throw ContractViolation("extraction needs at least one time");
  std::vector<double> ts = times;
  std::sort(ts.begin(), ts.end());
  if (traj.snapshots.empty()) throw ContractViolation("trajectory has no snapshots");
  AsymptoticState out(PhaseState::zero(traj.snapshots.front().grid()));
  std::optional<PhaseState> prev;
  for (double t : ts) {
    const PhaseState& s = snapshot_at(traj, t);
    PhaseState pulled = apply_free(s, -s.time);
    pulled.time = 0.0;
    if (prev) out.gaps.push_back(energy_space_distance(pulled, *prev));
    out.times.push_back(s.time);
    prev = std::move(pulled);
  }
  out.data = std::move(*prev);
  out.extraction_time = out.times.back();
  out.cauchy_gap = out.gaps.empty() ? 0.0 : out.gaps.back();
  for (std::size_t i = 1; i < out.gaps.size(); ++i)
    if (out.gaps[i] > out.gaps[i - 1]) out.not_yet_asymptotic = true;
  if (out.not_yet_asymptotic) warn("not-yet-asymptotic: extraction gaps do not decrease");
  return out;
}

double free_strichartz_size(const PhaseState& data, double t0, double window, double step) {
  if (!(window > 0.0) || !(step > 0.0)) throw ContractViolation("smallness window and step must be positive");
  Trajectory traj;
  const int count = static_cast<int>(std::ceil(window / step - 1e-9));
  const PhaseState base = apply_free(data, t0 - data.time);
  traj.snapshots.push_back(base);
  for (int i = 1; i <= count; ++i) traj.snapshots.push_back(apply_free(base, window * i / count));
  const auto set = x1_exponent_set(data.grid().dim());
  double total = 0.0;
  for (const auto& tr : set) total += strichartz_norm(traj, tr, {traj.t_begin(), traj.t_end()});
  return total;
}

WaveOperatorResult wave_operator(const PhaseState& asymptotic, const PotentialSpec& spec,
                                 const IntegratorConfig& config, const WaveOperatorConfig& wcfg) {
  if (wcfg.schedule.empty()) throw ContractViolation("wave operator needs a nonempty T schedule");
  if (!std::is_sorted(wcfg.schedule.begin(), wcfg.schedule.end()) || !(wcfg.schedule.front() > 0.0))
    throw ContractViolation("T schedule must be positive and increasing");
  const PhaseState data(asymptotic.u, asymptotic.udot, 0.0);

  WaveOperatorResult out(PhaseState::zero(data.grid()));
  out.asymptotic_energy = free_energy(data);
  out.smallness = free_strichartz_size(data, wcfg.schedule.front(), wcfg.smallness_window, wcfg.smallness_step);
  // the linear flow needs no smallness
  if (out.smallness > wcfg.eta0 && !spec.is_zero()) {
    std::ostringstream msg;
    msg << "free Strichartz size " << out.smallness << " on [" << wcfg.schedule.front() << ", "
        << wcfg.schedule.front() + wcfg.smallness_window << "] exceeds eta0 = " << wcfg.eta0
        << "; start the schedule at a larger T or shrink the data";
    if (wcfg.require_small) throw RangeError(msg.str());
    warn("smallness: " + msg.str());
  }

  std::optional<PhaseState> prev;
  for (double T : wcfg.schedule) {
    const PhaseState start = apply_free(data, T);
    const Trajectory back = backward_integrate(start, spec, endpoints_only(config, T));
    if (back.blowup_suspected) throw IntegrationFailure("blow-up suspected in the backward leg", back.final_time);
    PhaseState s = back.snapshots.front();
    s.time = 0.0;
    out.schedule_used.push_back(T);
    if (prev) {
      const double scale = std::max(energy_space_norm(s), 1e-300);
      out.gaps.push_back(energy_space_distance(s, *prev) / scale);
      if (out.gaps.back() <= wcfg.tolerance) {
        out.converged = true;
        prev = std::move(s);
        break;
      }
    }
    prev = std::move(s);
  }
  out.state = std::move(*prev);
  if (!out.converged && !out.gaps.empty()) {
    std::ostringstream msg;
    msg << "wave operator not converged: last relative gap " << out.gaps.back() << " > " << wcfg.tolerance;
    warn(msg.str());
  }
  out.energy = energy(out.state, spec).total;
  return out;
}

WaveOperatorResult incoming_wave_operator(const PhaseState& asymptotic, const PotentialSpec& spec,
                                          const IntegratorConfig& config, const WaveOperatorConfig& wcfg) {
  WaveOperatorResult r = wave_operator(reflect(asymptotic), spec, config, wcfg);
  r.state = reflect(r.state);
  r.state.time = 0.0;
  return r;
}

DiagnosticsSeries completeness_residual(const Trajectory& traj, const PhaseState& asymptotic) {
  const PhaseState data(asymptotic.u, asymptotic.udot, 0.0);
  const double scale = energy_space_norm(data);
  DiagnosticsSeries out;
  std::vector<double> abs_err, rel_err;
  for (const auto& s : traj.snapshots) {
    const double d = energy_space_distance(s, apply_free(data, s.time));
    out.times.push_back(s.time);
    abs_err.push_back(d);
    rel_err.push_back(scale > 0.0 ? d / scale : d);
  }
  out.column("abs") = abs_err;
  out.column("rel") = rel_err;
  return out;
}

RoundtripReport scattering_roundtrip(const PhaseState& asymptotic, const PotentialSpec& spec,
                                     const IntegratorConfig& config, const RoundtripConfig& rcfg) {
  if (!(rcfg.t_out > 0.0)) throw ContractViolation("outgoing horizon must be positive");
  std::vector<double> ext = rcfg.extraction_times;
  if (ext.empty()) ext = {0.25 * rcfg.t_out, 0.5 * rcfg.t_out, rcfg.t_out};
  std::sort(ext.begin(), ext.end());
  if (ext.front() <= 0.0 || ext.back() > rcfg.t_out * (1 + 1e-12))
    throw ContractViolation("extraction times must lie in (0, t_out]");

  // snapshot stride: gcd of the step indices of the extraction times
  IntegratorConfig c = config;
  c.adaptive = false;
  c.t_end = rcfg.t_out;
  const long steps = c.step_count();
  const double h = c.t_end / static_cast<double>(steps);
  long stride = 0;
  for (double t : ext) {
    const long k = std::lround(t / h);
    if (std::abs(k * h - t) > 1e-6 * h) {
      std::ostringstream msg;
      msg << "extraction time " << t << " is not a multiple of the step " << h;
      throw ContractViolation(msg.str());
    }
    stride = std::gcd(stride, k);
  }
  c.snapshot_stride = static_cast<int>(stride);
  c.energy_stride = static_cast<int>(std::max(1L, stride / 4));

  RoundtripReport rep(incoming_wave_operator(asymptotic, spec, config, rcfg.incoming), asymptotic.grid());
  rep.interacting = rep.incoming.state;

  const Trajectory fwd = integrate(rep.interacting, spec, c);
  if (fwd.blowup_suspected) throw IntegrationFailure("blow-up suspected in the outgoing leg", fwd.final_time);
  rep.outgoing = extract_asymptotic_state(fwd, ext);

  rep.energy_in = free_energy(PhaseState(asymptotic.u, asymptotic.udot));
  rep.energy_out = free_energy(rep.outgoing.data);
  rep.energy_defect = rep.energy_in > 0.0 ? std::abs(rep.energy_out - rep.energy_in) / rep.energy_in : 0.0;
  return rep;
}

}  // namespace kgh
