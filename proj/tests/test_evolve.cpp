#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "kgh/error.hpp"
#include "kgh/evolve.hpp"
#include "kgh/log.hpp"
#include "kgh/norms.hpp"

using namespace kgh;

namespace {

PhaseState datum(const Grid& g, double amp) {
  Field u = testing::sample(g, [&](double x, double y, double z) {
    return cplx(amp * std::exp(-(x * x + y * y + z * z)), 0.3 * amp * x * std::exp(-(x * x + y * y + z * z)));
  });
  Field v = testing::gaussian(g, 1.2, 0.5 * amp);
  return PhaseState(u, v, 0.0);
}

// Final state through a single-snapshot run: stride = number of steps.
PhaseState final_state(const PhaseState& s, const PotentialSpec& spec, Scheme scheme, double dt, double t_end) {
  IntegratorConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_stride = static_cast<int>(std::lround(t_end / dt));
  c.energy_stride = c.snapshot_stride;
  auto traj = integrate(s, spec, c);
  return traj.snapshots.back();
}

}  // namespace

TEST_CASE("linear limit: a step is the exact free flow") {
  Grid g(3, 10.0, 16);
  auto s = datum(g, 1.0);
  for (Scheme sc : {Scheme::gautschi2, Scheme::duhamel_rk4}) {
    auto a = step(s, 0.1, PotentialSpec::zero(3), sc);
    auto b = apply_free(s, 0.1);
    CHECK(max_abs_difference(a.u, b.u) < 1e-12);
    CHECK(max_abs_difference(a.udot, b.udot) < 1e-12);
  }
}

TEST_CASE("convergence order under dt halving") {
  Grid g(3, 12.0, 24);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto s = datum(g, 1.0);
  const double T = 1.0;
  for (auto [scheme, expected, tol] : {std::tuple{Scheme::gautschi2, 4.0, 0.5}, std::tuple{Scheme::duhamel_rk4, 16.0, 3.0}}) {
    const double dt = 0.1;
    auto ref = final_state(s, spec, scheme, dt / 8, T);
    auto a = final_state(s, spec, scheme, dt, T);
    auto b = final_state(s, spec, scheme, dt / 2, T);
    const double ea = energy_space_distance(a, ref);
    const double eb = energy_space_distance(b, ref);
    // Richardson: with the reference at dt/8 the measured ratio is
    // (1 - 8^-p) / (2^-p - 8^-p) times the true one
    const double p = scheme == Scheme::gautschi2 ? 2.0 : 4.0;
    const double correction = (std::pow(2.0, -p) - std::pow(8.0, -p)) / (1.0 - std::pow(8.0, -p)) * std::pow(2.0, p);
    const double ratio = ea / eb * correction;
    MESSAGE(to_string(scheme) << " error ratio " << ratio << " (raw " << ea / eb << ", errors " << ea << ", " << eb << ")");
    CHECK(ratio == doctest::Approx(expected).epsilon(tol / expected));
  }
}

TEST_CASE("zero datum stays zero") {
  Grid g(3, 10.0, 16);
  IntegratorConfig c;
  c.dt = 0.05;
  c.t_end = 1.0;
  c.snapshot_stride = 5;
  auto traj = integrate(PhaseState::zero(g), make_power_potential(2.5, g, PotentialMode::theorem), c);
  CHECK(traj.snapshots.size() == 5);
  for (const auto& s : traj.snapshots) {
    CHECK(lebesgue_norm(s.u, 2.0) == 0.0);
    CHECK(lebesgue_norm(s.udot, 2.0) == 0.0);
  }
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i)
    CHECK(traj.snapshots[i].time - traj.snapshots[i - 1].time == doctest::Approx(0.25));
}

TEST_CASE("energy drift on a small run scales with dt^2") {
  Grid g(3, 16.0, 32);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto s = datum(g, 0.2);
  IntegratorConfig c;
  c.t_end = 5.0;
  c.snapshot_stride = 100;
  c.energy_stride = 5;
  c.dt = 0.02;
  auto a = integrate(s, spec, c);
  c.dt = 0.01;
  auto b = integrate(s, spec, c);
  MESSAGE("drift " << a.max_relative_drift << " -> " << b.max_relative_drift);
  CHECK(b.max_relative_drift < 1e-5);
  CHECK(a.max_relative_drift / b.max_relative_drift == doctest::Approx(4.0).epsilon(0.25));
  CHECK_FALSE(a.blowup_suspected);
  CHECK(a.final_time == doctest::Approx(5.0));
}

TEST_CASE("terminal states differ at order dt^2") {
  Grid g(3, 12.0, 24);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto s = datum(g, 1.0);
  auto a = final_state(s, spec, Scheme::gautschi2, 0.04, 2.0);
  auto b = final_state(s, spec, Scheme::gautschi2, 0.02, 2.0);
  auto c = final_state(s, spec, Scheme::gautschi2, 0.01, 2.0);
  const double d1 = energy_space_distance(a, b), d2 = energy_space_distance(b, c);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("backward integration") {
  Grid g(3, 12.0, 24);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto s = datum(g, 1.0);
  IntegratorConfig c;
  c.dt = 0.05;
  c.t_end = 2.0;
  c.snapshot_stride = 10;

  SUBCASE("linear limit") {
    auto traj = backward_integrate(s, PotentialSpec::zero(3), c);
    auto ref = apply_free(s, -2.0);
    CHECK(traj.snapshots.front().time == doctest::Approx(-2.0));
    CHECK(traj.snapshots.back().time == doctest::Approx(0.0));
    CHECK(max_abs_difference(traj.snapshots.front().u, ref.u) < 1e-12);
    CHECK(max_abs_difference(traj.snapshots.front().udot, ref.udot) < 1e-12);
  }
  SUBCASE("round trip") {
    auto fwd = integrate(s, spec, c);
    auto back = backward_integrate(fwd.snapshots.back(), spec, c);
    const double one_way = energy_space_distance(fwd.snapshots.back(), final_state(s, spec, Scheme::gautschi2, 0.0125, 2.0));
    const double err = energy_space_distance(back.snapshots.front(), s);
    MESSAGE("round trip " << err << " one-way " << one_way);
    CHECK(err <= 2.0 * one_way);
  }
  SUBCASE("time reversal of real data") {
    Field u0 = testing::gaussian(g, 1.0, 2.0);
    Field u1 = testing::gaussian(g, 1.5, 1.0);
    Field mu1 = cplx(-1.0) * u1;
    auto fwd = integrate(PhaseState(u0, u1), spec, c);
    auto bwd = backward_integrate(PhaseState(u0, mu1), spec, c);
    // u_b(-t) = u_f(t), udot_b(-t) = -udot_f(t)
    const std::size_t n = fwd.snapshots.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& f = fwd.snapshots[i];
      const auto& b = bwd.snapshots[n - 1 - i];
      CHECK(b.time == doctest::Approx(-f.time));
      CHECK(max_abs_difference(b.u, f.u) < 1e-12);
      CHECK(max_abs_difference(cplx(-1.0) * b.udot, f.udot) < 1e-12);
    }
  }
}

TEST_CASE("gauge covariance") {
  Grid g(3, 12.0, 24);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto s = datum(g, 1.5);
  const cplx phase = std::polar(1.0, 1.1);
  IntegratorConfig c;
  c.dt = 0.05;
  c.t_end = 1.0;
  c.snapshot_stride = 20;
  auto a = integrate(s, spec, c);
  auto b = integrate(PhaseState(phase * s.u, phase * s.udot), spec, c);
  CHECK(max_abs_difference(b.snapshots.back().u, phase * a.snapshots.back().u) < 1e-10);
  CHECK(max_abs_difference(b.snapshots.back().udot, phase * a.snapshots.back().udot) < 1e-10);
}

TEST_CASE("linear limit matches the free flow at any dt") {
  Grid g(3, 12.0, 16);
  auto s = datum(g, 1.0);
  IntegratorConfig c;
  c.dt = 0.2;
  c.t_end = 4.0;
  c.snapshot_stride = 5;
  auto traj = integrate(s, PotentialSpec::zero(3), c);
  for (const auto& snap : traj.snapshots) {
    auto ref = apply_free(s, snap.time);
    CHECK(max_abs_difference(snap.u, ref.u) < 1e-12);
  }
}

TEST_CASE("configuration checks") {
  Grid g(3, 8.0, 32);
  IntegratorConfig c;
  c.dt = 0.5;  // dt * max lambda >> pi
  CHECK_THROWS_AS(c.validate(g), ConfigError);
  c.dt = 0.01;
  c.snapshot_stride = 0;
  CHECK_THROWS_AS(c.validate(g), ConfigError);
  CHECK_THROWS_AS(scheme_from_string("euler"), ConfigError);
  CHECK(scheme_from_string("duhamel_rk4") == Scheme::duhamel_rk4);
}

TEST_CASE("non-finite values raise an integration failure") {
  Grid g(3, 8.0, 16);
  IntegratorConfig c;
  c.dt = 0.1;
  c.t_end = 2.0;
  IntegrateOptions opt;
  opt.forcing = [](double t, std::span<cplx> out) {
    const double v = t > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    for (auto& z : out) z = v;
  };
  try {
    integrate(datum(g, 0.1), PotentialSpec::zero(3), c, opt);
    FAIL("no failure raised");
  } catch (const IntegrationFailure& e) {
    CHECK(e.last_valid_time() == doctest::Approx(1.0));
  }
}

TEST_CASE("blow-up detection stops early") {
  Grid g(3, 8.0, 16);
  Field bump = testing::gaussian(g, 1.0);
  IntegratorConfig c;
  c.dt = 0.05;
  c.t_end = 10.0;
  c.snapshot_stride = 1000;
  c.blowup_factor = 10.0;
  IntegrateOptions opt;
  // resonant pumping of the near-zero modes
  opt.forcing = [&](double t, std::span<cplx> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 20.0 * std::cos(t) * bump[i];
  };
  auto traj = integrate(PhaseState(0.1 * bump, Field(g)), PotentialSpec::zero(3), c, opt);
  drain_warnings();
  CHECK(traj.blowup_suspected);
  CHECK(traj.final_time < 10.0);
}

TEST_CASE("adaptive stepping lands on snapshot times") {
  Grid g(3, 12.0, 16);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto s = datum(g, 1.0);
  IntegratorConfig c;
  c.dt = 0.05;
  c.t_end = 1.0;
  c.snapshot_stride = 4;
  c.adaptive = true;
  c.adaptive_tolerance = 1e-6;
  auto traj = integrate(s, spec, c);
  REQUIRE(traj.snapshots.size() == 6);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) CHECK(traj.snapshots[i].time == doctest::Approx(0.2 * i));
  auto ref = final_state(s, spec, Scheme::duhamel_rk4, 0.01, 1.0);
  const double err = energy_space_distance(traj.snapshots.back(), ref);
  MESSAGE("adaptive error " << err << " in " << traj.steps_taken << " steps");
  CHECK(err < 1e-5);
}
