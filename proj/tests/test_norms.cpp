#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "kgh/error.hpp"
#include "kgh/evolve.hpp"
#include "kgh/norms.hpp"

using namespace kgh;

namespace {
const double inf = std::numeric_limits<double>::infinity();

Trajectory constant_trajectory(const PhaseState& s, const std::vector<double>& times) {
  Trajectory t;
  for (double time : times) t.snapshots.emplace_back(s.u, s.udot, time);
  return t;
}
}  // namespace

TEST_CASE("delta exponent") {
  CHECK(delta_exponent(3, 2.0) == 0.0);
  CHECK(delta_exponent(3, 4.0) == doctest::Approx(0.75));
  CHECK(delta_exponent(3, inf) == 1.5);
  CHECK(sobolev_critical_exponent(3) == 6.0);
  CHECK(std::isinf(sobolev_critical_exponent(2)));
}

TEST_CASE("Lebesgue norm of a half-box indicator") {
  Grid g(3, 6.0, 16);
  Field f = testing::sample(g, [](double x, double, double) { return cplx(x < 0.0 ? 1.0 : 0.0, 0.0); });
  CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(std::sqrt(g.volume() / 2.0)).epsilon(1e-12));
  CHECK(lebesgue_norm(f, inf) == 1.0);
  CHECK(lebesgue_norm(f, 1.0) == doctest::Approx(g.volume() / 2.0));
  CHECK_THROWS_AS(lebesgue_norm(f, 0.5), ContractViolation);
}

TEST_CASE("Holder interpolation holds on random fields") {
  Grid g(3, 5.0, 16);
  for (unsigned seed = 1; seed <= 4; ++seed) {
    Field f = testing::random_field(g, seed);
    for (double r : {3.0, 4.0, 7.5}) {
      const double beta = 1.0 - 2.0 / r;
      const double rhs = std::pow(lebesgue_norm(f, 2.0), 1.0 - beta) * std::pow(lebesgue_norm(f, inf), beta);
      CHECK(lebesgue_norm(f, r) <= rhs * (1 + 1e-12));
    }
  }
}

TEST_CASE("Sobolev norm") {
  Grid g(2, 7.0, 32);
  Field f = testing::random_field(g, 3);
  CHECK(std::abs(sobolev_norm(f, 0.0) - lebesgue_norm(f, 2.0)) < 1e-12 * lebesgue_norm(f, 2.0));
  // H^1 through the spectrum by hand
  Field s = to_spectral(f);
  const auto& k2 = wavenumber_squared(g);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += (1.0 + k2[i]) * std::norm(s[i]);
  CHECK(sobolev_norm(f, 1.0) == doctest::Approx(std::sqrt(sum * g.cell_volume())).epsilon(1e-12));
}

TEST_CASE("Besov B^s_{2,2} is equivalent to H^s on band-limited data") {
  Grid g(3, 12.0, 32);
  for (unsigned seed = 1; seed <= 3; ++seed) {
    Field f = testing::band_limited(g, 6.0, seed);
    for (double s : {0.0, 0.5, 1.0}) {
      const double ratio = besov_norm(f, s, 2.0) / sobolev_norm(f, s);
      CHECK(ratio >= 0.5);
      CHECK(ratio <= 2.0);
    }
  }
}

TEST_CASE("single-band field") {
  // |k| = 4 is reached only by Delta_2, where its symbol equals one
  Grid g(3, 2.0 * std::numbers::pi, 16);
  Field f = testing::sample(g, [](double x, double, double) { return std::exp(cplx(0.0, 4.0 * x)); });
  for (double r : {2.0, 4.0, inf})
    for (double s : {-0.5, 0.0, 1.0})
      CHECK(besov_norm(f, s, r) == doctest::Approx(std::pow(2.0, 2 * s) * lebesgue_norm(f, r)).epsilon(1e-12));
}

TEST_CASE("Besov norm is monotone in s on high bands") {
  Grid g(3, 12.0, 32);
  Field f = project(testing::random_field(g, 5), projector::HighPass{1.0});
  double prev = 0.0;
  for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double b = besov_norm(f, s, 4.0);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("vector Besov and Lebesgue norms use the pointwise magnitude") {
  Grid g(2, 8.0, 16);
  Field a = testing::random_field(g, 1);
  std::vector<Field> comps{a, Field(g)};
  CHECK(lebesgue_norm(std::span<const Field>(comps), 3.0) == doctest::Approx(lebesgue_norm(a, 3.0)));
  CHECK(besov_norm(std::span<const Field>(comps), 0.5, 3.0) == doctest::Approx(besov_norm(a, 0.5, 3.0)));
  std::vector<Field> twice{a, a};
  CHECK(lebesgue_norm(std::span<const Field>(twice), 2.0) == doctest::Approx(std::sqrt(2.0) * lebesgue_norm(a, 2.0)));
}

TEST_CASE("Birman-Solomjak norms") {
  Grid g(3, 8.0, 16);
  Field f = testing::random_field(g, 7);
  CHECK(birman_solomjak_norm(f, 3.0, 3.0, 2.0) == doctest::Approx(lebesgue_norm(f, 3.0)).epsilon(1e-12));

  // supported in one cube
  Field one = testing::sample(g, [](double x, double y, double z) {
    return cplx(x >= 0 && x < 2 && y >= 0 && y < 2 && z >= 0 && z < 2 ? 1.0 + x : 0.0, 0.0);
  });
  for (double m : {1.0, 2.0, 5.0, inf})
    CHECK(birman_solomjak_norm(one, m, 2.0, 2.0) == doctest::Approx(lebesgue_norm(one, 2.0)).epsilon(1e-12));

  for (auto [m, r] : {std::pair{2.0, 4.0}, std::pair{4.0, 2.0}, std::pair{3.0, 3.5}}) {
    const double a = birman_solomjak_norm(f, m, r, 1.0);
    const double b = birman_solomjak_norm(f, m, r, 2.0);
    const double c = std::pow(2.0, 3.0 * std::abs(1.0 / r - 1.0 / m));
    CHECK(a / b <= c * (1 + 1e-12));
    CHECK(b / a <= c * (1 + 1e-12));
  }
  CHECK_THROWS_AS(birman_solomjak_norm(f, 2.0, 2.0, 3.0), ContractViolation);
  CHECK_THROWS_AS(birman_solomjak_norm(f, 2.0, 2.0, 0.25), ContractViolation);
}

TEST_CASE("admissible triples") {
  const int n = 3;
  const double p = 2.0 * (n + 2) / n;
  auto a = check_admissible(n, {1.0, p, p, -0.5}, 0.0);
  CHECK(a.valid);
  CHECK(a.mu == doctest::Approx(0.0));
  auto b = check_admissible(n, {1.0, p, p, 0.5}, 1.0);
  CHECK(b.valid);
  auto c = check_admissible(n, {0.0, 4.0, 4.0, -0.5});
  CHECK(c.valid);
  // declaring mu = 1/2 here contradicts the admissibility equation (it gives 0)
  CHECK_FALSE(check_admissible(n, {1.0, p, p, -0.5}, 0.5).valid);

  auto ex = check_admissible(3, {0.0, 2.0, inf, 1.0});
  CHECK(ex.excluded_endpoint);
  CHECK_FALSE(ex.valid);
  CHECK(ex.reason.find("excluded") != std::string::npos);

  auto bad = check_admissible(3, {1.0, 2.0, 2.5, 0.0});
  CHECK_FALSE(bad.inequality_holds);
  CHECK_FALSE(bad.valid);
  CHECK_FALSE(check_admissible(3, {1.5, 4.0, 4.0, 0.0}).valid);

  for (int d = 1; d <= 3; ++d)
    for (const auto& t : x1_exponent_set(d)) CHECK(check_admissible(d, t, 0.0).valid);
}

TEST_CASE("time norms") {
  std::vector<double> t{0.0, 1.0, 2.0}, v{1.0, 3.0, 2.0};
  CHECK(time_lebesgue_norm(t, v, inf) == 3.0);
  CHECK(time_lebesgue_norm(t, v, 1.0) == doctest::Approx(4.5));
  CHECK(time_lebesgue_norm(t, std::vector<double>{2.0, 2.0, 2.0}, 4.0) == doctest::Approx(2.0 * std::pow(2.0, 0.25)));
}

TEST_CASE("Strichartz norm on trajectories") {
  Grid g(3, 10.0, 16);
  PhaseState s(testing::gaussian(g, 1.5), testing::gaussian(g, 1.0, 0.3));
  auto traj = constant_trajectory(s, {0.0, 0.5, 1.0, 1.5, 2.0});
  AdmissibleTriple tr{1.0, 10.0 / 3.0, 10.0 / 3.0, -0.5};
  const double b = besov_norm(s.u, -0.5, 10.0 / 3.0);
  CHECK(strichartz_norm(traj, tr, {0.0, 2.0}) == doctest::Approx(std::pow(2.0, 0.3) * b).epsilon(1e-12));
  tr.q = inf;
  CHECK(strichartz_norm(traj, tr, {0.5, 1.5}) == doctest::Approx(b));
  CHECK_THROWS_AS(strichartz_norm(traj, tr, {-1.0, 1.0}), ContractViolation);
  CHECK_THROWS_AS(strichartz_norm(traj, tr, {1.0, 3.0}), ContractViolation);

  auto zero = constant_trajectory(PhaseState::zero(g), {0.0, 1.0, 2.0});
  CHECK(x1_norm(zero, {0.0, 2.0}) == 0.0);
}

TEST_CASE("X1 norm of a free flow is grid stable") {
  double values[2];
  int k = 0;
  for (int M : {24, 32}) {
    Grid g(3, 16.0, M);
    PhaseState s(testing::gaussian(g, 1.5, 0.2), Field(g));
    Trajectory traj;
    for (double t = 1.0; t <= 4.0 + 1e-9; t += 0.25) traj.snapshots.push_back(apply_free(s, t));
    values[k++] = x1_norm(traj, {1.0, 4.0});
  }
  CHECK(std::isfinite(values[0]));
  CHECK(values[1] == doctest::Approx(values[0]).epsilon(1e-3));
}

TEST_CASE("energy breakdown") {
  Grid g(3, 10.0, 16);
  auto e0 = energy(PhaseState::zero(g), PotentialSpec::zero(3));
  CHECK(e0.total == 0.0);

  PhaseState s(testing::band_limited(g, 3.0, 1), testing::band_limited(g, 3.0, 2));
  auto e = energy(s, PotentialSpec::zero(3));
  CHECK(e.interaction == 0.0);
  CHECK(e.total == doctest::Approx(free_energy(s)).epsilon(1e-12));
  CHECK(e.kinetic == doctest::Approx(0.5 * std::pow(lebesgue_norm(s.udot, 2.0), 2)).epsilon(1e-12));
  CHECK(e.mass == doctest::Approx(0.5 * std::pow(lebesgue_norm(s.u, 2.0), 2)).epsilon(1e-12));

  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  auto en = energy(s, spec);
  CHECK(en.interaction > 0.0);
  CHECK(en.total == en.kinetic + en.gradient + en.mass + en.interaction);
}
