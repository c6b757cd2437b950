#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "kgh/error.hpp"
#include "kgh/log.hpp"
#include "kgh/potential.hpp"

using namespace kgh;
using std::numbers::pi;

namespace {

// Storage index of -k for index i.
std::size_t mirror(const Grid& g, std::size_t i) {
  const auto idx = g.unflatten(i);
  std::size_t out = 0;
  for (int a = 0; a < g.dim(); ++a) out = out * g.points() + (g.points() - idx[a]) % g.points();
  return out;
}

}  // namespace

TEST_CASE("power potential ranges") {
  Grid g(3, 10.0, 8);
  const auto s = make_power_potential(2.5, g, PotentialMode::theorem);
  CHECK(s.p2 < 1.2);
  CHECK(s.p1 > 1.2);
  CHECK(s.p2 >= 1.0);
  CHECK(s.p2 <= s.p1);

  try {
    make_power_potential(3.5, g, PotentialMode::theorem);
    FAIL("gamma = 3.5 accepted");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("upper bound") != std::string::npos);
  }
  try {
    make_power_potential(2.0, g, PotentialMode::theorem);
    FAIL("gamma = 2 accepted");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("lower bound") != std::string::npos);
  }
  CHECK_NOTHROW(make_power_potential(3.5, g, PotentialMode::exploratory));
  // the Riesz symbol itself does not exist for gamma >= n
  CHECK_THROWS_AS(hartree_symbol(make_power_potential(3.5, g, PotentialMode::exploratory), g), RangeError);
}

TEST_CASE("low dimensions warn") {
  drain_warnings();
  Grid g(1, 10.0, 8);
  make_power_potential(0.5, g, PotentialMode::exploratory);
  const auto w = drain_warnings();
  REQUIRE(w.size() == 1);
  CHECK(w[0].find("theory-out-of-range") != std::string::npos);
}

TEST_CASE("Riesz constant closed forms") {
  // FT |x|^{-2} = 2 pi^2 / |k| and FT |x|^{-1} = 4 pi / |k|^2 in three dimensions
  CHECK(riesz_constant(3, 2.0) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
  CHECK(riesz_constant(3, 1.0) == doctest::Approx(4.0 * pi).epsilon(1e-14));
  // FT |x|^{-1} = 2 pi / |k| in two dimensions
  CHECK(riesz_constant(2, 1.0) == doctest::Approx(2.0 * pi).epsilon(1e-14));
}

TEST_CASE("symbol is even and respects the k = 0 policy") {
  Grid g(3, 9.0, 16);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  const auto sym = hartree_symbol(spec, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(sym.multiplier[i] == sym.multiplier[mirror(g, i)]);
  CHECK(sym.multiplier[0] == 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(sym.multiplier[i] > 0.0);

  // mean of V * rho vanishes
  HartreeOperator op(spec, g);
  Field u = testing::random_field(g, 2);
  std::vector<double> pot(g.size());
  op.potential(u.values(), pot);
  double mean = 0.0, scale = 0.0;
  for (double p : pot) {
    mean += p;
    scale += std::abs(p);
  }
  CHECK(std::abs(mean) < 1e-12 * scale);

  spec.k0_policy = K0Policy::screened;
  spec.screening_mass = 0.5;
  CHECK(hartree_symbol(spec, g).multiplier[0] == doctest::Approx(std::pow(0.5, -0.5)));
}

TEST_CASE("plane wave sees only the k = 0 multiplier") {
  Grid g(3, 2.0 * pi, 16);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  const cplx A(0.7, -0.2);
  Field u = testing::sample(g, [&](double x, double y, double) { return A * std::exp(cplx(0.0, 2 * x - y)); });
  Field f = hartree_apply(u, spec);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i]) < 1e-12);

  spec.k0_policy = K0Policy::screened;
  spec.screening_mass = 2.0;
  f = hartree_apply(u, spec);
  const double v0 = std::pow(2.0, -0.5);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - v0 * std::norm(A) * u[i]) < 1e-12);
}

TEST_CASE("symmetries of f") {
  Grid g(3, 8.0, 16);
  const auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  CHECK(max_abs_difference(hartree_apply(Field(g), spec), Field(g)) == 0.0);

  Field u = testing::random_field(g, 9);
  const cplx phase = std::polar(1.0, 0.83);
  Field a = hartree_apply(phase * u, spec);
  Field b = phase * hartree_apply(u, spec);
  CHECK(max_abs_difference(a, b) < 1e-12);

  // real and even datum
  Field e = testing::sample(g, [](double x, double y, double z) {
    return cplx(std::exp(-x * x - 0.5 * y * y) * (1.0 + 0.3 * z * z), 0.0);
  });
  Field fe = hartree_apply(e, spec);
  double scale = 0.0;
  for (std::size_t i = 0; i < fe.size(); ++i) scale = std::max(scale, std::abs(fe[i]));
  for (std::size_t i = 0; i < fe.size(); ++i) {
    CHECK(std::abs(fe[i].imag()) < 1e-12 * scale);
    // the point -x on the lattice is the mirror index (x = 0 at M/2)
    CHECK(std::abs(fe[i] - fe[mirror(g, i)]) < 1e-12 * scale);
  }
}

TEST_CASE("quadratic form is nonnegative") {
  Grid g(3, 8.0, 16);
  const auto spec = make_power_potential(2.7, g, PotentialMode::theorem);
  HartreeOperator op(spec, g);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Field u = testing::random_field(g, seed);
    CHECK(op.interaction_energy(u.values()) >= 0.0);
  }
}

TEST_CASE("homogeneity under box doubling") {
  Grid g1(3, 8.0, 16), g2(3, 16.0, 16);
  const double gamma = 2.5;
  const auto s1 = make_power_potential(gamma, g1, PotentialMode::theorem);
  const auto s2 = make_power_potential(gamma, g2, PotentialMode::theorem);
  // u2(x) = u1(x/2): same lattice samples
  Field u1 = testing::random_field(g1, 4);
  Field u2(g2, Representation::physical, ComplexBuffer(u1.values().begin(), u1.values().end()));
  Field f1 = hartree_apply(u1, s1);
  Field f2 = hartree_apply(u2, s2);
  const double factor = std::pow(2.0, 3.0 - gamma);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    worst = std::max(worst, std::abs(f2[i] - factor * f1[i]));
    scale = std::max(scale, std::abs(f1[i]));
  }
  CHECK(worst < 1e-6 * scale);
}

TEST_CASE("imaginary residue is detected") {
  Grid g(2, 6.0, 16);
  HartreeSymbol sym{g, std::vector<double>(g.size(), 0.0), 0.0};
  // an odd multiplier turns a real density into an imaginary potential
  for (std::size_t i = 0; i < g.size(); ++i) sym.multiplier[i] = g.wavenumber(static_cast<int>(i % 16));
  HartreeOperator op(sym);
  Field u = testing::random_field(g, 1);
  std::vector<double> out(g.size());
  CHECK_THROWS_AS(op.potential(u.values(), out), NumericalError);
}

TEST_CASE("interaction energy against a brute-force double sum") {
  Grid g(3, 6.0, 8);
  const auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  const auto sym = hartree_symbol(spec, g);
  HartreeOperator op(spec, g);
  Field u = testing::random_field(g, 17);
  const int M = g.points();
  const double L = g.extent();
  const double h3 = g.cell_volume();

  // periodic kernel G(d) = L^{-3} sum_k Vhat(k) e^{i k.d}, d on the lattice of differences
  std::vector<double> G(M * M * M, 0.0);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int c = 0; c < M; ++c) {
        const double d[3] = {a * g.spacing(), b * g.spacing(), c * g.spacing()};
        cplx s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          const auto k = g.unflatten(i);
          const double phase = g.wavenumber(k[0]) * d[0] + g.wavenumber(k[1]) * d[1] + g.wavenumber(k[2]) * d[2];
          s += sym.multiplier[i] * std::exp(cplx(0.0, phase));
        }
        G[(a * M + b) * M + c] = s.real() / (L * L * L);
      }

  long double direct = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const auto ix = g.unflatten(x);
    for (std::size_t y = 0; y < g.size(); ++y) {
      const auto iy = g.unflatten(y);
      const int a = (ix[0] - iy[0] + M) % M, b = (ix[1] - iy[1] + M) % M, c = (ix[2] - iy[2] + M) % M;
      direct += std::norm(u[x]) * G[(a * M + b) * M + c] * std::norm(u[y]);
    }
  }
  direct *= 0.25 * h3 * h3;
  const double spectral = op.interaction_energy(u.values());
  CHECK(std::abs(spectral - static_cast<double>(direct)) < 1e-10 * std::abs(static_cast<double>(direct)));
}

TEST_CASE("truncated-kernel convolution against real-space quadrature") {
  // rho = exp(-|y|^2); the truncated kernel |x|^{-gamma} chi(|x| <= D) gives a
  // free-space convolution on the box as long as the images stay out of reach.
  const double gamma = 2.5, D = 6.5;
  Grid g(3, 13.0, 32);
  auto spec = make_power_potential(gamma, g, PotentialMode::theorem);
  spec.truncation_radius = D;
  HartreeOperator op(spec, g);
  Field u = testing::gaussian(g, std::sqrt(2.0));  // |u|^2 = exp(-|x|^2)
  std::vector<double> pot(g.size());
  op.potential(u.values(), pot);

  boost::math::quadrature::tanh_sinh<double> ts;
  // sphere average of exp(-|x0 + r w|^2) about a point at distance d
  auto shell = [](double d, double r) {
    if (d == 0.0) return 4.0 * pi * std::exp(-r * r);
    return 2.0 * pi * (std::exp(-(d - r) * (d - r)) - std::exp(-(d + r) * (d + r))) / (2.0 * d * r);
  };
  auto exact = [&](double d) {
    return ts.integrate([&](double r) { return std::pow(r, 2.0 - gamma) * shell(d, r); }, 0.0, D);
  };

  const int c = g.points() / 2;
  const std::size_t center = (static_cast<std::size_t>(c) * 32 + c) * 32 + c;
  const double v0 = exact(0.0);
  CHECK(std::abs(pot[center] - v0) < 1e-4 * v0);

  // one point off-center along the first axis
  const int off = c + 3;
  const double d = g.coordinate(off);
  const std::size_t idx = (static_cast<std::size_t>(off) * 32 + c) * 32 + c;
  const double vd = exact(d);
  CHECK(std::abs(pot[idx] - vd) < 1e-4 * vd);
}

TEST_CASE("H2 sampling") {
  Grid g(3, 10.0, 8);
  auto spec = make_power_potential(2.5, g, PotentialMode::theorem);
  spec.a = 0.5;
  spec.A_alpha = spec.gamma * std::pow(spec.a, -spec.gamma - spec.alpha);
  auto rep = validate_h2(spec, 10000);
  CHECK(rep.pass);
  CHECK(rep.A_alpha_measured >= spec.A_alpha * (1 - 1e-9));

  auto flat = PotentialSpec::radial_table(3, {{0.0, 1.0}, {2.0, 1.0}}, PotentialMode::exploratory);
  flat.A_alpha = 0.1;
  rep = validate_h2(flat, 1000);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness_r1 < rep.witness_r2);

  // v(r) = -r is decreasing; the sampled infimum of 2 / (r1 + r2) on (0, 1] is 1
  auto line = PotentialSpec::radial_table(3, {{0.0, 0.0}, {2.0, -2.0}}, PotentialMode::exploratory);
  line.a = 1.0;
  line.A_alpha = 0.5;
  rep = validate_h2(line, 10000);
  CHECK(rep.monotone);
  CHECK(rep.pass);
  CHECK(rep.A_alpha_measured == doctest::Approx(1.0).epsilon(0.02));
  line.A_alpha = 2.0;
  CHECK_FALSE(validate_h2(line, 10000).pass);

  // an increasing profile trips the monotone premise
  auto up = PotentialSpec::radial_table(3, {{0.0, -2.0}, {2.0, 0.0}}, PotentialMode::exploratory);
  up.A_alpha = 0.1;
  rep = validate_h2(up, 1000);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.monotone);

  CHECK_THROWS_AS(PotentialSpec::radial_table(3, {{0.0, -2.0}, {2.0, 0.0}}, PotentialMode::theorem), RangeError);
}
