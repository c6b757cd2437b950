#pragma once

#include <cmath>
#include <random>

#include "kgh/field.hpp"
#include "kgh/grid.hpp"
#include "kgh/propagator.hpp"
#include "kgh/spectral.hpp"

namespace testing {

inline kgh::Field random_field(const kgh::Grid& g, unsigned seed, bool real = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  kgh::Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = real ? kgh::cplx(nd(rng), 0.0) : kgh::cplx(nd(rng), nd(rng));
  return f;
}

// Random spectrum restricted to |k| <= kmax.
inline kgh::Field band_limited(const kgh::Grid& g, double kmax, unsigned seed) {
  kgh::Field f = kgh::to_spectral(random_field(g, seed));
  const auto& k2 = kgh::wavenumber_squared(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (k2[i] > kmax * kmax) f[i] = 0.0;
  return kgh::to_physical(f);
}

template <class Fn>
kgh::Field sample(const kgh::Grid& g, Fn fn) {
  kgh::Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    double x[3] = {0, 0, 0};
    for (int a = 0; a < g.dim(); ++a) x[a] = g.coordinate(idx[a]);
    f[i] = fn(x[0], x[1], x[2]);
  }
  return f;
}

inline kgh::Field gaussian(const kgh::Grid& g, double width, double amp = 1.0) {
  return sample(g, [&](double x, double y, double z) {
    return kgh::cplx(amp * std::exp(-(x * x + y * y + z * z) / (width * width)), 0.0);
  });
}

inline double rel_l2_diff(const kgh::Field& a, const kgh::Field& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace testing
