#include "kgh/potential.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "kgh/error.hpp"
#include "kgh/log.hpp"
#include "kgh/spectral.hpp"

namespace kgh {

PotentialSpec PotentialSpec::zero(int dim) {
  PotentialSpec s;
  s.kind = PotentialKind::none;
  s.dim = dim;
  return s;
}

PotentialSpec PotentialSpec::radial_table(int dim, std::vector<std::pair<double, double>> samples,
                                          PotentialMode mode) {
  if (samples.size() < 2) throw RangeError("radial table needs at least two samples");
  if (!std::is_sorted(samples.begin(), samples.end(), [](auto& x, auto& y) { return x.first < y.first; }))
    throw RangeError("radial table radii must be increasing");
  if (samples.front().first < 0.0) throw RangeError("radial table radii must be nonnegative");
  if (mode == PotentialMode::theorem) {
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (samples[i].second > samples[i - 1].second)
        throw RangeError("theorem mode requires a nonincreasing radial profile (H2)");
    if (samples.back().second < 0.0) throw RangeError("theorem mode requires a positive potential (H2)");
  }
  PotentialSpec s;
  s.kind = PotentialKind::radial_table;
  s.mode = mode;
  s.dim = dim;
  s.table = std::move(samples);
  s.a = s.table.back().first;
  s.p1 = std::numeric_limits<double>::infinity();
  s.p2 = 1.0;
  return s;
}

double PotentialSpec::radial_value(double r) const {
  switch (kind) {
    case PotentialKind::none:
      return 0.0;
    case PotentialKind::power_law:
      return std::pow(r, -gamma);
    case PotentialKind::radial_table: {
      if (r <= table.front().first) return table.front().second;
      if (r >= table.back().first) return table.back().second;
      auto it = std::upper_bound(table.begin(), table.end(), r, [](double x, auto& p) { return x < p.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (r - lo.first) / (hi.first - lo.first);
      return (1.0 - w) * lo.second + w * hi.second;
    }
  }
  return 0.0;
}

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::none:
      return "none";
    case PotentialKind::power_law:
      return "power_law";
    case PotentialKind::radial_table:
      return "radial_table";
  }
  return "?";
}

std::string to_string(PotentialMode mode) { return mode == PotentialMode::theorem ? "theorem" : "exploratory"; }
std::string to_string(K0Policy policy) { return policy == K0Policy::zero ? "zero" : "screened"; }

PotentialSpec make_power_potential(double gamma, const Grid& grid, PotentialMode mode) {
  const int n = grid.dim();
  if (!(gamma > 0.0)) throw RangeError("power-law exponent gamma must be positive");
  if (n < 3) warn("theory-out-of-range: dimension " + std::to_string(n) + " < 3");
  if (mode == PotentialMode::theorem) {
    const double upper = std::min(4.0, static_cast<double>(n));
    if (!(gamma > 2.0)) {
      std::ostringstream msg;
      msg << "theorem mode requires 2 < gamma < min(4, n) = " << upper << "; gamma = " << gamma
          << " violates the lower bound gamma > 2";
      throw RangeError(msg.str());
    }
    if (!(gamma < upper)) {
      std::ostringstream msg;
      msg << "theorem mode requires 2 < gamma < min(4, n) = " << upper << "; gamma = " << gamma
          << " violates the upper bound gamma < min(4, n)";
      throw RangeError(msg.str());
    }
  }

  PotentialSpec s;
  s.kind = PotentialKind::power_law;
  s.mode = mode;
  s.dim = n;
  s.gamma = gamma;

  // Unit-ball split: the near part lies in L^p for p < n/gamma, the tail for
  // p > n/gamma. Pick the midpoints of the admissible windows.
  const double pivot = n / gamma;
  const double p2_floor = std::max(1.0, n / 4.0);
  const double p1_ceiling = n / 2.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.p2 = pivot > p2_floor ? 0.5 * (p2_floor + pivot) : nan;
  s.p1 = p1_ceiling > pivot ? 0.5 * (pivot + p1_ceiling) : nan;

  s.alpha = 2.0;
  s.a = 1.0;
  // inf over 0 < r1 < r2 <= a of alpha (v(r1) - v(r2)) / (r2^alpha - r1^alpha).
  s.A_alpha = gamma * std::pow(s.a, -gamma - s.alpha);
  return s;
}

double riesz_constant(int n, double gamma) {
  const double half_n = 0.5 * n;
  return std::pow(std::numbers::pi, half_n) * std::pow(2.0, n - gamma) * std::tgamma(0.5 * (n - gamma)) /
         std::tgamma(0.5 * gamma);
}

namespace {

// Fourier transform of x -> v(|x|) chi(|x| <= radius) at |k|, by composite
// Gauss-Legendre in t with r = radius * t^q (q removes the r^{n-1-gamma}
// endpoint singularity of power laws).
double truncated_radial_transform(const PotentialSpec& spec, int n, double radius, double k) {
  double q = 1.0;
  if (spec.kind == PotentialKind::power_law) q = 1.0 / (n - spec.gamma);
  const int panels = std::max(64, static_cast<int>(std::ceil(k * radius / std::numbers::pi * 3.0)));

  auto kernel = [&](double r) {
    const double kr = k * r;
    switch (n) {
      case 1:
        return 2.0 * std::cos(kr);
      case 2:
        return 2.0 * std::numbers::pi * r * std::cyl_bessel_j(0.0, kr);
      default: {
        const double sinc = kr < 1e-8 ? 1.0 - kr * kr / 6.0 : std::sin(kr) / kr;
        return 4.0 * std::numbers::pi * r * r * sinc;
      }
    }
  };

  auto integrand = [&](double t) {
    if (t <= 0.0) t = 1e-300;
    const double r = radius * std::pow(t, q);
    const double drdt = radius * q * std::pow(t, q - 1.0);
    if (spec.kind == PotentialKind::power_law) {
      // v(r) * r^{n-1} * dr/dt combined analytically: radius^{n-gamma} q t^0.
      const double weight = std::pow(radius, n - spec.gamma) * q;
      const double r_pow = std::pow(r, n - 1.0);
      return weight * kernel(r) / r_pow;
    }
    return spec.radial_value(r) * kernel(r) * drdt;
  };

  using Rule = boost::math::quadrature::gauss<double, 16>;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double t0 = static_cast<double>(p) / panels;
    const double t1 = static_cast<double>(p + 1) / panels;
    total += Rule::integrate(integrand, t0, t1);
  }
  return total;
}

}  // namespace

HartreeSymbol hartree_symbol(const PotentialSpec& spec, const Grid& grid) {
  HartreeSymbol sym{grid, std::vector<double>(grid.size(), 0.0), 0.0};
  if (spec.kind == PotentialKind::none) return sym;
  const int n = grid.dim();
  if (spec.dim != n) throw ContractViolation("potential dimension does not match grid dimension");
  const auto& k2 = wavenumber_squared(grid);

  const bool truncated = spec.kind == PotentialKind::radial_table || spec.truncation_radius.has_value();
  if (!truncated) {
    if (!(spec.gamma < n))
      throw RangeError("Riesz symbol undefined for gamma >= n (gamma = " + std::to_string(spec.gamma) +
                       ", n = " + std::to_string(n) + ")");
    const double c = riesz_constant(n, spec.gamma);
    const double k0 = spec.k0_policy == K0Policy::zero ? 0.0 : std::pow(spec.screening_mass, spec.gamma - n);
    for (std::size_t i = 0; i < grid.size(); ++i)
      sym.multiplier[i] = k2[i] > 0.0 ? c * std::pow(k2[i], 0.5 * (spec.gamma - n)) : k0;
    sym.k0_value = k0;
    return sym;
  }

  if (spec.kind == PotentialKind::power_law && !(spec.gamma < n))
    throw RangeError("truncated power law needs gamma < n for a locally integrable kernel");
  const double radius = spec.truncation_radius ? *spec.truncation_radius : spec.table.back().first;
  if (!(radius > 0.0)) throw RangeError("truncation radius must be positive");
  // |k|^2 is dk^2 times an integer; evaluate each distinct shell once.
  const double dk2 = grid.dk() * grid.dk();
  std::map<long long, double> shells;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const long long m2 = std::llround(k2[i] / dk2);
    auto it = shells.find(m2);
    if (it == shells.end())
      it = shells.emplace(m2, truncated_radial_transform(spec, n, radius, std::sqrt(static_cast<double>(m2)) * grid.dk()))
               .first;
    sym.multiplier[i] = it->second;
  }
  sym.k0_value = shells[0];
  return sym;
}

HartreeOperator::HartreeOperator(const PotentialSpec& spec, const Grid& grid)
    : HartreeOperator(hartree_symbol(spec, grid)) {
  zero_ = spec.is_zero();
}

HartreeOperator::HartreeOperator(HartreeSymbol symbol) : symbol_(std::move(symbol)), work_(symbol_.grid.size()) {
  zero_ = std::all_of(symbol_.multiplier.begin(), symbol_.multiplier.end(), [](double v) { return v == 0.0; });
}

void HartreeOperator::density_spectrum(std::span<const cplx> u) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rho = std::norm(u[i]);
    work_[i] = rho;
    sum += rho;
  }
  last_mean_density_ = sum / static_cast<double>(u.size());
  fft_forward(work_, symbol_.grid);
}

void HartreeOperator::potential(std::span<const cplx> u, std::span<double> out) {
  if (zero_) {
    std::fill(out.begin(), out.end(), 0.0);
    double sum = 0.0;
    for (auto& v : u) sum += std::norm(v);
    last_mean_density_ = sum / static_cast<double>(u.size());
    return;
  }
  density_spectrum(u);
  for (std::size_t i = 0; i < work_.size(); ++i) work_[i] *= symbol_.multiplier[i];
  fft_inverse(work_, symbol_.grid);
  double imag_max = 0.0;
  double real_max = 0.0;
  for (std::size_t i = 0; i < work_.size(); ++i) {
    imag_max = std::max(imag_max, std::abs(work_[i].imag()));
    real_max = std::max(real_max, std::abs(work_[i].real()));
    out[i] = work_[i].real();
  }
  if (imag_max > 1e-8 * real_max && imag_max > 1e-300) {
    std::ostringstream msg;
    msg << "V*|u|^2 has imaginary residue " << imag_max << " against magnitude " << real_max;
    throw NumericalError(msg.str());
  }
}

void HartreeOperator::apply(std::span<const cplx> u, std::span<cplx> out) {
  if (zero_) {
    std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
    return;
  }
  std::vector<double> phi(u.size());
  potential(u, phi);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = phi[i] * u[i];
}

double HartreeOperator::interaction_energy(std::span<const cplx> u) {
  if (zero_) return 0.0;
  density_spectrum(u);
  double sum = 0.0;
  for (std::size_t i = 0; i < work_.size(); ++i) sum += symbol_.multiplier[i] * std::norm(work_[i]);
  return 0.25 * sum * symbol_.grid.cell_volume();
}

Field hartree_apply(const Field& u, const PotentialSpec& spec) {
  if (!u.is_physical()) throw ContractViolation("hartree_apply expects a physical-space field");
  HartreeOperator op(spec, u.grid());
  Field out(u.grid(), Representation::physical);
  op.apply(u.values(), out.values());
  return out;
}

H2Report validate_h2(const PotentialSpec& spec, int sample_count, std::uint64_t seed) {
  H2Report rep;
  if (!(spec.a > 0.0)) throw RangeError("(H2) range a must be positive");
  if (!(spec.alpha >= 2.0)) throw RangeError("(H2) exponent alpha must be >= 2");
  const double a = spec.a;
  auto v = [&](double r) { return spec.radial_value(r); };

  // Nonincreasing premise, checked on a fine uniform sample of (0, a].
  const int premise_samples = 4096;
  for (int i = 1; i < premise_samples; ++i) {
    const double r1 = a * i / premise_samples;
    const double r2 = a * (i + 1) / premise_samples;
    if (v(r2) > v(r1)) {
      rep.pass = false;
      rep.monotone = false;
      rep.witness_r1 = r1;
      rep.witness_r2 = r2;
      rep.A_alpha_measured = -std::numeric_limits<double>::infinity();
      rep.reason = "profile is not nonincreasing";
      return rep;
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, a);
  double inf_ratio = std::numeric_limits<double>::infinity();
  rep.pass = true;
  for (int s = 0; s < sample_count; ++s) {
    double r1 = dist(rng);
    double r2 = dist(rng);
    if (r1 > r2) std::swap(r1, r2);
    if (!(r1 > 0.0) || !(r2 > r1)) continue;
    const double gap = std::pow(r2, spec.alpha) - std::pow(r1, spec.alpha);
    const double ratio = spec.alpha * (v(r1) - v(r2)) / gap;
    if (ratio < inf_ratio) {
      inf_ratio = ratio;
      rep.witness_r1 = r1;
      rep.witness_r2 = r2;
    }
  }
  rep.A_alpha_measured = inf_ratio;
  const double required = spec.A_alpha > 0.0 ? spec.A_alpha * (1.0 - 1e-9) : 0.0;
  if (!(inf_ratio > 0.0) || inf_ratio < required) {
    rep.pass = false;
    rep.reason = "inequality violated at the witness pair";
  }
  return rep;
}

}  // namespace kgh
