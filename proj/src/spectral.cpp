#include "kgh/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "kgh/error.hpp"

namespace kgh {

namespace {

FftPlanner g_planner = FftPlanner::estimate;

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// One forward/backward plan per grid shape, created on first use against
// scratch storage and executed later on arbitrary (aligned) buffers.
PlanPair& plans_for(const Grid& grid) {
  static std::map<std::tuple<int, int>, PlanPair> cache;
  auto key = std::make_tuple(grid.dim(), grid.points());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  int dims[3] = {grid.points(), grid.points(), grid.points()};
  auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * grid.size()));
  PlanPair p;
  const unsigned flags = g_planner == FftPlanner::measure && grid.size() >= (1u << 15) ? FFTW_MEASURE : FFTW_ESTIMATE;
  p.forward = fftw_plan_dft(grid.dim(), dims, scratch, scratch, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft(grid.dim(), dims, scratch, scratch, FFTW_BACKWARD, flags);
  fftw_free(scratch);
  if (!p.forward || !p.backward) throw NumericalError("FFTW planning failed");
  return cache.emplace(key, p).first->second;
}

void execute(fftw_plan plan, std::span<cplx> data, const Grid& grid) {
  if (data.size() != grid.size()) throw ContractViolation("buffer size does not match grid");
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.size()));
  for (auto& v : data) v *= scale;
}

// exp(-1/t) for t > 0: the building block of the mollifier family.
double flat_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = flat_exp(t);
  const double b = flat_exp(1.0 - t);
  return a / (a + b);
}

}  // namespace

void set_fft_planner(FftPlanner planner) { g_planner = planner; }
FftPlanner fft_planner() { return g_planner; }

void fft_forward(std::span<cplx> data, const Grid& grid) { execute(plans_for(grid).forward, data, grid); }
void fft_inverse(std::span<cplx> data, const Grid& grid) { execute(plans_for(grid).backward, data, grid); }

Field transform(Field f, Direction direction) {
  if (direction == Direction::forward) {
    if (!f.is_physical()) throw ContractViolation("forward transform requires a physical-space field");
    fft_forward(f.values(), f.grid());
    f.set_representation(Representation::spectral);
  } else {
    if (!f.is_spectral()) throw ContractViolation("inverse transform requires a spectral-space field");
    fft_inverse(f.values(), f.grid());
    f.set_representation(Representation::physical);
  }
  return f;
}

Field to_spectral(Field f) { return f.is_spectral() ? f : transform(std::move(f), Direction::forward); }
Field to_physical(Field f) { return f.is_physical() ? f : transform(std::move(f), Direction::inverse); }

Field apply_radial_multiplier(Field f, const std::function<double(double)>& symbol) {
  const bool was_physical = f.is_physical();
  Field s = to_spectral(std::move(f));
  const auto& k2 = wavenumber_squared(s.grid());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= symbol(k2[i]);
  return was_physical ? to_physical(std::move(s)) : s;
}

Field apply_omega_power(Field f, double s) {
  if (s == 0.0) return f;
  return apply_radial_multiplier(std::move(f), [s](double k2) { return std::pow(1.0 + k2, 0.5 * s); });
}

Field partial_derivative(Field f, int axis) {
  const Grid& grid = f.grid();
  if (axis < 0 || axis >= grid.dim()) throw ContractViolation("derivative axis out of range");
  const bool was_physical = f.is_physical();
  Field s = to_spectral(std::move(f));
  const int M = grid.points();
  for (std::size_t p = 0; p < s.size(); ++p) {
    const int i = grid.unflatten(p)[axis];
    const double k = (i == M / 2) ? 0.0 : grid.wavenumber(i);
    s[p] *= cplx{0.0, k};
  }
  return was_physical ? to_physical(std::move(s)) : s;
}

double DyadicProfile::psi0_hat(double xi_abs) { return smooth_step(2.0 - xi_abs); }

double DyadicProfile::psi_hat(double xi_abs) { return psi0_hat(xi_abs) - psi0_hat(2.0 * xi_abs); }

double DyadicProfile::delta_j(double xi_abs, int j) {
  const double scale = std::ldexp(1.0, j);
  return psi0_hat(xi_abs / scale) - psi0_hat(2.0 * xi_abs / scale);
}

int DyadicProfile::resolved_bands(const Grid& grid) {
  // psi0_hat(xi / 2^J) == 1 needs |xi| <= 2^J for every lattice point.
  const double kmax = grid.max_wavenumber();
  int J = 1;
  while (std::ldexp(1.0, J) < kmax) ++J;
  return J;
}

double projector_symbol(const Projector& kind, double xi_abs) {
  struct Visitor {
    double xi;
    double operator()(const projector::DeltaJ& d) const { return DyadicProfile::delta_j(xi, d.j); }
    double operator()(const projector::P0&) const { return DyadicProfile::psi0_hat(xi); }
    double operator()(const projector::LowPass& p) const { return DyadicProfile::psi0_hat(xi / p.cutoff); }
    double operator()(const projector::HighPass& p) const { return 1.0 - DyadicProfile::psi0_hat(xi / p.cutoff); }
  };
  return std::visit(Visitor{xi_abs}, kind);
}

Field project(Field f, const Projector& kind) {
  if (auto* d = std::get_if<projector::DeltaJ>(&kind); d && d->j < 1)
    throw ContractViolation("delta_j requires j >= 1");
  if (auto* p = std::get_if<projector::LowPass>(&kind); p && !(p->cutoff > 0.0))
    throw ContractViolation("low_pass requires N > 0");
  if (auto* p = std::get_if<projector::HighPass>(&kind); p && !(p->cutoff > 0.0))
    throw ContractViolation("high_pass requires N > 0");
  return apply_radial_multiplier(std::move(f), [&](double k2) { return projector_symbol(kind, std::sqrt(k2)); });
}

}  // namespace kgh
