#include "kgh/grid.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <tuple>

#include "kgh/error.hpp"

namespace kgh {

Grid::Grid(int dim, double extent, int points) : dim_(dim), extent_(extent), points_(points) {
  if (dim < 1 || dim > 3) throw RangeError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  if (!(extent > 0.0) || !std::isfinite(extent)) throw RangeError("grid extent must be positive and finite");
  if (points < 8 || points % 2 != 0)
    throw RangeError("grid points per axis must be even and >= 8, got " + std::to_string(points));
  size_ = 1;
  for (int d = 0; d < dim; ++d) size_ *= static_cast<std::size_t>(points);
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }
double Grid::volume() const { return std::pow(extent_, dim_); }
double Grid::dk() const { return 2.0 * std::numbers::pi / extent_; }

double Grid::wavenumber(int i) const {
  const int m = i < points_ / 2 ? i : i - points_;
  return dk() * m;
}

double Grid::nyquist() const { return dk() * (points_ / 2); }

double Grid::max_wavenumber() const { return nyquist() * std::sqrt(static_cast<double>(dim_)); }

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

bool Grid::operator==(const Grid& other) const {
  return dim_ == other.dim_ && points_ == other.points_ && extent_ == other.extent_;
}

namespace {

using Key = std::tuple<int, double, int>;

template <class Fill>
const std::vector<double>& cached(std::map<Key, std::unique_ptr<std::vector<double>>>& cache, const Grid& grid,
                                  Fill fill) {
  Key key{grid.dim(), grid.extent(), grid.points()};
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto table = std::make_unique<std::vector<double>>(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) (*table)[p] = fill(grid.unflatten(p));
  return *cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

const std::vector<double>& wavenumber_squared(const Grid& grid) {
  static std::map<Key, std::unique_ptr<std::vector<double>>> cache;
  return cached(cache, grid, [&](const std::array<int, 3>& idx) {
    double k2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double k = grid.wavenumber(idx[d]);
      k2 += k * k;
    }
    return k2;
  });
}

const std::vector<double>& radius_squared(const Grid& grid) {
  static std::map<Key, std::unique_ptr<std::vector<double>>> cache;
  return cached(cache, grid, [&](const std::array<int, 3>& idx) {
    double r2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double x = grid.coordinate(idx[d]);
      r2 += x * x;
    }
    return r2;
  });
}

}  // namespace kgh
