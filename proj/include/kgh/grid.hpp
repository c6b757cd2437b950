#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace kgh {

// Periodic box [-L/2, L/2)^n sampled with M points per axis. Storage is
// row-major with the last axis fastest; spectral index i maps to the
// wavenumber (2*pi/L) * (i < M/2 ? i : i - M).
class Grid {
 public:
  Grid(int dim, double extent, int points);

  int dim() const { return dim_; }
  double extent() const { return extent_; }
  int points() const { return points_; }
  std::size_t size() const { return size_; }
  double spacing() const { return extent_ / points_; }
  double cell_volume() const;
  double volume() const;
  double dk() const;

  double coordinate(int i) const { return -0.5 * extent_ + i * spacing(); }
  double wavenumber(int i) const;
  // Largest |k| on any single axis (the Nyquist magnitude).
  double nyquist() const;
  // Largest |k| over the lattice (corner of the spectral cube).
  double max_wavenumber() const;

  // Per-axis index of flat position `flat` (unused axes are zero).
  std::array<int, 3> unflatten(std::size_t flat) const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int dim_;
  double extent_;
  int points_;
  std::size_t size_;
};

// Per-point |k|^2 in storage order; cached per grid shape.
const std::vector<double>& wavenumber_squared(const Grid& grid);

// Per-point squared distance to the box center (x = 0) in storage order.
const std::vector<double>& radius_squared(const Grid& grid);

}  // namespace kgh
