#pragma once

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <new>
#include <span>
#include <vector>

#include "kgh/grid.hpp"

namespace kgh {

using cplx = std::complex<double>;

// 64-byte aligned storage so FFTW plans made on fftw_malloc'ed scratch can be
// executed on any field buffer.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    std::size_t bytes = ((n * sizeof(T) + alignment - 1) / alignment) * alignment;
    if (bytes == 0) bytes = alignment;
    void* p = std::aligned_alloc(alignment, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) { std::free(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using ComplexBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

enum class Representation { physical, spectral };

// Complex lattice function on a grid, tagged with the space its values live
// in. Spectral values are unitary DFT coefficients.
class Field {
 public:
  Field(const Grid& grid, Representation rep = Representation::physical);
  Field(const Grid& grid, Representation rep, ComplexBuffer values);

  const Grid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  bool is_spectral() const { return rep_ == Representation::spectral; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Relabels without touching values; only the transform code should use it.
  void set_representation(Representation rep) { rep_ = rep; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx scale);

 private:
  Grid grid_;
  Representation rep_;
  ComplexBuffer values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);

// Largest pointwise |a - b|; both fields must share grid and representation.
double max_abs_difference(const Field& a, const Field& b);

}  // namespace kgh
