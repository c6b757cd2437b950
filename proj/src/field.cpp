#include "kgh/field.hpp"

#include <algorithm>
#include <cmath>

#include "kgh/error.hpp"

namespace kgh {

Field::Field(const Grid& grid, Representation rep) : grid_(grid), rep_(rep), values_(grid.size(), cplx{0.0, 0.0}) {}

Field::Field(const Grid& grid, Representation rep, ComplexBuffer values)
    : grid_(grid), rep_(rep), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ContractViolation("field value count does not match grid size");
}

namespace {
void require_compatible(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw ContractViolation("fields live on different grids");
  if (a.representation() != b.representation()) throw ContractViolation("fields are in different representations");
}
}  // namespace

Field& Field::operator+=(const Field& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(cplx scale) {
  for (auto& v : values_) v *= scale;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }

double max_abs_difference(const Field& a, const Field& b) {
  require_compatible(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace kgh
