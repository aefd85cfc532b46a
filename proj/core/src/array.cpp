#include "redecide/array.hpp"

#include <cmath>

#include "redecide/errors.hpp"

namespace redecide {

namespace {
std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}
}  // namespace

Array::Array(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Array::Array(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size()) {
    throw DimensionError("array data length does not match shape product");
  }
}

Array Array::scalar(double v) { return Array({1}, {v}); }

Array Array::vec(std::initializer_list<double> values) {
  return Array({values.size()}, std::vector<double>(values));
}

Array Array::vec(std::vector<double> values) {
  std::size_t n = values.size();
  return Array({n}, std::move(values));
}

Array Array::zeros(std::vector<std::size_t> shape) { return Array(std::move(shape)); }

Array Array::ones(std::vector<std::size_t> shape) { return full(std::move(shape), 1.0); }

Array Array::full(std::vector<std::size_t> shape, double v) {
  Array a(std::move(shape));
  a.fill(v);
  return a;
}

Array Array::identity(std::size_t n) {
  Array a({n, n});
  for (std::size_t i = 0; i < n; ++i) a.at2(i, i) = 1.0;
  return a;
}

std::size_t Array::rows() const {
  if (rank() != 2) throw DimensionError("rows() requires a rank-2 array");
  return shape_[0];
}

std::size_t Array::cols() const {
  if (rank() != 2) throw DimensionError("cols() requires a rank-2 array");
  return shape_[1];
}

double Array::at2(std::size_t r, std::size_t c) const {
  return data_[r * cols() + c];
}

double& Array::at2(std::size_t r, std::size_t c) {
  return data_[r * cols() + c];
}

bool Array::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void Array::fill(double v) {
  for (double& x : data_) x = v;
}

}  // namespace redecide
