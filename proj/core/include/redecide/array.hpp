#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace redecide {

// Dense row-major array of 64-bit floats. Everything in this project is a
// vector or a small matrix, so the representation stays flat and simple.
// Invariant: product(shape) == data.size().
class Array {
 public:
  Array() = default;
  explicit Array(std::vector<std::size_t> shape);  // zero-filled
  Array(std::vector<std::size_t> shape, std::vector<double> data);

  static Array scalar(double v);
  static Array vec(std::initializer_list<double> values);
  static Array vec(std::vector<double> values);
  static Array zeros(std::vector<std::size_t> shape);
  static Array ones(std::vector<std::size_t> shape);
  static Array full(std::vector<std::size_t> shape, double v);
  // Identity matrix, shape {n, n}.
  static Array identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;  // rank-2 only
  std::size_t cols() const;

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at2(std::size_t r, std::size_t c) const;
  double& at2(std::size_t r, std::size_t c);

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Array& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  void fill(double v);

  bool operator==(const Array& other) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

}  // namespace redecide
