#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace arel {

// Dense array of 64-bit reals, row-major. The shape is a list of positive
// extents and data.size() always equals their product. NaN/Inf anywhere is
// treated as an error state by the kernels, not a value to propagate.
class Array {
 public:
  Array() = default;

  static Array zeros(std::vector<std::size_t> shape);
  static Array constant(std::vector<std::size_t> shape, double v);
  static Array from(std::vector<std::size_t> shape, std::vector<double> values);
  // 1-D convenience.
  static Array vec(std::vector<double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // 2-D accessors; 1-D arrays are treated as single-column matrices.
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v);
  bool all_finite() const;
  bool same_shape(const Array& other) const { return shape_ == other.shape_; }

  bool operator==(const Array& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

// Throws std::invalid_argument when the array holds a non-finite value.
void require_finite(const Array& a, const std::string& what);

}  // namespace arel
