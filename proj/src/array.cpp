#include "arel/array.hpp"

#include <cmath>
#include <numeric>

namespace arel {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw std::invalid_argument("Array: empty shape");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw std::invalid_argument("Array: zero extent in shape " + shape_str(shape));
    n *= d;
  }
  return n;
}

}  // namespace

Array Array::zeros(std::vector<std::size_t> shape) {
  return constant(std::move(shape), 0.0);
}

Array Array::constant(std::vector<std::size_t> shape, double v) {
  Array a;
  std::size_t n = checked_product(shape);
  a.shape_ = std::move(shape);
  a.data_.assign(n, v);
  return a;
}

Array Array::from(std::vector<std::size_t> shape, std::vector<double> values) {
  Array a;
  std::size_t n = checked_product(shape);
  if (values.size() != n) {
    throw std::invalid_argument("Array: data length " + std::to_string(values.size()) +
                                " does not match shape " + shape_str(shape));
  }
  a.shape_ = std::move(shape);
  a.data_ = std::move(values);
  return a;
}

Array Array::vec(std::vector<double> values) {
  return from({values.size()}, std::move(values));
}

std::size_t Array::rows() const {
  if (shape_.size() == 1) return shape_[0];
  if (shape_.size() == 2) return shape_[0];
  throw std::invalid_argument("Array: rows() on " + std::to_string(shape_.size()) + "-d array");
}

std::size_t Array::cols() const {
  if (shape_.size() == 1) return 1;
  if (shape_.size() == 2) return shape_[1];
  throw std::invalid_argument("Array: cols() on " + std::to_string(shape_.size()) + "-d array");
}

void Array::fill(double v) {
  for (double& x : data_) x = v;
}

bool Array::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  s += "]";
  return s;
}

void require_finite(const Array& a, const std::string& what) {
  if (!a.all_finite()) throw std::invalid_argument(what + ": non-finite value");
}

}  // namespace arel
