#include "arel/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace arel {

ParamStore::Entry& ParamStore::add(const std::string& name, std::vector<std::size_t> shape) {
  if (index_.count(name)) throw std::invalid_argument("ParamStore: duplicate entry " + name);
  index_[name] = entries_.size();
  entries_.push_back(Entry{name, Array::zeros(shape), Array::zeros(shape)});
  return entries_.back();
}

ParamStore::Entry& ParamStore::add_xavier(const std::string& name,
                                          std::vector<std::size_t> shape, Rng& rng) {
  Entry& e = add(name, std::move(shape));
  const auto& s = e.value.shape();
  // fan_in/fan_out from the matrix view; vectors (biases) stay zero by
  // convention but this path is normally only used for matrices.
  double fan_in = static_cast<double>(s.size() >= 2 ? s[1] : s[0]);
  double fan_out = static_cast<double>(s[0]);
  double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& x : e.value.raw()) x = rng.uniform(-a, a);
  return e;
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("ParamStore: no entry " + name);
  return entries_[it->second];
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("ParamStore: no entry " + name);
  return entries_[it->second];
}

std::size_t ParamStore::total_size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParamStore::zero_grads() {
  for (auto& e : entries_) e.grad.fill(0.0);
}

double ParamStore::get_flat(std::size_t i) const {
  for (const auto& e : entries_) {
    if (i < e.value.size()) return e.value[i];
    i -= e.value.size();
  }
  throw std::out_of_range("ParamStore::get_flat");
}

void ParamStore::set_flat(std::size_t i, double v) {
  for (auto& e : entries_) {
    if (i < e.value.size()) {
      e.value[i] = v;
      return;
    }
    i -= e.value.size();
  }
  throw std::out_of_range("ParamStore::set_flat");
}

double ParamStore::get_flat_grad(std::size_t i) const {
  for (const auto& e : entries_) {
    if (i < e.grad.size()) return e.grad[i];
    i -= e.grad.size();
  }
  throw std::out_of_range("ParamStore::get_flat_grad");
}

}  // namespace arel
