#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "arel/array.hpp"
#include "arel/rng.hpp"

namespace arel {

// Named, shaped parameter arrays for one model, each with a gradient buffer
// of the same shape. Iteration order is insertion order and is the order
// used for checkpoints and optimizer state, so it must be deterministic.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Array value;
    Array grad;
  };

  explicit ParamStore(std::uint64_t rng_seed = 0) : rng_seed_(rng_seed) {}

  std::uint64_t rng_seed() const { return rng_seed_; }
  void set_rng_seed(std::uint64_t s) { rng_seed_ = s; }

  // Adds a zero-initialized entry. Throws on duplicate names.
  Entry& add(const std::string& name, std::vector<std::size_t> shape);
  // Adds an entry initialized uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)).
  Entry& add_xavier(const std::string& name, std::vector<std::size_t> shape, Rng& rng);

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  Array& value(const std::string& name) { return entry(name).value; }
  const Array& value(const std::string& name) const { return entry(name).value; }
  Array& grad(const std::string& name) { return entry(name).grad; }
  const Array& grad(const std::string& name) const { return entry(name).grad; }

  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  std::size_t count() const { return entries_.size(); }
  std::size_t total_size() const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }

  void zero_grads();

  // Flat-coordinate access across all entries in insertion order; used by the
  // gradient checker.
  double get_flat(std::size_t i) const;
  void set_flat(std::size_t i, double v);
  double get_flat_grad(std::size_t i) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t rng_seed_ = 0;
};

}  // namespace arel
