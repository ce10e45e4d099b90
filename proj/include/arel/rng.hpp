#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace arel {

// Deterministic RNG. mt19937_64 output is fixed by the standard; all
// transforms below are hand-rolled so the stream is identical across
// platforms and build flags.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (no cached spare; two draws each call).
  double normal();

  // Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  // Index sampled proportionally to non-negative weights (must sum > 0).
  std::size_t categorical(std::span<const double> probs);

  // Derived stream that does not disturb this one beyond a single draw.
  Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace arel
