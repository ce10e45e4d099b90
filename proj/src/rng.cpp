#include "arel/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace arel {

double Rng::normal() {
  // u in (0,1] so log(u) is finite.
  double u = 1.0 - uniform();
  double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  // Rejection sampling for an unbiased result.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

std::size_t Rng::categorical(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) total += p;
  if (!(total > 0.0)) throw std::invalid_argument("Rng::categorical: weights sum to zero");
  double r = uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (r < cum) return i;
  }
  return probs.size() - 1;
}

}  // namespace arel
