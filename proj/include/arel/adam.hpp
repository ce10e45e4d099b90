#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "arel/array.hpp"
#include "arel/param_store.hpp"

namespace arel {

// First/second moment buffers, one pair per parameter, created on first use.
struct AdamState {
  struct Moments {
    Array m;
    Array v;
  };
  std::unordered_map<std::string, Moments> moments;
  std::int64_t step_count = 0;
};

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam update with bias correction at step t (1-based). Reads the
// gradients in the store and writes updated values in place.
void adam_step(ParamStore& params, AdamState& state, const AdamConfig& cfg, std::int64_t t);

}  // namespace arel
