#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "tddr/numerics/matrix.hpp"

namespace tddr {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamState() = default;
  AdamState(std::size_t n, AdamConfig cfg) : config(cfg), first_moment(n, 0.0), second_moment(n, 0.0) {}

  AdamConfig config;
  Vec first_moment;
  Vec second_moment;
  std::uint64_t step_count = 0;
};

// One bias-corrected Adam update of params in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace tddr
