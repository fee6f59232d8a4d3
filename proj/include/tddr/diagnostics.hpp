#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tddr/algorithm.hpp"

namespace tddr {

// Largest |a - b| / max(|a|, |b|, floor) over paired entries.
inline constexpr double kGradRelErrFloor = 1e-7;
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b);

struct GradcheckReport {
  std::size_t n_cases = 0;
  double mlp_max_rel_error = 0.0;      // parameters and inputs of random 3-layer nets
  double encoder_max_rel_error = 0.0;  // both encoders under the latent-dynamics loss
};

// Backprop against central differences on n_cases random networks.
GradcheckReport gradcheck(std::size_t n_cases, std::uint64_t seed);

struct TabularCheckRow {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::TDDR;
  double upsilon = 0.0;
  double error = 0.0;      // sup |Q - Q*|
  double tolerance = 0.0;  // 0.05 (1 + |Q*|_inf)
  bool passed() const { return error <= tolerance; }
};

// Random 5-state, 3-action MDPs with gamma 0.9, one per seed; every family
// algorithm at upsilon in {0, 0.5, 1} against value iteration.
std::vector<TabularCheckRow> tabular_check(std::size_t n_seeds, std::size_t n_steps = 500000);

}  // namespace tddr
