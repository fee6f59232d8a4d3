#pragma once

#include <functional>
#include <span>

#include "tddr/env/continuous_env.hpp"

namespace tddr {

using Policy = std::function<Vec(std::span<const double>)>;

struct MonteCarloEstimate {
  double mean_return = 0.0;
  // gamma^T * max|r| / (1 - gamma) for rollouts cut at the horizon; 0 when
  // every rollout reached a terminal state.
  double truncation_bound = 0.0;
};

// Discounted return of `policy` from start_state, averaged over n_rollouts.
// Each rollout restarts the env clock and runs until done. Actions are clipped
// to the action bound.
MonteCarloEstimate monte_carlo_estimate(ContinuousEnv& env, const Policy& policy,
                                        std::span<const double> start_state, double gamma,
                                        std::size_t n_rollouts, SeededRng& rng);

inline double monte_carlo_return(ContinuousEnv& env, const Policy& policy,
                                 std::span<const double> start_state, double gamma,
                                 std::size_t n_rollouts, SeededRng& rng) {
  return monte_carlo_estimate(env, policy, start_state, gamma, n_rollouts, rng).mean_return;
}

Vec clip_action(std::span<const double> action, double bound);

}  // namespace tddr
