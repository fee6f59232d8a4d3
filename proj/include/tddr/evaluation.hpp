#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tddr/agent.hpp"
#include "tddr/env/continuous_env.hpp"
#include "tddr/env/monte_carlo.hpp"
#include "tddr/trainer.hpp"

namespace tddr {

struct BiasRecord {
  Vec state;
  Vec action;
  double q_estimate = 0.0;
  double mc_return = 0.0;
  double bias = 0.0;  // q_estimate - mc_return
  double truncation_bound = 0.0;
};

using ValueFn = std::function<double(std::span<const double> state, std::span<const double> action)>;

// Generic probe. Probe state k comes from a fresh episode driven by
// `behavior` for a uniformly drawn number of steps in [0, horizon); the
// greedy action there is scored by `value` and by a Monte Carlo rollout of
// `greedy`.
std::vector<BiasRecord> measure_bias(ContinuousEnv& env, const Policy& behavior, const Policy& greedy,
                                     const ValueFn& value, std::size_t n_probe_states, std::size_t n_rollouts,
                                     double gamma, SeededRng& rng);

// Agent probe: exploration-noise behavior policy, greedy policy, and the min
// over online critics as the value estimate.
std::vector<BiasRecord> measure_bias(const Agent& agent, ContinuousEnv& env, std::size_t n_probe_states,
                                     std::size_t n_rollouts, double gamma, SeededRng& rng);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};
MeanStd mean_std(std::span<const double> v);

// Mean of each row's statistic over the last `window` rows.
double final_window_return(const RunLog& log, std::size_t window);
double final_window_bias(const RunLog& log, std::size_t window);

struct SweepCell {
  double upsilon = 0.0;
  std::uint64_t seed = 0;
  RunLog log;
  double final_return = 0.0;
  double final_bias = 0.0;
};

struct SweepPoint {
  double upsilon = 0.0;
  MeanStd final_return;
  MeanStd final_bias;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // grid order
  std::vector<SweepCell> cells;    // grid-major, then seed order
  std::size_t best_index() const;  // largest mean final return, first on ties
};

inline constexpr std::size_t kFinalWindow = 10;

// Trains one agent per (upsilon, seed) cell. Cells are independent and run
// in parallel; results do not depend on the thread count.
SweepResult sweep_upsilon(const AgentConfig& base, EnvId env, std::span<const double> grid,
                          std::span<const std::uint64_t> seeds, const TrainingSchedule& schedule,
                          std::size_t final_window = kFinalWindow);

}  // namespace tddr
