#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "tddr/agent.hpp"
#include "tddr/env/continuous_env.hpp"

namespace tddr {

struct TrainingSchedule {
  std::size_t total_steps = 50000;
  std::size_t eval_period = 2500;
  std::size_t eval_episodes = 10;
  // Bias probing at every evaluation; 0 probe states disables it.
  std::size_t bias_probe_states = 0;
  std::size_t bias_rollouts = 1;

  friend bool operator==(const TrainingSchedule&, const TrainingSchedule&) = default;
};

struct EvalRow {
  std::size_t step = 0;
  double mean_return = 0.0;
  Vec episode_returns;
  Vec biases;  // one per probe state; empty when probing is off
};

struct RunLog {
  std::uint64_t seed = 0;
  std::vector<EvalRow> rows;
};

using EvalHook = std::function<void(const EvalRow&)>;
using TrainHook = std::function<void(std::size_t env_step, const StepDiagnostics&)>;

// Independent random streams per purpose, derived from the agent seed.
enum class Stream : std::uint64_t { Env = 1, Action = 2, Train = 3, Eval = 4, Bias = 5 };
SeededRng stream_rng(std::uint64_t seed, Stream s, std::uint64_t index = 0);

// Online training loop: uniform random actions for the first start_steps,
// then the agent's behavior policy. Learning starts once start_steps have
// elapsed and a full batch is stored; one train_step per environment step.
// Evaluates every eval_period steps on a clone of env. Throws NumericError as
// soon as a non-finite diagnostic appears.
RunLog run_training(Agent& agent, const ContinuousEnv& env, const TrainingSchedule& schedule,
                    const EvalHook& on_eval = {}, const TrainHook& on_train = {});

}  // namespace tddr
