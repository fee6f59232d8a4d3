#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tddr/algorithm.hpp"
#include "tddr/env/continuous_env.hpp"
#include "tddr/env/monte_carlo.hpp"
#include "tddr/numerics/adam.hpp"
#include "tddr/numerics/mlp.hpp"
#include "tddr/replay_buffer.hpp"
#include "tddr/representation.hpp"
#include "tddr/td_targets.hpp"

namespace tddr {

struct AgentConfig {
  Algorithm algorithm = Algorithm::TDDR;
  double upsilon = 1.0;
  double gamma = 0.99;
  double tau = 0.005;
  // Noise scales are fractions of the env's action bound.
  double target_noise_sigma = 0.2;
  double target_noise_clip = 0.5;
  double exploration_sigma = 0.1;
  std::size_t batch_size = 256;
  std::size_t start_steps = 1000;
  std::size_t swap_period = 250;
  std::size_t hidden_dim = 256;
  std::size_t embed_dim = 256;
  std::size_t buffer_capacity = 100000;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double encoder_lr = 3e-4;
  // 0 selects the algorithm default: 2 for TD3, 1 otherwise.
  std::size_t policy_delay = 0;
  std::uint64_t seed = 0;
  // Test hook: the second actor's target actions are replaced by the first's.
  bool mirror_actors = false;

  std::size_t effective_policy_delay() const;
  void validate() const;  // throws ConfigError

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

// Per-critic record of one update inside train_step.
struct CriticUpdate {
  int critic = 1;
  std::vector<std::size_t> batch_indices;  // replay storage slots
  std::vector<Matrix> next_actions;        // target actions a'_j, one matrix per actor
  std::vector<TdContext> contexts;
  Vec psi;
  Vec targets;
  double critic_loss = 0.0;
  bool actor_updated = false;
  double actor_loss = 0.0;
};

struct StepDiagnostics {
  std::vector<CriticUpdate> updates;
  std::optional<double> encoder_loss;
  bool encoders_swapped = false;

  bool all_finite() const;
};

// Deterministic actor-critic agent covering DDPG, TD3 and the TDDR family.
class Agent {
 public:
  Agent(AgentConfig config, std::size_t state_dim, std::size_t action_dim, double action_bound);

  const AgentConfig& config() const { return config_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  double action_bound() const { return action_bound_; }
  std::size_t num_actors() const { return actors_.size(); }
  std::size_t num_critics() const { return critics_.size(); }
  std::size_t train_steps() const { return train_steps_; }

  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  bool ready() const { return buffer_.size() >= config_.batch_size; }

  Mlp& actor(std::size_t j) { return actors_.at(j); }
  Mlp& critic(std::size_t i) { return critics_.at(i); }
  Mlp& target_actor(std::size_t j) { return target_actors_.at(j); }
  Mlp& target_critic(std::size_t i) { return target_critics_.at(i); }
  const Mlp& actor(std::size_t j) const { return actors_.at(j); }
  const Mlp& critic(std::size_t i) const { return critics_.at(i); }
  const Mlp& target_actor(std::size_t j) const { return target_actors_.at(j); }
  const Mlp& target_critic(std::size_t i) const { return target_critics_.at(i); }
  const EncoderTriple* encoders() const { return encoders_ ? &*encoders_ : nullptr; }
  EncoderTriple* encoders() { return encoders_ ? &*encoders_ : nullptr; }

  // [s, e_s] with e_s from the fixed encoder generation, and e_s itself.
  // Throws StateError for agents without representation learning.
  std::pair<Vec, Vec> augment(std::span<const double> state) const;

  // Greedy behavior rule: each actor proposes an action and the one with the
  // largest value under any online critic wins (ties favor actor 1).
  Vec greedy_action(std::span<const double> state) const;
  // greedy_action plus clipped Gaussian exploration noise, clipped to the bound.
  Vec select_behavior_action(std::span<const double> state, SeededRng& rng) const;

  // min over online critics of Q_i(s, a).
  double value_estimate(std::span<const double> state, std::span<const double> action) const;
  Vec critic_values(std::span<const double> state, std::span<const double> action) const;

  // One environment step's worth of learning. Throws StateError until the
  // buffer holds a full batch.
  StepDiagnostics train_step(SeededRng& rng);

 private:
  Matrix actor_input(const Matrix& states, const Matrix* e_s) const;
  Matrix critic_input(const Matrix& states, const Matrix* e_s, const Matrix& actions,
                      const Matrix* e_sa) const;
  Matrix critic_input_for(const Matrix& states, const Matrix* e_s, const Matrix& actions,
                          const EncoderPair* pair) const;
  Matrix target_actions(std::size_t actor, const Matrix& next_states, const Matrix* e_next, SeededRng& rng) const;

  CriticUpdate update_critic_family(std::size_t i, SeededRng& rng, std::optional<double>& encoder_loss);
  std::vector<CriticUpdate> update_single_actor(SeededRng& rng);
  double fit_critic(std::size_t i, const Matrix& input, const Vec& targets);
  double improve_actor(std::size_t j, std::size_t critic_index, const Matrix& states, const Matrix* e_s);
  void sync_targets(std::size_t actor, std::size_t critic);

  AgentConfig config_;
  std::size_t state_dim_;
  std::size_t action_dim_;
  double action_bound_;
  std::vector<Mlp> actors_, critics_, target_actors_, target_critics_;
  std::vector<AdamState> actor_adam_, critic_adam_;
  std::optional<EncoderTriple> encoders_;
  ReplayBuffer buffer_;
  std::size_t train_steps_ = 0;
};

// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(std::span<double> target, std::span<const double> online, double tau);

struct EvalResult {
  double mean_return = 0.0;
  Vec episode_returns;
};

// Undiscounted episode returns of a deterministic policy.
EvalResult evaluate_policy(const Policy& policy, ContinuousEnv& env, std::size_t n_episodes, SeededRng& rng);
EvalResult evaluate_policy(const Agent& agent, ContinuousEnv& env, std::size_t n_episodes, SeededRng& rng);

}  // namespace tddr
