#pragma once

#include <cstddef>
#include <span>

#include "tddr/numerics/adam.hpp"
#include "tddr/numerics/mlp.hpp"

namespace tddr {

// State encoder E_s and state-action encoder E_sa.
//   e_s  = AvgL1Norm(E_s(s))
//   e_sa = E_sa([e_s, a])
struct EncoderPair {
  Mlp state_encoder;
  Mlp state_action_encoder;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t embed_dim = 0;

  // Two affine layers each with a ReLU hidden layer of width hidden_dim.
  // Parameters start at zero when rng is null.
  static EncoderPair create(std::size_t state_dim, std::size_t action_dim, std::size_t embed_dim,
                            std::size_t hidden_dim, SeededRng* rng);

  friend bool operator==(const EncoderPair&, const EncoderPair&) = default;
};

Vec encode_state(const EncoderPair& pair, std::span<const double> state);
Vec encode_state_action(const EncoderPair& pair, std::span<const double> e_s, std::span<const double> action);

Matrix encode_states(const EncoderPair& pair, const Matrix& states);
Matrix encode_state_actions(const EncoderPair& pair, const Matrix& e_s, const Matrix& actions);

struct EncoderLoss {
  double loss = 0.0;
  Vec state_encoder_grads;
  Vec state_action_encoder_grads;
};

// Dynamics-prediction loss mean((e_sa - stopgrad(e_s'))^2) over batch and
// embedding dims, with gradients through e_sa (and through e_s into E_s).
EncoderLoss encoder_loss_and_grads(const EncoderPair& pair, const Matrix& states, const Matrix& actions,
                                   const Matrix& next_states);

// Three encoder generations: `train` learns online, `fixed` feeds the online
// actor/critics, `target_fixed` feeds the target networks. Every swap_period
// calls to maybe_swap() the generations shift by one.
class EncoderTriple {
 public:
  EncoderTriple(EncoderPair initial, std::size_t swap_period, AdamConfig adam);

  const EncoderPair& train() const { return train_; }
  const EncoderPair& fixed() const { return fixed_; }
  const EncoderPair& target_fixed() const { return target_fixed_; }
  EncoderPair& mutable_train() { return train_; }

  std::size_t swap_period() const { return swap_period_; }
  std::size_t steps_since_swap() const { return steps_since_swap_; }
  std::size_t swap_count() const { return swap_count_; }

  // One Adam step on the train generation; returns the pre-step loss.
  double train_step(const Matrix& states, const Matrix& actions, const Matrix& next_states);

  bool maybe_swap();

 private:
  EncoderPair train_;
  EncoderPair fixed_;
  EncoderPair target_fixed_;
  AdamState state_adam_;
  AdamState state_action_adam_;
  std::size_t swap_period_;
  std::size_t steps_since_swap_ = 0;
  std::size_t swap_count_ = 0;
};

}  // namespace tddr
