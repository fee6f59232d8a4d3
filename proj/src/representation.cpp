#include "tddr/representation.hpp"

#include <stdexcept>

#include "tddr/numerics/normalize.hpp"

namespace tddr {

EncoderPair EncoderPair::create(std::size_t state_dim, std::size_t action_dim, std::size_t embed_dim,
                                std::size_t hidden_dim, SeededRng* rng) {
  EncoderPair p{Mlp({state_dim, hidden_dim, embed_dim}),
                Mlp({embed_dim + action_dim, hidden_dim, embed_dim}), state_dim, action_dim, embed_dim};
  if (rng) {
    p.state_encoder.init_fan_in(*rng);
    p.state_action_encoder.init_fan_in(*rng);
  }
  return p;
}

Vec encode_state(const EncoderPair& pair, std::span<const double> state) {
  require_shape(state.size() == pair.state_dim, "encode_state: state has wrong dimension");
  return avg_l1_norm(pair.state_encoder.forward(state));
}

Vec encode_state_action(const EncoderPair& pair, std::span<const double> e_s, std::span<const double> action) {
  require_shape(e_s.size() == pair.embed_dim && action.size() == pair.action_dim,
                "encode_state_action: input has wrong dimension");
  return pair.state_action_encoder.forward(concat(e_s, action));
}

Matrix encode_states(const EncoderPair& pair, const Matrix& states) {
  require_shape(states.cols() == pair.state_dim, "encode_states: state has wrong dimension");
  return avg_l1_norm_rows(pair.state_encoder.forward(states));
}

Matrix encode_state_actions(const EncoderPair& pair, const Matrix& e_s, const Matrix& actions) {
  require_shape(e_s.cols() == pair.embed_dim && actions.cols() == pair.action_dim,
                "encode_state_actions: input has wrong dimension");
  return pair.state_action_encoder.forward(hconcat({&e_s, &actions}));
}

EncoderLoss encoder_loss_and_grads(const EncoderPair& pair, const Matrix& states, const Matrix& actions,
                                   const Matrix& next_states) {
  if (states.rows() == 0) throw std::domain_error("encoder_loss_and_grads: empty batch");
  require_shape(actions.rows() == states.rows() && next_states.rows() == states.rows(),
                "encoder_loss_and_grads: batch sizes differ");
  const Matrix target = encode_states(pair, next_states);

  Mlp::Cache es_cache, esa_cache;
  const Matrix raw = pair.state_encoder.forward(states, es_cache);
  const Matrix e_s = avg_l1_norm_rows(raw);
  const Matrix e_sa = pair.state_action_encoder.forward(hconcat({&e_s, &actions}), esa_cache);

  const double scale = 1.0 / static_cast<double>(e_sa.rows() * e_sa.cols());
  EncoderLoss out;
  Matrix grad(e_sa.rows(), e_sa.cols());
  double sum = 0.0;
  for (std::size_t k = 0; k < grad.flat().size(); ++k) {
    const double diff = e_sa.flat()[k] - target.flat()[k];
    sum += diff * diff;
    grad.flat()[k] = 2.0 * diff * scale;
  }
  out.loss = sum * scale;

  out.state_action_encoder_grads.assign(pair.state_action_encoder.num_params(), 0.0);
  const Matrix d_input = pair.state_action_encoder.backward(esa_cache, grad, out.state_action_encoder_grads);
  const Matrix d_es = column_slice(d_input, 0, pair.embed_dim);
  const Matrix d_raw = avg_l1_norm_rows_backward(raw, d_es);
  out.state_encoder_grads.assign(pair.state_encoder.num_params(), 0.0);
  pair.state_encoder.backward(es_cache, d_raw, out.state_encoder_grads);
  return out;
}

EncoderTriple::EncoderTriple(EncoderPair initial, std::size_t swap_period, AdamConfig adam)
    : train_(initial),
      fixed_(initial),
      target_fixed_(std::move(initial)),
      state_adam_(train_.state_encoder.num_params(), adam),
      state_action_adam_(train_.state_action_encoder.num_params(), adam),
      swap_period_(swap_period) {
  if (swap_period_ == 0) throw std::invalid_argument("EncoderTriple: swap period must be positive");
}

double EncoderTriple::train_step(const Matrix& states, const Matrix& actions, const Matrix& next_states) {
  EncoderLoss l = encoder_loss_and_grads(train_, states, actions, next_states);
  adam_step(train_.state_encoder.params(), l.state_encoder_grads, state_adam_);
  adam_step(train_.state_action_encoder.params(), l.state_action_encoder_grads, state_action_adam_);
  return l.loss;
}

bool EncoderTriple::maybe_swap() {
  if (++steps_since_swap_ < swap_period_) return false;
  target_fixed_ = fixed_;
  fixed_ = train_;
  steps_since_swap_ = 0;
  ++swap_count_;
  return true;
}

}  // namespace tddr
