#include "tddr/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tddr {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

}  // namespace

std::size_t AgentConfig::effective_policy_delay() const {
  if (policy_delay != 0) return policy_delay;
  return algorithm == Algorithm::TD3 ? 2 : 1;
}

void AgentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(upsilon >= 0.0 && upsilon <= 1.0)) fail("upsilon must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) fail("tau must lie in (0, 1]");
  if (!(target_noise_sigma >= 0.0)) fail("target_noise_sigma must be >= 0");
  if (!(target_noise_clip > 0.0)) fail("target_noise_clip must be > 0");
  if (!(exploration_sigma >= 0.0)) fail("exploration_sigma must be >= 0");
  if (batch_size == 0) fail("batch_size must be positive");
  if (swap_period == 0) fail("swap_period must be positive");
  if (hidden_dim == 0 || embed_dim == 0) fail("network widths must be positive");
  if (buffer_capacity < batch_size) fail("buffer_capacity must be at least batch_size");
  if (!(actor_lr >= 0.0 && critic_lr >= 0.0 && encoder_lr >= 0.0)) fail("learning rates must be >= 0");
  if (mirror_actors && !has_double_actor(algorithm)) fail("mirror_actors needs a double-actor algorithm");
}

bool StepDiagnostics::all_finite() const {
  if (encoder_loss && !std::isfinite(*encoder_loss)) return false;
  for (const auto& u : updates) {
    if (!std::isfinite(u.critic_loss) || !std::isfinite(u.actor_loss)) return false;
    if (!tddr::all_finite(u.targets) || !tddr::all_finite(u.psi)) return false;
  }
  return true;
}

Agent::Agent(AgentConfig config, std::size_t state_dim, std::size_t action_dim, double action_bound)
    : config_(config),
      state_dim_(state_dim),
      action_dim_(action_dim),
      action_bound_(action_bound),
      buffer_(config.buffer_capacity) {
  config_.validate();
  if (state_dim == 0 || action_dim == 0) throw ShapeError("Agent: dimensions must be positive");
  if (!(action_bound > 0.0)) throw std::domain_error("Agent: action bound must be positive");

  SeededRng rng = derive_rng(config_.seed, kInitStream);
  const bool rep = has_representation(config_.algorithm);
  const std::size_t h = config_.hidden_dim;
  const std::size_t e = rep ? config_.embed_dim : 0;
  const std::size_t actor_in = state_dim + e;
  const std::size_t critic_in = state_dim + e + action_dim + e;

  const std::size_t n_actors = has_double_actor(config_.algorithm) ? 2 : 1;
  for (std::size_t j = 0; j < n_actors; ++j) {
    actors_.emplace_back(std::vector<std::size_t>{actor_in, h, h, action_dim}, OutputActivation::ScaledTanh,
                         action_bound);
    actors_.back().init_fan_in(rng);
    actor_adam_.emplace_back(actors_.back().num_params(), AdamConfig{.lr = config_.actor_lr});
  }
  for (std::size_t i = 0; i < critic_count(config_.algorithm); ++i) {
    critics_.emplace_back(std::vector<std::size_t>{critic_in, h, h, 1});
    critics_.back().init_fan_in(rng);
    critic_adam_.emplace_back(critics_.back().num_params(), AdamConfig{.lr = config_.critic_lr});
  }
  target_actors_ = actors_;
  target_critics_ = critics_;
  if (rep)
    encoders_.emplace(EncoderPair::create(state_dim, action_dim, config_.embed_dim, h, &rng),
                      config_.swap_period, AdamConfig{.lr = config_.encoder_lr});
}

Matrix Agent::actor_input(const Matrix& states, const Matrix* e_s) const {
  return e_s ? hconcat({&states, e_s}) : states;
}

Matrix Agent::critic_input(const Matrix& states, const Matrix* e_s, const Matrix& actions,
                           const Matrix* e_sa) const {
  return e_s ? hconcat({&states, e_s, &actions, e_sa}) : hconcat({&states, &actions});
}

Matrix Agent::critic_input_for(const Matrix& states, const Matrix* e_s, const Matrix& actions,
                               const EncoderPair* pair) const {
  if (!pair) return critic_input(states, nullptr, actions, nullptr);
  const Matrix e_sa = encode_state_actions(*pair, *e_s, actions);
  return critic_input(states, e_s, actions, &e_sa);
}

std::pair<Vec, Vec> Agent::augment(std::span<const double> state) const {
  if (!encoders_) throw StateError("augment: agent has no state encoder");
  require_shape(state.size() == state_dim_, "augment: state has wrong dimension");
  Vec e_s = encode_state(encoders_->fixed(), state);
  return {concat(state, e_s), std::move(e_s)};
}

Vec Agent::critic_values(std::span<const double> state, std::span<const double> action) const {
  require_shape(state.size() == state_dim_ && action.size() == action_dim_,
                "critic_values: input has wrong dimension");
  const Matrix s = Matrix::from_row(state);
  const Matrix a = Matrix::from_row(action);
  const EncoderPair* pair = encoders_ ? &encoders_->fixed() : nullptr;
  Matrix e_s;
  if (pair) e_s = encode_states(*pair, s);
  const Matrix in = critic_input_for(s, pair ? &e_s : nullptr, a, pair);
  Vec out;
  for (const auto& c : critics_) out.push_back(c.forward(in)(0, 0));
  return out;
}

double Agent::value_estimate(std::span<const double> state, std::span<const double> action) const {
  const Vec q = critic_values(state, action);
  return *std::min_element(q.begin(), q.end());
}

Vec Agent::greedy_action(std::span<const double> state) const {
  require_shape(state.size() == state_dim_, "greedy_action: state has wrong dimension");
  const Matrix s = Matrix::from_row(state);
  Matrix e_s;
  if (encoders_) e_s = encode_states(encoders_->fixed(), s);
  const Matrix x = actor_input(s, encoders_ ? &e_s : nullptr);
  if (actors_.size() == 1) {
    const Matrix a = actors_[0].forward(x);
    return Vec(a.flat().begin(), a.flat().end());
  }

  Vec best;
  double best_q = -std::numeric_limits<double>::infinity();
  for (const auto& actor : actors_) {
    const Matrix out = actor.forward(x);
    const Vec a(out.flat().begin(), out.flat().end());
    for (double q : critic_values(state, a)) {
      if (best.empty() || q > best_q) {
        best_q = q;
        best = a;
      }
    }
  }
  return best;
}

Vec Agent::select_behavior_action(std::span<const double> state, SeededRng& rng) const {
  Vec a = greedy_action(state);
  const Vec noise =
      sample_clipped_gaussian(rng, config_.exploration_sigma * action_bound_, action_bound_, action_dim_);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += noise[k];
  return clip_action(a, action_bound_);
}

Matrix Agent::target_actions(std::size_t actor, const Matrix& next_states, const Matrix* e_next,
                             SeededRng& rng) const {
  Matrix a = target_actors_[actor].forward(actor_input(next_states, e_next));
  const double sigma = config_.target_noise_sigma * action_bound_;
  const double clip = config_.target_noise_clip * action_bound_;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const Vec noise = sample_clipped_gaussian(rng, sigma, clip, action_dim_);
    for (std::size_t k = 0; k < action_dim_; ++k)
      a(r, k) = std::clamp(a(r, k) + noise[k], -action_bound_, action_bound_);
  }
  return a;
}

double Agent::fit_critic(std::size_t i, const Matrix& input, const Vec& targets) {
  Mlp& net = critics_[i];
  Mlp::Cache cache;
  const Matrix q = net.forward(input, cache);
  const double n = static_cast<double>(targets.size());
  Matrix grad(q.rows(), 1);
  double loss = 0.0;
  for (std::size_t r = 0; r < q.rows(); ++r) {
    const double diff = q(r, 0) - targets[r];
    loss += diff * diff;
    grad(r, 0) = 2.0 * diff / n;
  }
  Vec g(net.num_params(), 0.0);
  net.backward(cache, grad, g);
  adam_step(net.params(), g, critic_adam_[i]);
  return loss / n;
}

// Deterministic policy gradient: ascend Q_critic(s, actor_j(s)). For
// representation agents the action also enters through the fixed E_sa, whose
// parameters are left alone.
double Agent::improve_actor(std::size_t j, std::size_t critic_index, const Matrix& states, const Matrix* e_s) {
  Mlp& actor = actors_[j];
  const Mlp& critic = critics_[critic_index];
  const std::size_t n = states.rows();

  Mlp::Cache actor_cache, critic_cache, esa_cache;
  const Matrix a = actor.forward(actor_input(states, e_s), actor_cache);
  Matrix e_sa;
  const Mlp* esa_net = encoders_ ? &encoders_->fixed().state_action_encoder : nullptr;
  if (esa_net) e_sa = esa_net->forward(hconcat({e_s, &a}), esa_cache);
  const Matrix q = critic.forward(critic_input(states, e_s, a, esa_net ? &e_sa : nullptr), critic_cache);

  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) loss -= q(r, 0);
  loss /= static_cast<double>(n);

  const Matrix dq(n, 1, -1.0 / static_cast<double>(n));
  const Matrix d_in = critic.backward(critic_cache, dq, {});
  const std::size_t e = e_s ? e_s->cols() : 0;
  const std::size_t a_col = state_dim_ + e;
  Matrix da = column_slice(d_in, a_col, action_dim_);
  if (esa_net) {
    const Matrix d_esa = column_slice(d_in, a_col + action_dim_, e);
    const Matrix d_esa_in = esa_net->backward(esa_cache, d_esa, {});
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < action_dim_; ++k) da(r, k) += d_esa_in(r, e + k);
  }
  Vec g(actor.num_params(), 0.0);
  actor.backward(actor_cache, da, g);
  adam_step(actor.params(), g, actor_adam_[j]);
  return loss;
}

void Agent::sync_targets(std::size_t actor, std::size_t critic) {
  soft_update(target_critics_[critic].params(), critics_[critic].params(), config_.tau);
  soft_update(target_actors_[actor].params(), actors_[actor].params(), config_.tau);
}

CriticUpdate Agent::update_critic_family(std::size_t i, SeededRng& rng, std::optional<double>& encoder_loss) {
  CriticUpdate u;
  u.critic = static_cast<int>(i) + 1;
  u.batch_indices = buffer_.sample_indices(config_.batch_size, rng);
  std::vector<const Transition*> rows;
  for (std::size_t idx : u.batch_indices) rows.push_back(&buffer_.slot(idx));
  const Batch b = make_batch(rows);
  const std::size_t n = b.size();

  const EncoderPair* tgt_pair = encoders_ ? &encoders_->target_fixed() : nullptr;
  Matrix es_next_t, es_cur_t;
  if (tgt_pair) {
    es_next_t = encode_states(*tgt_pair, b.next_states);
    es_cur_t = encode_states(*tgt_pair, b.states);
  }
  const Matrix* en = tgt_pair ? &es_next_t : nullptr;
  const Matrix* ec = tgt_pair ? &es_cur_t : nullptr;

  u.next_actions.push_back(target_actions(0, b.next_states, en, rng));
  u.next_actions.push_back(config_.mirror_actors ? u.next_actions[0] : target_actions(1, b.next_states, en, rng));

  // q[c][j] = target critic c at actor j's next action.
  Vec q[2][2], q_cur[2];
  for (std::size_t j = 0; j < 2; ++j) {
    const Matrix in = critic_input_for(b.next_states, en, u.next_actions[j], tgt_pair);
    for (std::size_t c = 0; c < 2; ++c) {
      const Matrix out = target_critics_[c].forward(in);
      q[c][j] = Vec(out.flat().begin(), out.flat().end());
    }
  }
  {
    const Matrix in = critic_input_for(b.states, ec, b.actions, tgt_pair);
    for (std::size_t c = 0; c < 2; ++c) {
      const Matrix out = target_critics_[c].forward(in);
      q_cur[c] = Vec(out.flat().begin(), out.flat().end());
    }
  }

  u.contexts.reserve(n);
  u.psi.resize(n);
  u.targets.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const CriticEvals ev{q[0][0][r], q[0][1][r], q[1][0][r], q[1][1][r], q_cur[0][r], q_cur[1][r]};
    const bool done = b.done[r] != 0.0;
    u.contexts.push_back(make_context(ev, b.rewards[r], config_.gamma, done, config_.upsilon));
    u.psi[r] = psi_for(config_.algorithm, u.contexts.back());
    u.targets[r] = td_target(b.rewards[r], config_.gamma, done, u.psi[r]);
  }

  if (encoders_ && i == 0) encoder_loss = encoders_->train_step(b.states, b.actions, b.next_states);

  const EncoderPair* fixed = encoders_ ? &encoders_->fixed() : nullptr;
  Matrix es_f;
  if (fixed) es_f = encode_states(*fixed, b.states);
  const Matrix* ef = fixed ? &es_f : nullptr;
  u.critic_loss = fit_critic(i, critic_input_for(b.states, ef, b.actions, fixed), u.targets);

  if (train_steps_ % config_.effective_policy_delay() == 0) {
    u.actor_updated = true;
    u.actor_loss = improve_actor(i, i, b.states, ef);
    sync_targets(i, i);
  }
  return u;
}

std::vector<CriticUpdate> Agent::update_single_actor(SeededRng& rng) {
  CriticUpdate u;
  u.batch_indices = buffer_.sample_indices(config_.batch_size, rng);
  std::vector<const Transition*> rows;
  for (std::size_t idx : u.batch_indices) rows.push_back(&buffer_.slot(idx));
  const Batch b = make_batch(rows);
  const std::size_t n = b.size();
  const std::size_t nc = critics_.size();

  u.next_actions.push_back(target_actions(0, b.next_states, nullptr, rng));
  const Matrix in_next = critic_input(b.next_states, nullptr, u.next_actions[0], nullptr);
  const Matrix in_cur = critic_input(b.states, nullptr, b.actions, nullptr);
  std::vector<Matrix> qn, qc;
  for (std::size_t c = 0; c < nc; ++c) {
    qn.push_back(target_critics_[c].forward(in_next));
    qc.push_back(target_critics_[c].forward(in_cur));
  }

  u.psi.resize(n);
  u.targets.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double q1 = qn[0](r, 0), q2 = qn[nc - 1](r, 0);
    const CriticEvals ev{q1, q1, q2, q2, qc[0](r, 0), qc[nc - 1](r, 0)};
    const bool done = b.done[r] != 0.0;
    u.contexts.push_back(make_context(ev, b.rewards[r], config_.gamma, done, config_.upsilon));
    u.psi[r] = config_.algorithm == Algorithm::DDPG ? psi_ddpg(q1) : psi_cdq(q1, q2);
    u.targets[r] = td_target(b.rewards[r], config_.gamma, done, u.psi[r]);
  }

  std::vector<CriticUpdate> out(nc, u);
  for (std::size_t c = 0; c < nc; ++c) {
    out[c].critic = static_cast<int>(c) + 1;
    out[c].critic_loss = fit_critic(c, in_cur, u.targets);
  }
  if (train_steps_ % config_.effective_policy_delay() == 0) {
    out[0].actor_updated = true;
    out[0].actor_loss = improve_actor(0, 0, b.states, nullptr);
    soft_update(target_actors_[0].params(), actors_[0].params(), config_.tau);
    for (std::size_t c = 0; c < nc; ++c)
      soft_update(target_critics_[c].params(), critics_[c].params(), config_.tau);
  }
  return out;
}

StepDiagnostics Agent::train_step(SeededRng& rng) {
  if (!ready()) throw StateError("train_step: replay buffer holds fewer transitions than one batch");
  StepDiagnostics d;
  if (has_double_actor(config_.algorithm)) {
    for (std::size_t i = 0; i < 2; ++i) d.updates.push_back(update_critic_family(i, rng, d.encoder_loss));
    if (encoders_) d.encoders_swapped = encoders_->maybe_swap();
  } else {
    d.updates = update_single_actor(rng);
  }
  ++train_steps_;
  return d;
}

void soft_update(std::span<double> target, std::span<const double> online, double tau) {
  require_shape(target.size() == online.size(), "soft_update: parameter count mismatch");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::domain_error("soft_update: tau must be in (0, 1]");
  if (tau == 1.0) {
    std::copy(online.begin(), online.end(), target.begin());
    return;
  }
  for (std::size_t k = 0; k < target.size(); ++k) target[k] = tau * online[k] + (1.0 - tau) * target[k];
}

EvalResult evaluate_policy(const Policy& policy, ContinuousEnv& env, std::size_t n_episodes, SeededRng& rng) {
  if (n_episodes == 0) throw std::invalid_argument("evaluate_policy: need at least one episode");
  EvalResult out;
  for (std::size_t ep = 0; ep < n_episodes; ++ep) {
    Vec s = env.reset(rng);
    double total = 0.0;
    for (;;) {
      const Vec a = clip_action(policy(s), env.action_bound());
      StepResult res = env.step(s, a);
      total += res.reward;
      s = std::move(res.next_state);
      if (res.done) break;
    }
    out.episode_returns.push_back(total);
  }
  double sum = 0.0;
  for (double r : out.episode_returns) sum += r;
  out.mean_return = sum / static_cast<double>(n_episodes);
  return out;
}

EvalResult evaluate_policy(const Agent& agent, ContinuousEnv& env, std::size_t n_episodes, SeededRng& rng) {
  return evaluate_policy([&agent](std::span<const double> s) { return agent.greedy_action(s); }, env,
                         n_episodes, rng);
}

}  // namespace tddr
