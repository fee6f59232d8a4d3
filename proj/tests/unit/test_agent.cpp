#include <gtest/gtest.h>

#include <cmath>

#include "oracles/psi_reference.hpp"
#include "tddr/agent.hpp"
#include "tddr/errors.hpp"

using namespace tddr;

namespace {

AgentConfig small_config(Algorithm alg, std::uint64_t seed = 1) {
  AgentConfig c;
  c.algorithm = alg;
  c.hidden_dim = 16;
  c.embed_dim = 8;
  c.batch_size = 8;
  c.buffer_capacity = 1000;
  c.seed = seed;
  return c;
}

void fill_buffer(Agent& agent, std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    Transition t;
    for (std::size_t d = 0; d < agent.state_dim(); ++d) {
      t.state.push_back(rng.uniform(-1, 1));
      t.next_state.push_back(rng.uniform(-1, 1));
    }
    for (std::size_t d = 0; d < agent.action_dim(); ++d) t.action.push_back(rng.uniform(-1, 1));
    t.reward = rng.uniform(-1, 0);
    t.done = rng.uniform() < 0.2;
    agent.buffer().push(t);
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// Actor with constant output `a` (tanh^-1 through the bias).
void set_constant_actor(Mlp& net, double a) {
  for (double& w : net.params()) w = 0.0;
  net.biases(net.num_layers() - 1)[0] = std::atanh(a / net.output_bound());
}

// Critic on input [s, a] (1-D each): Q = neg * 2 relu(-a) + pos * 2 relu(a),
// which evaluates to `neg` at a = -0.5 and `pos` at a = +0.5.
void set_piecewise_critic(Mlp& net, double neg, double pos) {
  for (double& w : net.params()) w = 0.0;
  auto w0 = net.weights(0);  // hidden x 2
  w0[0 * 2 + 1] = 1.0;
  w0[1 * 2 + 1] = -1.0;
  const std::size_t h = net.layer_dims()[1];
  auto w1 = net.weights(1);  // h x h
  w1[0 * h + 0] = 1.0;
  w1[1 * h + 1] = 1.0;
  auto w2 = net.weights(2);  // 1 x h
  w2[0] = 2.0 * pos;
  w2[1] = 2.0 * neg;
}

}  // namespace

TEST(AgentConfig, Validation) {
  AgentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.upsilon = 1.3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(AgentConfig{}.effective_policy_delay(), 1u);
  c = {};
  c.algorithm = Algorithm::TD3;
  EXPECT_EQ(c.effective_policy_delay(), 2u);
}

TEST(Algorithm, NamesRoundTrip) {
  for (auto a : {Algorithm::DDPG, Algorithm::TD3, Algorithm::TDDR, Algorithm::DADC, Algorithm::DASC, Algorithm::SASC,
                 Algorithm::DADC_R, Algorithm::DASC_R, Algorithm::SASC_R})
    EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
  EXPECT_THROW(parse_algorithm("sac"), ConfigError);
}

TEST(Agent, Topology) {
  Agent ddpg(small_config(Algorithm::DDPG), 2, 1, 1.0);
  EXPECT_EQ(ddpg.num_actors(), 1u);
  EXPECT_EQ(ddpg.num_critics(), 1u);
  EXPECT_EQ(ddpg.encoders(), nullptr);
  Agent td3(small_config(Algorithm::TD3), 2, 1, 1.0);
  EXPECT_EQ(td3.num_actors(), 1u);
  EXPECT_EQ(td3.num_critics(), 2u);
  Agent r(small_config(Algorithm::DASC_R), 2, 1, 1.0);
  EXPECT_EQ(r.num_actors(), 2u);
  EXPECT_NE(r.encoders(), nullptr);
  EXPECT_EQ(r.critic(0).input_dim(), 2u + 8 + 1 + 8);
  EXPECT_EQ(r.actor(0).input_dim(), 2u + 8);
}

TEST(Agent, AugmentExamples) {
  Agent agent(small_config(Algorithm::DADC_R), 2, 1, 1.0);
  auto cfg = small_config(Algorithm::DADC_R);
  cfg.embed_dim = 4;
  Agent a4(cfg, 2, 1, 1.0);
  auto [s_aug, e_s] = a4.augment(Vec{0.3, -0.7});
  EXPECT_EQ(s_aug.size(), 6u);
  EXPECT_EQ(e_s, encode_state(a4.encoders()->fixed(), Vec{0.3, -0.7}));

  *a4.encoders() = EncoderTriple(EncoderPair::create(2, 1, 4, 16, nullptr), 250, AdamConfig{});
  EXPECT_EQ(a4.augment(Vec{0.3, -0.7}).first, (Vec{0.3, -0.7, 0, 0, 0, 0}));

  Agent plain(small_config(Algorithm::TDDR), 2, 1, 1.0);
  EXPECT_THROW(plain.augment(Vec{0.3, -0.7}), StateError);
}

TEST(Agent, BehaviorPicksLargestSingleValue) {
  auto cfg = small_config(Algorithm::TDDR);
  cfg.exploration_sigma = 0.0;
  Agent agent(cfg, 1, 1, 1.0);
  set_constant_actor(agent.actor(0), -0.5);
  set_constant_actor(agent.actor(1), 0.5);
  set_piecewise_critic(agent.critic(0), 1.0, 3.0);  // Q1(a1) = 1, Q1(a2) = 3
  set_piecewise_critic(agent.critic(1), 2.0, 0.0);  // Q2(a1) = 2, Q2(a2) = 0
  EXPECT_NEAR(agent.critic_values(Vec{0.0}, Vec{0.5})[0], 3.0, 1e-12);
  SeededRng rng(0);
  const Vec a = agent.select_behavior_action(Vec{0.0}, rng);
  EXPECT_NEAR(a[0], 0.5, 1e-12);
  EXPECT_EQ(a, agent.greedy_action(Vec{0.0}));

  set_piecewise_critic(agent.critic(0), 1.0, 1.0);
  set_piecewise_critic(agent.critic(1), 1.0, 1.0);
  EXPECT_NEAR(agent.greedy_action(Vec{0.0})[0], -0.5, 1e-12);
}

TEST(Agent, ExplorationNoiseIsClipped) {
  auto cfg = small_config(Algorithm::DDPG);
  cfg.exploration_sigma = 5.0;
  Agent agent(cfg, 1, 1, 1.0);
  SeededRng rng(1);
  for (int i = 0; i < 200; ++i) EXPECT_LE(std::abs(agent.select_behavior_action(Vec{0.2}, rng)[0]), 1.0);
}

TEST(Agent, NotReadyThrows) {
  Agent agent(small_config(Algorithm::TDDR), 1, 1, 1.0);
  fill_buffer(agent, 7, 0);
  SeededRng rng(0);
  EXPECT_THROW(agent.train_step(rng), StateError);
}

TEST(Agent, ZeroLearningRatesFreezeEverything) {
  for (auto alg : {Algorithm::DDPG, Algorithm::TD3, Algorithm::SASC, Algorithm::DASC_R}) {
    auto cfg = small_config(alg);
    cfg.actor_lr = cfg.critic_lr = cfg.encoder_lr = 0.0;
    Agent agent(cfg, 2, 1, 1.0);
    fill_buffer(agent, 32, 1);
    const Agent before = agent;
    SeededRng rng(2);
    agent.train_step(rng);
    for (std::size_t j = 0; j < agent.num_actors(); ++j) {
      EXPECT_EQ(agent.actor(j), before.actor(j));
      EXPECT_LE(max_abs_diff(agent.target_actor(j).params(), before.target_actor(j).params()), 1e-15);
    }
    for (std::size_t i = 0; i < agent.num_critics(); ++i) {
      EXPECT_EQ(agent.critic(i), before.critic(i));
      EXPECT_LE(max_abs_diff(agent.target_critic(i).params(), before.target_critic(i).params()), 1e-15);
    }
    if (agent.encoders()) {
      EXPECT_EQ(agent.encoders()->train(), before.encoders()->train());
    }
  }
}

TEST(Agent, Td3CriticsShareTargets) {
  Agent agent(small_config(Algorithm::TD3), 2, 1, 1.0);
  fill_buffer(agent, 64, 3);
  SeededRng rng(4);
  for (int k = 0; k < 5; ++k) {
    auto d = agent.train_step(rng);
    ASSERT_EQ(d.updates.size(), 2u);
    EXPECT_EQ(d.updates[0].targets, d.updates[1].targets);
    EXPECT_EQ(d.updates[0].actor_updated, k % 2 == 0);
  }
}

TEST(Agent, TddrTargetsMatchHandComputation) {
  auto cfg = small_config(Algorithm::TDDR);
  cfg.batch_size = 2;
  Agent agent(cfg, 1, 1, 1.0);
  agent.buffer().push({{0.2}, {0.5}, -0.3, {0.25}, false});
  agent.buffer().push({{-0.4}, {-1.0}, -0.5, {-0.5}, true});
  const Agent before = agent;
  SeededRng rng(5);
  const auto d = agent.train_step(rng);
  const auto& u = d.updates[0];
  ASSERT_EQ(u.targets.size(), 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    const Transition& t = agent.buffer().slot(u.batch_indices[r]);
    const double a1 = u.next_actions[0](r, 0), a2 = u.next_actions[1](r, 0);
    // Target actions stay within the noise clip of the target actors' output.
    EXPECT_LE(std::abs(a1 - before.target_actor(0).forward(t.next_state)[0]), 0.5 + 1e-12);
    EXPECT_LE(std::abs(a2 - before.target_actor(1).forward(t.next_state)[0]), 0.5 + 1e-12);
    auto q = [&](int i, double s, double a) { return before.target_critic(i).forward(Vec{s, a})[0]; };
    const oracle::Evals e{q(0, t.next_state[0], a1), q(0, t.next_state[0], a2), q(1, t.next_state[0], a1),
                          q(1, t.next_state[0], a2), q(0, t.state[0], t.action[0]), q(1, t.state[0], t.action[0])};
    const double d1 = oracle::ref_delta1(e, t.reward, cfg.gamma), d2 = oracle::ref_delta2(e, t.reward, cfg.gamma);
    const double y = oracle::ref_target(t.reward, cfg.gamma, t.done, oracle::ref_tddr(e, d1, d2));
    EXPECT_NEAR(u.targets[r], y, 1e-12);
  }
  // Second critic: targets consistent with its own recorded evaluations.
  for (const auto& c : d.updates[1].contexts) {
    const oracle::Evals e{c.evals.q11, c.evals.q12, c.evals.q21, c.evals.q22, c.evals.q1_cur, c.evals.q2_cur};
    EXPECT_EQ(c.delta1, oracle::ref_delta1(e, c.reward, c.gamma));
  }
}

TEST(Agent, UpsilonOneReducesToTddr) {
  auto run = [](Algorithm alg) {
    auto cfg = small_config(alg, 9);
    cfg.upsilon = 1.0;
    Agent agent(cfg, 2, 1, 1.0);
    fill_buffer(agent, 64, 10);
    SeededRng rng(11);
    std::vector<Vec> ys;
    for (int k = 0; k < 10; ++k)
      for (auto& u : agent.train_step(rng).updates) ys.push_back(u.targets);
    return std::pair{ys, Vec(agent.actor(1).params().begin(), agent.actor(1).params().end())};
  };
  const auto ref = run(Algorithm::TDDR);
  for (auto alg : {Algorithm::DADC, Algorithm::DASC, Algorithm::SASC}) EXPECT_EQ(run(alg), ref);
}

TEST(Agent, MirroredActorsGiveClippedDoubleQ) {
  auto cfg = small_config(Algorithm::TDDR);
  cfg.mirror_actors = true;
  Agent agent(cfg, 2, 1, 1.0);
  fill_buffer(agent, 64, 12);
  SeededRng rng(13);
  for (int k = 0; k < 10; ++k)
    for (const auto& u : agent.train_step(rng).updates)
      for (std::size_t r = 0; r < u.contexts.size(); ++r) {
        const auto& c = u.contexts[r];
        EXPECT_EQ(u.psi[r], psi_cdq(c.evals.q11, c.evals.q21));
      }
}

TEST(Agent, TrainStepLeavesFixedEncodersAlone) {
  auto cfg = small_config(Algorithm::SASC_R);
  cfg.swap_period = 1000;
  Agent agent(cfg, 2, 1, 1.0);
  fill_buffer(agent, 64, 14);
  const Agent before = agent;
  SeededRng rng(15);
  const auto d = agent.train_step(rng);
  EXPECT_EQ(agent.encoders()->fixed(), before.encoders()->fixed());
  EXPECT_EQ(agent.encoders()->target_fixed(), before.encoders()->target_fixed());

  // The train generation moved by exactly one encoder step on critic 1's batch.
  EncoderTriple expect = *before.encoders();
  std::vector<const Transition*> rows;
  for (auto idx : d.updates[0].batch_indices) rows.push_back(&agent.buffer().slot(idx));
  const Batch b = make_batch(rows);
  EXPECT_EQ(expect.train_step(b.states, b.actions, b.next_states), *d.encoder_loss);
  EXPECT_EQ(agent.encoders()->train(), expect.train());
}

TEST(Agent, RepresentationAgentSwapsOncePerStep) {
  auto cfg = small_config(Algorithm::DADC_R);
  cfg.swap_period = 3;
  Agent agent(cfg, 2, 1, 1.0);
  fill_buffer(agent, 64, 16);
  SeededRng rng(17);
  for (int k = 1; k <= 9; ++k) EXPECT_EQ(agent.train_step(rng).encoders_swapped, k % 3 == 0);
  EXPECT_EQ(agent.encoders()->swap_count(), 3u);
}

TEST(Agent, TargetDriftBound) {
  for (auto alg : {Algorithm::TDDR, Algorithm::TD3, Algorithm::DASC_R}) {
    Agent agent(small_config(alg), 2, 1, 1.0);
    fill_buffer(agent, 64, 18);
    SeededRng rng(19);
    agent.train_step(rng);
    const Agent before = agent;
    agent.train_step(rng);
    const double tau = agent.config().tau;
    for (std::size_t i = 0; i < agent.num_critics(); ++i) {
      std::span<const double> tn = agent.target_critic(i).params(), to = before.target_critic(i).params(),
                              on = agent.critic(i).params();
      for (std::size_t k = 0; k < tn.size(); ++k)
        ASSERT_LE(std::abs(tn[k] - to[k]), tau * std::abs(on[k] - to[k]) * (1 + 1e-9) + 1e-15);
    }
  }
}

TEST(Agent, SeededDeterminism) {
  auto run = [] {
    Agent agent(small_config(Algorithm::DASC_R, 21), 2, 1, 1.0);
    fill_buffer(agent, 64, 22);
    SeededRng rng(23);
    std::vector<Vec> out;
    for (int k = 0; k < 5; ++k) {
      auto d = agent.train_step(rng);
      for (auto& u : d.updates) {
        out.push_back(u.targets);
        out.push_back({u.critic_loss, u.actor_loss});
      }
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(SoftUpdate, Examples) {
  Vec t{0.0}, o{1.0};
  soft_update(t, o, 0.005);
  EXPECT_EQ(t[0], 0.005);
  soft_update(t, o, 1.0);
  EXPECT_EQ(t[0], 1.0);
  Vec bad{1.0, 2.0};
  EXPECT_THROW(soft_update(bad, o, 0.5), ShapeError);
  EXPECT_THROW(soft_update(t, o, 0.0), std::domain_error);
}

TEST(SoftUpdate, GeometricConvergence) {
  Vec t{0.0}, o{1.0};
  double err = 1.0;
  for (int k = 0; k < 200; ++k) {
    soft_update(t, o, 0.05);
    EXPECT_NEAR(1.0 - t[0], err * 0.95, 1e-14);
    err = 1.0 - t[0];
  }
}

TEST(EvaluatePolicy, ConstantRewardAndRepeatability) {
  LinearTrack lt(40);
  SeededRng rng(0);
  // Holding at the origin gives reward 0 each step.
  auto r0 = evaluate_policy([](auto) { return Vec{0.0}; }, lt, 3, rng);
  EXPECT_EQ(r0.mean_return, 0.0);
  Agent agent(small_config(Algorithm::TDDR), 1, 1, 1.0);
  auto r = evaluate_policy(agent, lt, 10, rng);
  ASSERT_EQ(r.episode_returns.size(), 10u);
  for (double x : r.episode_returns) EXPECT_EQ(x, r.episode_returns[0]);
  EXPECT_THROW(evaluate_policy(agent, lt, 0, rng), std::invalid_argument);
}

TEST(EvaluatePolicy, MatchesUndiscountedMonteCarlo) {
  LinearTrack lt;
  Agent agent(small_config(Algorithm::SASC), 1, 1, 1.0);
  SeededRng rng(0);
  const double ev = evaluate_policy(agent, lt, 1, rng).mean_return;
  const double mc = monte_carlo_return(lt, [&](auto s) { return agent.greedy_action(s); }, Vec{0.0}, 1.0, 1, rng);
  EXPECT_NEAR(ev, mc, 1e-12);
}
