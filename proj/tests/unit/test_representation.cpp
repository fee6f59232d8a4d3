#include <gtest/gtest.h>

#include <cmath>

#include "oracles/finite_difference.hpp"
#include "oracles/naive_mlp.hpp"
#include "tddr/env/continuous_env.hpp"
#include "tddr/representation.hpp"

using namespace tddr;

namespace {

Vec naive_state_embedding(const EncoderPair& p, const Vec& s) {
  auto out = oracle::naive_forward(p.state_encoder.layer_dims(),
                                   {p.state_encoder.params().begin(), p.state_encoder.params().end()}, false, 1.0, s)
                 .output;
  double m = 0.0;
  for (double v : out) m += std::abs(v);
  m /= out.size();
  if (m < 1e-8) return out;
  for (double& v : out) v /= m;
  return out;
}

Matrix random_matrix(SeededRng& rng, std::size_t r, std::size_t c, double lo = -1, double hi = 1) {
  Matrix m(r, c);
  for (double& v : m.flat()) v = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST(Encoders, ZeroWeightsGiveZeroEmbeddings) {
  auto p = EncoderPair::create(3, 2, 8, 16, nullptr);
  EXPECT_EQ(encode_state(p, Vec{1, 2, 3}), Vec(8, 0.0));
  EXPECT_EQ(encode_state_action(p, Vec(8, 0.3), Vec{1, -1}), Vec(8, 0.0));
}

TEST(Encoders, StateEmbeddingHasUnitMeanAbs) {
  SeededRng rng(1);
  auto p = EncoderPair::create(3, 2, 8, 16, &rng);
  for (int i = 0; i < 100; ++i) {
    auto e = encode_state(p, Vec{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
    double m = 0.0;
    for (double v : e) m += std::abs(v);
    EXPECT_NEAR(m / e.size(), 1.0, 1e-12);
  }
}

TEST(Encoders, MatchStraightLineEvaluation) {
  SeededRng rng(2);
  auto p = EncoderPair::create(4, 2, 6, 12, &rng);
  Vec s{0.1, -0.4, 1.3, 2.0}, a{0.5, -0.25};
  auto e_s = encode_state(p, s);
  auto want = naive_state_embedding(p, s);
  for (std::size_t k = 0; k < e_s.size(); ++k) EXPECT_NEAR(e_s[k], want[k], 1e-12);

  Vec in = e_s;
  in.insert(in.end(), a.begin(), a.end());
  auto want_sa = oracle::naive_forward(p.state_action_encoder.layer_dims(),
                                       {p.state_action_encoder.params().begin(), p.state_action_encoder.params().end()},
                                       false, 1.0, in)
                     .output;
  auto e_sa = encode_state_action(p, e_s, a);
  ASSERT_EQ(e_sa.size(), 6u);
  for (std::size_t k = 0; k < e_sa.size(); ++k) EXPECT_NEAR(e_sa[k], want_sa[k], 1e-12);
}

TEST(Encoders, ShapeErrors) {
  auto p = EncoderPair::create(3, 2, 4, 8, nullptr);
  EXPECT_THROW(encode_state(p, Vec{1, 2}), ShapeError);
  EXPECT_THROW(encode_state_action(p, Vec(4, 0.0), Vec{1}), ShapeError);
}

TEST(EncoderLoss, FixedPointAndScalarExample) {
  // Scalar embedding; E_sa forced to output its first input (e_s) so that
  // e_sa == e_s' whenever s == s'.
  auto p = EncoderPair::create(1, 1, 1, 1, nullptr);
  p.state_encoder = Mlp({1, 1});
  p.state_encoder.weights(0)[0] = 1.0;
  p.state_action_encoder = Mlp({2, 1});
  p.state_action_encoder.weights(0)[0] = 1.0;
  Matrix s(1, 1, 2.0), a(1, 1, 0.3);
  auto l = encoder_loss_and_grads(p, s, a, s);
  EXPECT_EQ(l.loss, 0.0);
  for (double g : l.state_encoder_grads) EXPECT_EQ(g, 0.0);
  for (double g : l.state_action_encoder_grads) EXPECT_EQ(g, 0.0);

  // e_sa = 1 via bias, e_s' = 0 from a zero state encoder output.
  auto q = EncoderPair::create(1, 1, 1, 1, nullptr);
  q.state_encoder = Mlp({1, 1});
  q.state_action_encoder = Mlp({2, 1});
  q.state_action_encoder.biases(0)[0] = 1.0;
  EXPECT_EQ(encoder_loss_and_grads(q, s, a, s).loss, 1.0);
}

TEST(EncoderLoss, EmptyBatchThrows) {
  auto p = EncoderPair::create(1, 1, 2, 2, nullptr);
  EXPECT_THROW(encoder_loss_and_grads(p, Matrix(0, 1), Matrix(0, 1), Matrix(0, 1)), std::domain_error);
}

TEST(EncoderLoss, GradientsMatchFiniteDifferences) {
  SeededRng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = EncoderPair::create(3, 2, 5, 8, &rng);
    const Matrix s = random_matrix(rng, 6, 3), a = random_matrix(rng, 6, 2), s2 = random_matrix(rng, 6, 3);
    const Matrix target = encode_states(p, s2);
    auto l = encoder_loss_and_grads(p, s, a, s2);
    // The stop-gradient target is held fixed while the online path is perturbed.
    auto loss = [&] {
      const Matrix e_s = encode_states(p, s);
      const Matrix e_sa = encode_state_actions(p, e_s, a);
      double sum = 0.0;
      for (std::size_t k = 0; k < e_sa.flat().size(); ++k) {
        const double d = e_sa.flat()[k] - target.flat()[k];
        sum += d * d;
      }
      return sum / e_sa.flat().size();
    };
    EXPECT_NEAR(loss(), l.loss, 1e-14);
    auto fd_es = oracle::central_difference(loss, p.state_encoder.params());
    auto fd_esa = oracle::central_difference(loss, p.state_action_encoder.params());
    EXPECT_LE(oracle::max_relative_error(l.state_encoder_grads, fd_es), 1e-4);
    EXPECT_LE(oracle::max_relative_error(l.state_action_encoder_grads, fd_esa), 1e-4);
  }
}

TEST(EncoderTriple, SwapSchedule) {
  SeededRng rng(4);
  EncoderTriple t(EncoderPair::create(2, 1, 4, 8, &rng), 250, AdamConfig{});
  const EncoderPair initial = t.fixed();
  const Matrix s = random_matrix(rng, 8, 2), a = random_matrix(rng, 8, 1), s2 = random_matrix(rng, 8, 2);
  t.train_step(s, a, s2);
  for (int i = 0; i < 249; ++i) {
    EXPECT_FALSE(t.maybe_swap());
    EXPECT_EQ(t.fixed(), initial);
    EXPECT_EQ(t.target_fixed(), initial);
  }
  const EncoderPair trained = t.train();
  EXPECT_TRUE(t.maybe_swap());
  EXPECT_EQ(t.fixed(), trained);
  EXPECT_EQ(t.target_fixed(), initial);
}

TEST(EncoderTriple, FrozenTrainPropagates) {
  SeededRng rng(5);
  EncoderTriple t(EncoderPair::create(2, 1, 4, 8, &rng), 3, AdamConfig{});
  t.train_step(random_matrix(rng, 4, 2), random_matrix(rng, 4, 1), random_matrix(rng, 4, 2));
  for (int i = 0; i < 6; ++i) t.maybe_swap();
  EXPECT_EQ(t.swap_count(), 2u);
  EXPECT_EQ(t.fixed(), t.target_fixed());
  EXPECT_EQ(t.fixed(), t.train());
}

TEST(EncoderTriple, TrainingLeavesFrozenGenerations) {
  SeededRng rng(6);
  EncoderTriple t(EncoderPair::create(2, 1, 4, 8, &rng), 1000, AdamConfig{});
  const EncoderPair f = t.fixed(), tf = t.target_fixed();
  for (int i = 0; i < 20; ++i)
    t.train_step(random_matrix(rng, 4, 2), random_matrix(rng, 4, 1), random_matrix(rng, 4, 2));
  EXPECT_EQ(t.fixed(), f);
  EXPECT_EQ(t.target_fixed(), tf);
  EXPECT_NE(t.train(), f);
}

TEST(EncoderTriple, LearnsLinearTrackDynamics) {
  SeededRng rng(7);
  EncoderTriple t(EncoderPair::create(1, 1, 16, 64, &rng), 250, AdamConfig{});
  LinearTrack env;
  auto batch = [&] {
    Matrix s(64, 1), a(64, 1), s2(64, 1);
    for (std::size_t r = 0; r < 64; ++r) {
      s(r, 0) = rng.uniform(-2, 2);
      a(r, 0) = rng.uniform(-1, 1);
      env.restart();
      s2(r, 0) = env.step(s.row(r), a.row(r)).next_state[0];
    }
    return std::tuple{s, a, s2};
  };
  auto [s0, a0, n0] = batch();
  const double first = t.train_step(s0, a0, n0);
  double last = first;
  for (int i = 1; i < 2000; ++i) {
    auto [s, a, n] = batch();
    last = t.train_step(s, a, n);
  }
  EXPECT_LE(last, 0.5 * first);
}
