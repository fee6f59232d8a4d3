#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tddr/env/continuous_env.hpp"
#include "tddr/env/monte_carlo.hpp"
#include "tddr/env/tabular_mdp.hpp"
#include "tddr/errors.hpp"
#include "tddr/tabular.hpp"

using namespace tddr;

namespace {

// Reward 1 forever; never terminal.
class ConstantEnv final : public ContinuousEnv {
 public:
  explicit ConstantEnv(std::size_t h, double r = 1.0) : h_(h), r_(r) {}
  std::string_view name() const override { return "constant"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t action_dim() const override { return 1; }
  double action_bound() const override { return 1.0; }
  std::size_t horizon() const override { return h_; }
  std::unique_ptr<ContinuousEnv> clone() const override { return std::make_unique<ConstantEnv>(*this); }

 protected:
  Vec initial_state(SeededRng&) const override { return {0.0}; }
  Vec transition(std::span<const double> s, std::span<const double>) const override { return {s[0]}; }
  double reward(std::span<const double>, std::span<const double>, std::span<const double>) const override {
    return r_;
  }

 private:
  std::size_t h_;
  double r_;
};

}  // namespace

TEST(Env, ResetExamples) {
  Pendulum1D pend;
  SeededRng a(0), b(0);
  EXPECT_EQ(pend.reset(a), pend.reset(b));

  PointReach pr;
  SeededRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto s = pr.reset(rng);
    EXPECT_GE(s[0], -1.0);
    EXPECT_LE(s[0], 1.0);
    EXPECT_GE(s[1], -1.0);
    EXPECT_LE(s[1], 1.0);
  }

  LinearTrack lt;
  EXPECT_EQ(lt.reset(rng), Vec{0.0});
}

TEST(Env, LinearTrackClosedForm) {
  LinearTrack lt;
  auto r = lt.step(Vec{0.0}, Vec{1.0});
  EXPECT_NEAR(r.next_state[0], 0.1, 1e-15);
  EXPECT_NEAR(r.reward, -0.1, 1e-15);
  EXPECT_FALSE(r.done);
}

TEST(Env, PendulumUprightRestIsFixedAndOptimal) {
  Pendulum1D pend;
  const Vec up = Pendulum1D::state_from_angle(0.0, 0.0);
  auto r = pend.step(up, Vec{0.0});
  EXPECT_EQ(r.next_state, up);
  EXPECT_EQ(r.reward, 0.0);  // reward is -(cost), cost >= 0
  SeededRng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto s = Pendulum1D::state_from_angle(rng.uniform(-3, 3), rng.uniform(-8, 8));
    EXPECT_LE(pend.step(s, Vec{rng.uniform(-2, 2)}).reward, 0.0);
  }
}

TEST(Env, PointReachRewardRecomputes) {
  PointReach pr;
  SeededRng rng(5);
  Vec s = pr.reset(rng);
  for (int t = 0; t < 100; ++t) {
    auto r = pr.step(s, Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const double dx = r.next_state[0] - 3.0, dy = r.next_state[1] - 3.0;
    EXPECT_NEAR(r.reward, -std::sqrt(dx * dx + dy * dy), 1e-15);
    s = r.next_state;
  }
}

TEST(Env, PointReachTerminatesAtGoal) {
  PointReach pr;
  auto r = pr.step(Vec{2.95, 3.0}, Vec{0.5, 0.0});
  EXPECT_TRUE(r.terminal);
  EXPECT_TRUE(r.done);
}

TEST(Env, HorizonSetsDoneButNotTerminal) {
  LinearTrack lt(5);
  SeededRng rng(0);
  Vec s = lt.reset(rng);
  StepResult r;
  for (int t = 0; t < 5; ++t) {
    r = lt.step(s, Vec{0.2});
    s = r.next_state;
    EXPECT_EQ(r.done, t == 4);
  }
  EXPECT_FALSE(r.terminal);
}

TEST(Env, ShapeErrors) {
  LinearTrack lt;
  EXPECT_THROW(lt.step(Vec{0.0, 1.0}, Vec{0.0}), ShapeError);
  EXPECT_THROW(lt.step(Vec{0.0}, Vec{0.0, 1.0}), ShapeError);
}

TEST(Env, SameActionsSameTrajectory) {
  for (auto id : {EnvId::LinearTrack, EnvId::PointReach, EnvId::Pendulum}) {
    auto e1 = make_env(id), e2 = make_env(id);
    SeededRng r1(9), r2(9), acts(4);
    Vec s1 = e1->reset(r1), s2 = e2->reset(r2);
    for (int t = 0; t < 50; ++t) {
      Vec a(e1->action_dim());
      for (double& v : a) v = acts.uniform(-1, 1);
      auto x = e1->step(s1, a), y = e2->step(s2, a);
      ASSERT_EQ(x.next_state, y.next_state);
      ASSERT_EQ(x.reward, y.reward);
      s1 = x.next_state;
      s2 = y.next_state;
    }
  }
}

TEST(Env, ParseIds) {
  EXPECT_EQ(parse_env_id("pendulum"), EnvId::Pendulum);
  EXPECT_EQ(env_id_name(EnvId::PointReach), "point_reach");
  EXPECT_THROW(parse_env_id("cartpole"), ConfigError);
}

TEST(MonteCarlo, ConstantRewardGeometricSeries) {
  ConstantEnv env(50, 2.0);
  SeededRng rng(0);
  const double g = 0.9;
  const double got = monte_carlo_return(env, [](auto) { return Vec{0.0}; }, Vec{0.0}, g, 3, rng);
  EXPECT_NEAR(got, 2.0 * (1 - std::pow(g, 50)) / (1 - g), 1e-12);
}

TEST(MonteCarlo, GammaZeroIsImmediateReward) {
  LinearTrack lt;
  SeededRng rng(0);
  EXPECT_NEAR(monte_carlo_return(lt, [](auto) { return Vec{1.0}; }, Vec{0.5}, 0.0, 1, rng), -0.6, 1e-15);
}

TEST(MonteCarlo, LinearTrackHandUnrolled) {
  LinearTrack lt(10);
  SeededRng rng(0);
  auto policy = [](std::span<const double> s) { return Vec{-0.5 * s[0]}; };
  const double g = 0.95;
  double s = 1.0, want = 0.0, disc = 1.0;
  for (int t = 0; t < 10; ++t) {
    s = s + 0.1 * (-0.5 * s);
    want += disc * -std::abs(s);
    disc *= g;
  }
  auto est = monte_carlo_estimate(lt, policy, Vec{1.0}, g, 2, rng);
  EXPECT_NEAR(est.mean_return, want, 1e-12);
  EXPECT_GT(est.truncation_bound, 0.0);
}

TEST(TabularMdp, RowsNormalized) {
  SeededRng rng(1);
  for (int i = 0; i < 50; ++i) {
    auto mdp = make_random_mdp(rng, 2 + rng.index(8), 2 + rng.index(8), 0.9, i % 2 == 0);
    EXPECT_LE(mdp.max_row_error(), 1e-12);
    for (double r : mdp.rewards) {
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
    }
  }
}

TEST(TabularMdp, SeedDeterministic) {
  SeededRng a(7), b(7);
  auto x = make_random_mdp(a, 5, 3, 0.9), y = make_random_mdp(b, 5, 3, 0.9);
  EXPECT_EQ(x.transitions, y.transitions);
  EXPECT_EQ(x.rewards, y.rewards);
}

TEST(TabularMdp, DeterministicTwoStateMatchesHandSolution) {
  SeededRng rng(11);
  auto mdp = make_random_mdp(rng, 2, 2, 0.8, true);
  // Enumerate the four deterministic policies and solve each 2x2 system
  // V = R_pi + gamma P_pi V in closed form; Q* is the best policy's Q.
  double best_v[2] = {-1e300, -1e300};
  for (int pol = 0; pol < 4; ++pol) {
    const std::size_t a0 = pol & 1, a1 = pol >> 1;
    const std::size_t n0 = mdp.p(0, a0, 0) == 1.0 ? 0 : 1;
    const std::size_t n1 = mdp.p(1, a1, 0) == 1.0 ? 0 : 1;
    const double g = mdp.gamma, r0 = mdp.r(0, a0), r1 = mdp.r(1, a1);
    // [1 - g*[n0==0], -g*[n0==1]; -g*[n1==0], 1 - g*[n1==1]] V = [r0; r1]
    const double a = 1 - g * (n0 == 0), b = -g * (n0 == 1), c = -g * (n1 == 0), d = 1 - g * (n1 == 1);
    const double det = a * d - b * c;
    const double v0 = (r0 * d - b * r1) / det, v1 = (a * r1 - c * r0) / det;
    best_v[0] = std::max(best_v[0], v0);
    best_v[1] = std::max(best_v[1], v1);
  }
  auto q = value_iteration(mdp, 1e-13);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t act = 0; act < 2; ++act) {
      const std::size_t next = mdp.p(s, act, 0) == 1.0 ? 0 : 1;
      EXPECT_NEAR(q(s, act), mdp.r(s, act) + mdp.gamma * best_v[next], 1e-10);
    }
  }
}

TEST(TabularMdp, RejectsTinyMdp) {
  SeededRng rng(0);
  EXPECT_THROW(make_random_mdp(rng, 1, 3, 0.9), std::domain_error);
}
