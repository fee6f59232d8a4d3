#include <gtest/gtest.h>

#include "tddr/tabular.hpp"

using namespace tddr;

namespace {

TabularMdp single_state(std::size_t n_actions, double r, double gamma) {
  TabularMdp m;
  m.n_states = 1;
  m.n_actions = n_actions;
  m.gamma = gamma;
  m.transitions.assign(n_actions, 1.0);
  m.rewards.assign(n_actions, r);
  return m;
}

}  // namespace

TEST(ValueIteration, SingleStateGeometric) {
  auto q = value_iteration(single_state(1, 0.7, 0.9), 1e-12);
  EXPECT_NEAR(q(0, 0), 7.0, 1e-10);
}

TEST(ValueIteration, GammaZeroIsRewardTable) {
  SeededRng rng(2);
  auto mdp = make_random_mdp(rng, 4, 3, 0.0);
  auto q = value_iteration(mdp, 1e-12);
  EXPECT_EQ(q.values, mdp.rewards);
}

TEST(ValueIteration, ContractionRate) {
  SeededRng rng(5);
  auto mdp = make_random_mdp(rng, 6, 3, 0.9);
  auto tr = value_iteration_trace(mdp, 1e-10);
  for (std::size_t k = 1; k < tr.sup_deltas.size(); ++k)
    EXPECT_LE(tr.sup_deltas[k], mdp.gamma * tr.sup_deltas[k - 1] + 1e-12);
}

TEST(ValueIteration, RejectsNonPositiveTol) {
  EXPECT_THROW(value_iteration(single_state(1, 1, 0.5), 0.0), std::domain_error);
}

TEST(TabularVariant, SingleStateSingleActionConverges) {
  auto mdp = single_state(1, 1.0, 0.5);
  for (auto alg : {Algorithm::TDDR, Algorithm::DADC, Algorithm::DASC, Algorithm::SASC})
    for (double u : {0.0, 0.5, 1.0}) {
      SeededRng rng(1);
      auto q = tabular_variant_train(mdp, alg, u, default_tabular_lr, 20000, rng);
      EXPECT_NEAR(q(0, 0), 2.0, 1e-2);
    }
}

TEST(TabularVariant, UpsilonOneReducesToTddr) {
  SeededRng m(3);
  auto mdp = make_random_mdp(m, 4, 3, 0.9);
  SeededRng r0(9);
  const auto ref = tabular_variant_train(mdp, Algorithm::TDDR, 1.0, default_tabular_lr, 20000, r0);
  for (auto alg : {Algorithm::DADC, Algorithm::DASC, Algorithm::SASC}) {
    SeededRng r(9);
    EXPECT_EQ(tabular_variant_train(mdp, alg, 1.0, default_tabular_lr, 20000, r), ref);
  }
}

TEST(TabularVariant, ConvergesOnRandomMdp) {
  SeededRng m(4);
  auto mdp = make_random_mdp(m, 5, 3, 0.9);
  const auto qstar = value_iteration(mdp, 1e-12);
  SeededRng rng(8);
  auto q = tabular_variant_train(mdp, Algorithm::DADC, 0.5, default_tabular_lr, 500000, rng);
  EXPECT_LE(sup_distance(q, qstar), 0.05 * (1 + qstar.max_abs()));
}

TEST(TabularVariant, RejectsOtherAlgorithms) {
  SeededRng rng(0);
  auto mdp = single_state(2, 1, 0.5);
  EXPECT_THROW(tabular_variant_train(mdp, Algorithm::TD3, 1.0, default_tabular_lr, 10, rng), std::invalid_argument);
  EXPECT_THROW(tabular_variant_train(mdp, Algorithm::SASC, 1.5, default_tabular_lr, 10, rng), std::domain_error);
}

TEST(TabularLr, Schedule) {
  EXPECT_EQ(default_tabular_lr(0), 1.0);
  EXPECT_NEAR(default_tabular_lr(31), std::pow(32.0, -0.6), 1e-15);
}
