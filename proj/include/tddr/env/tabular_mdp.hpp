#pragma once

#include <cstddef>

#include "tddr/numerics/matrix.hpp"
#include "tddr/numerics/rng.hpp"

namespace tddr {

// Finite MDP with dense transition tensor P[s][a][s'] and reward table R[s][a].
struct TabularMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double gamma = 0.9;
  Vec transitions;  // n_states * n_actions * n_states
  Vec rewards;      // n_states * n_actions

  double p(std::size_t s, std::size_t a, std::size_t next) const {
    return transitions[(s * n_actions + a) * n_states + next];
  }
  double r(std::size_t s, std::size_t a) const { return rewards[s * n_actions + a]; }

  std::size_t sample_next(std::size_t s, std::size_t a, SeededRng& rng) const;

  // Largest |sum_s' P[s][a][s'] - 1| over all (s, a).
  double max_row_error() const;
};

// Random MDP: rewards U[0, 1], each P[s][a] normalized from U(0, 1] weights,
// or one-hot on a uniformly drawn successor when deterministic is set.
TabularMdp make_random_mdp(SeededRng& rng, std::size_t n_states, std::size_t n_actions, double gamma,
                           bool deterministic = false);

}  // namespace tddr
