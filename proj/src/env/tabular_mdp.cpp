#include "tddr/env/tabular_mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace tddr {

std::size_t TabularMdp::sample_next(std::size_t s, std::size_t a, SeededRng& rng) const {
  const double u = rng.uniform();
  double cum = 0.0;
  const double* row = transitions.data() + (s * n_actions + a) * n_states;
  for (std::size_t k = 0; k < n_states; ++k) {
    cum += row[k];
    if (u < cum) return k;
  }
  // Rounding can leave cum slightly below 1; fall back to the last reachable state.
  for (std::size_t k = n_states; k-- > 0;)
    if (row[k] > 0.0) return k;
  return n_states - 1;
}

double TabularMdp::max_row_error() const {
  double worst = 0.0;
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n_states; ++k) sum += transitions[sa * n_states + k];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

TabularMdp make_random_mdp(SeededRng& rng, std::size_t n_states, std::size_t n_actions, double gamma,
                           bool deterministic) {
  if (n_states < 2 || n_actions < 2) throw std::domain_error("make_random_mdp: need >= 2 states and actions");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::domain_error("make_random_mdp: gamma must be in [0, 1)");
  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.transitions.assign(n_states * n_actions * n_states, 0.0);
  mdp.rewards.assign(n_states * n_actions, 0.0);
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    double* row = mdp.transitions.data() + sa * n_states;
    if (deterministic) {
      row[rng.index(n_states)] = 1.0;
    } else {
      double total = 0.0;
      for (std::size_t k = 0; k < n_states; ++k) total += row[k] = 1.0 - rng.uniform();
      for (std::size_t k = 0; k < n_states; ++k) row[k] /= total;
    }
    mdp.rewards[sa] = rng.uniform();
  }
  return mdp;
}

}  // namespace tddr
