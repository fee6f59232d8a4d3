#include "tddr/env/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tddr {

Vec clip_action(std::span<const double> action, double bound) {
  Vec out(action.begin(), action.end());
  for (double& a : out) a = std::clamp(a, -bound, bound);
  return out;
}

MonteCarloEstimate monte_carlo_estimate(ContinuousEnv& env, const Policy& policy,
                                        std::span<const double> start_state, double gamma,
                                        std::size_t n_rollouts, SeededRng& /*rng*/) {
  if (n_rollouts < 1) throw std::domain_error("monte_carlo_return: need at least one rollout");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::domain_error("monte_carlo_return: gamma must be in [0, 1]");
  MonteCarloEstimate est;
  double total = 0.0;
  for (std::size_t k = 0; k < n_rollouts; ++k) {
    env.restart();
    Vec s(start_state.begin(), start_state.end());
    double ret = 0.0, discount = 1.0, max_abs_r = 0.0;
    bool terminal = false;
    for (;;) {
      StepResult res = env.step(s, clip_action(policy(s), env.action_bound()));
      ret += discount * res.reward;
      discount *= gamma;
      max_abs_r = std::max(max_abs_r, std::abs(res.reward));
      s = std::move(res.next_state);
      if (res.done) {
        terminal = res.terminal;
        break;
      }
    }
    total += ret;
    if (!terminal) {
      const double bound = gamma < 1.0 ? discount * max_abs_r / (1.0 - gamma)
                                       : std::numeric_limits<double>::infinity();
      est.truncation_bound = std::max(est.truncation_bound, bound);
    }
  }
  est.mean_return = total / static_cast<double>(n_rollouts);
  return est;
}

}  // namespace tddr
