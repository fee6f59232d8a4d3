#include "tddr/numerics/adam.hpp"

#include <cmath>

namespace tddr {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  require_shape(params.size() == grads.size() && params.size() == state.first_moment.size() &&
                    params.size() == state.second_moment.size(),
                "adam_step: parameter, gradient and moment sizes differ");
  const AdamConfig& c = state.config;
  if (c.lr < 0.0) throw std::domain_error("adam_step: negative learning rate");
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  double* m = state.first_moment.data();
  double* v = state.second_moment.data();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g;
    v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
    const double m_hat = m[k] / correction1;
    const double v_hat = v[k] / correction2;
    params[k] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace tddr
