#include "tddr/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tddr/td_targets.hpp"

namespace tddr {

double QTable::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

std::size_t QTable::argmax(std::size_t s) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < n_actions; ++a)
    if ((*this)(s, a) > (*this)(s, best)) best = a;
  return best;
}

double sup_distance(const QTable& a, const QTable& b) {
  require_shape(a.n_states == b.n_states && a.n_actions == b.n_actions, "sup_distance: table shapes differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

ValueIterationResult value_iteration_trace(const TabularMdp& mdp, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("value_iteration: tol must be positive");
  const std::size_t ns = mdp.n_states, na = mdp.n_actions;
  ValueIterationResult res{QTable(ns, na), {}};
  Vec v(ns, 0.0);
  for (;;) {
    QTable next(ns, na);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < na; ++a) {
        double ev = 0.0;
        for (std::size_t k = 0; k < ns; ++k) ev += mdp.p(s, a, k) * v[k];
        next(s, a) = mdp.r(s, a) + mdp.gamma * ev;
      }
    const double delta = sup_distance(next, res.q);
    res.q = std::move(next);
    res.sup_deltas.push_back(delta);
    for (std::size_t s = 0; s < ns; ++s) v[s] = res.q(s, res.q.argmax(s));
    if (delta < tol) return res;
  }
}

double default_tabular_lr(std::size_t visits) { return 1.0 / std::pow(1.0 + static_cast<double>(visits), 0.6); }

QTable tabular_variant_train(const TabularMdp& mdp, Algorithm algorithm, double upsilon,
                             const LearningRateSchedule& lr, std::size_t n_steps, SeededRng& rng) {
  if (algorithm != Algorithm::TDDR && algorithm != Algorithm::DADC && algorithm != Algorithm::DASC &&
      algorithm != Algorithm::SASC)
    throw std::invalid_argument("tabular_variant_train: unsupported algorithm");
  if (!(upsilon >= 0.0 && upsilon <= 1.0)) throw std::domain_error("tabular_variant_train: upsilon outside [0, 1]");

  const std::size_t ns = mdp.n_states, na = mdp.n_actions;
  QTable q[2] = {QTable(ns, na), QTable(ns, na)};
  std::vector<std::size_t> visits[2] = {std::vector<std::size_t>(ns * na, 0), std::vector<std::size_t>(ns * na, 0)};

  for (std::size_t t = 0; t < n_steps; ++t) {
    const std::size_t s = rng.index(ns);
    const std::size_t a = rng.index(na);
    const std::size_t next = mdp.sample_next(s, a, rng);
    const std::size_t a1 = q[0].argmax(next);
    const std::size_t a2 = q[1].argmax(next);
    const CriticEvals ev{q[0](next, a1), q[0](next, a2), q[1](next, a1), q[1](next, a2), q[0](s, a), q[1](s, a)};
    const TdContext ctx = make_context(ev, mdp.r(s, a), mdp.gamma, false, upsilon);
    const double y = td_target(ctx.reward, ctx.gamma, false, psi_for(algorithm, ctx));

    const std::size_t i = rng.index(2);
    std::size_t& n = visits[i][s * na + a];
    q[i](s, a) += lr(n) * (y - q[i](s, a));
    ++n;
  }

  QTable out(ns, na);
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = std::min(q[0].values[k], q[1].values[k]);
  return out;
}

}  // namespace tddr
