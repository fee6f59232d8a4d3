#include "tddr/td_targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tddr {

namespace {

void check_weight(double w, const char* who) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::domain_error(std::string(who) + ": weight must lie in [0, 1]");
}

// Optimistic single-critic term: target critic 1 at the given actor's action.
double critic1_at(const CriticEvals& e, int actor) { return actor == 1 ? e.q11 : e.q12; }

}  // namespace

double CriticEvals::column_min(int actor) const {
  return actor == 1 ? std::min(q11, q21) : std::min(q12, q22);
}

TdDeltas compute_deltas(const CriticEvals& e, double reward, double gamma) {
  const double current = std::min(e.q1_cur, e.q2_cur);
  return {reward + gamma * e.column_min(1) - current, reward + gamma * e.column_min(2) - current};
}

TdContext make_context(const CriticEvals& evals, double reward, double gamma, bool done, double upsilon) {
  TdContext ctx{evals, reward, gamma, done, upsilon, 0.0, 0.0};
  const TdDeltas d = compute_deltas(evals, reward, gamma);
  ctx.delta1 = d.delta1;
  ctx.delta2 = d.delta2;
  return ctx;
}

double psi_ddpg(double q) { return q; }

double psi_cdq(double q1, double q2) { return std::min(q1, q2); }

double psi_tddr(const TdContext& ctx) { return ctx.evals.column_min(ctx.selected_actor()); }

double psi_dadc(const TdContext& ctx) {
  check_weight(ctx.upsilon, "psi_dadc");
  const int sel = ctx.selected_actor();
  const int other = 3 - sel;
  return ctx.upsilon * ctx.evals.column_min(sel) + (1.0 - ctx.upsilon) * ctx.evals.column_min(other);
}

double psi_dasc(const TdContext& ctx) {
  check_weight(ctx.upsilon, "psi_dasc");
  const int sel = ctx.selected_actor();
  return ctx.upsilon * ctx.evals.column_min(sel) + (1.0 - ctx.upsilon) * critic1_at(ctx.evals, 3 - sel);
}

double psi_sasc(const TdContext& ctx) {
  check_weight(ctx.upsilon, "psi_sasc");
  const int sel = ctx.selected_actor();
  return ctx.upsilon * ctx.evals.column_min(sel) + (1.0 - ctx.upsilon) * critic1_at(ctx.evals, sel);
}

double psi_darc_ref(const CriticEvals& e, double nu) {
  check_weight(nu, "psi_darc_ref");
  const double c1 = e.column_min(1), c2 = e.column_min(2);
  return (1.0 - nu) * std::max(c1, c2) + nu * std::min(c1, c2);
}

double psi_min4_ref(const CriticEvals& e) { return std::min({e.q11, e.q12, e.q21, e.q22}); }

double td_target(double reward, double gamma, bool done, double psi) {
  return done ? reward : reward + gamma * psi;
}

}  // namespace tddr
