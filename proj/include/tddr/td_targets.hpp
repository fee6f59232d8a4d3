#pragma once

// Next-state value constructions (psi) and TD targets for every algorithm in
// the family. All functions are pure.
//
// Naming: q_ij = Q'_i(s', a'_j) is target critic i evaluated at the action of
// target actor j, and q{i}_cur = Q'_i(s, a) at the stored transition. The
// "column" minimum m_j = min(q_1j, q_2j) is the clipped double-Q value of
// actor j's action.

#include <cmath>

namespace tddr {

struct CriticEvals {
  double q11 = 0.0, q12 = 0.0, q21 = 0.0, q22 = 0.0;
  double q1_cur = 0.0, q2_cur = 0.0;

  double column_min(int actor) const;  // actor is 1 or 2

  friend bool operator==(const CriticEvals&, const CriticEvals&) = default;
};

struct TdDeltas {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct TdContext {
  CriticEvals evals;
  double reward = 0.0;
  double gamma = 0.99;
  bool done = false;
  double upsilon = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  // Actor whose target TD error is smaller in magnitude; ties go to actor 1.
  int selected_actor() const { return std::abs(delta1) <= std::abs(delta2) ? 1 : 2; }
};

// delta_i = r + gamma * min_j Q'_j(s', a'_i) - min_j Q'_j(s, a)
TdDeltas compute_deltas(const CriticEvals& evals, double reward, double gamma);

// Builds a context with deltas filled in.
TdContext make_context(const CriticEvals& evals, double reward, double gamma, bool done, double upsilon);

double psi_ddpg(double q);
double psi_cdq(double q1, double q2);
double psi_tddr(const TdContext& ctx);
// The three convex combinations. Throw std::domain_error for upsilon outside [0, 1].
double psi_dadc(const TdContext& ctx);
double psi_dasc(const TdContext& ctx);
double psi_sasc(const TdContext& ctx);
// Reference operators from the double-actor literature.
double psi_darc_ref(const CriticEvals& evals, double nu);
double psi_min4_ref(const CriticEvals& evals);

// y = r + gamma * (1 - done) * psi
double td_target(double reward, double gamma, bool done, double psi);

}  // namespace tddr
