#pragma once

// Straight-line transcriptions of the target constructions, written from the
// formulas without sharing code with the library.

#include <algorithm>
#include <cmath>

namespace oracle {

struct Evals {
  double q11, q12, q21, q22, q1c, q2c;
};

inline double ref_delta1(const Evals& e, double r, double g) {
  return r + g * std::min(e.q11, e.q21) - std::min(e.q1c, e.q2c);
}
inline double ref_delta2(const Evals& e, double r, double g) {
  return r + g * std::min(e.q12, e.q22) - std::min(e.q1c, e.q2c);
}

inline bool first_selected(double d1, double d2) { return std::fabs(d1) <= std::fabs(d2); }

inline double ref_tddr(const Evals& e, double d1, double d2) {
  if (first_selected(d1, d2)) return std::min(e.q11, e.q21);
  return std::min(e.q12, e.q22);
}

inline double ref_dadc(const Evals& e, double d1, double d2, double u) {
  const double m1 = std::min(e.q11, e.q21);
  const double m2 = std::min(e.q12, e.q22);
  if (first_selected(d1, d2)) return u * m1 + (1 - u) * m2;
  return u * m2 + (1 - u) * m1;
}

inline double ref_dasc(const Evals& e, double d1, double d2, double u) {
  if (first_selected(d1, d2)) return u * std::min(e.q11, e.q21) + (1 - u) * e.q12;
  return u * std::min(e.q12, e.q22) + (1 - u) * e.q11;
}

inline double ref_sasc(const Evals& e, double d1, double d2, double u) {
  if (first_selected(d1, d2)) return u * std::min(e.q11, e.q21) + (1 - u) * e.q11;
  return u * std::min(e.q12, e.q22) + (1 - u) * e.q12;
}

inline double ref_darc(const Evals& e, double nu) {
  const double c1 = std::min(e.q11, e.q21);
  const double c2 = std::min(e.q12, e.q22);
  return (1 - nu) * std::max(c1, c2) + nu * std::min(c1, c2);
}

inline double ref_min4(const Evals& e) { return std::min(std::min(e.q11, e.q12), std::min(e.q21, e.q22)); }

inline double ref_target(double r, double g, bool done, double psi) { return done ? r : r + g * psi; }

}  // namespace oracle
