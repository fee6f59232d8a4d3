#pragma once

#include <cstddef>
#include <functional>

#include "tddr/algorithm.hpp"
#include "tddr/env/tabular_mdp.hpp"

namespace tddr {

struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  Vec values;  // row-major [s][a]

  QTable() = default;
  QTable(std::size_t ns, std::size_t na, double fill = 0.0) : n_states(ns), n_actions(na), values(ns * na, fill) {}

  double& operator()(std::size_t s, std::size_t a) { return values[s * n_actions + a]; }
  double operator()(std::size_t s, std::size_t a) const { return values[s * n_actions + a]; }
  double max_abs() const;
  std::size_t argmax(std::size_t s) const;  // first maximizer

  friend bool operator==(const QTable&, const QTable&) = default;
};

double sup_distance(const QTable& a, const QTable& b);

struct ValueIterationResult {
  QTable q;
  Vec sup_deltas;  // ||Q_{k+1} - Q_k||_inf per sweep
};

// Bellman-optimality iteration from Q = 0 until the sup-norm change drops
// below tol. Throws std::domain_error when tol <= 0.
ValueIterationResult value_iteration_trace(const TabularMdp& mdp, double tol);
inline QTable value_iteration(const TabularMdp& mdp, double tol) { return value_iteration_trace(mdp, tol).q; }

// Step size as a function of how often the updated entry was visited before.
using LearningRateSchedule = std::function<double(std::size_t visits)>;
// 1 / (1 + visits)^0.6
double default_tabular_lr(std::size_t visits);

// Tabular double actor-critic: two Q tables, each paired with a greedy actor.
// Every step draws (s, a) uniformly, samples s', forms the algorithm's psi
// from table lookups and updates one critic chosen uniformly at random.
// Returns the elementwise min of the two tables.
// Throws std::invalid_argument for algorithms outside {TDDR, DADC, DASC, SASC}.
QTable tabular_variant_train(const TabularMdp& mdp, Algorithm algorithm, double upsilon,
                             const LearningRateSchedule& lr, std::size_t n_steps, SeededRng& rng);

}  // namespace tddr
