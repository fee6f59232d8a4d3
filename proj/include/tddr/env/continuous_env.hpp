#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "tddr/numerics/matrix.hpp"
#include "tddr/numerics/rng.hpp"

namespace tddr {

struct StepResult {
  Vec next_state;
  double reward = 0.0;
  bool done = false;      // episode over, for either reason below
  bool terminal = false;  // terminal predicate fired; bootstrapping stops here
};

// Continuous-control task with closed-form dynamics and reward.
//
// The environment owns only an episode clock. Dynamics are a pure function of
// (state, action) and the only randomness is the initial state drawn from the
// rng passed to reset(), so a seed plus an action sequence fixes a trajectory.
// Actions are expected inside [-action_bound, action_bound]; clipping is the
// caller's job.
class ContinuousEnv {
 public:
  virtual ~ContinuousEnv() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual double action_bound() const = 0;
  virtual std::size_t horizon() const = 0;
  virtual std::unique_ptr<ContinuousEnv> clone() const = 0;

  // Draws an initial state and restarts the episode clock.
  Vec reset(SeededRng& rng);
  // Restarts the clock so an episode can begin from an arbitrary state.
  void restart() { elapsed_ = 0; }
  std::size_t elapsed() const { return elapsed_; }

  StepResult step(std::span<const double> state, std::span<const double> action);

 protected:
  virtual Vec initial_state(SeededRng& rng) const = 0;
  virtual Vec transition(std::span<const double> state, std::span<const double> action) const = 0;
  virtual double reward(std::span<const double> state, std::span<const double> action,
                        std::span<const double> next_state) const = 0;
  virtual bool is_terminal(std::span<const double> /*next_state*/) const { return false; }

 private:
  std::size_t elapsed_ = 0;
};

// 1-D integrator: s' = s + 0.1 a, r = -|s'|. Starts at the origin.
class LinearTrack final : public ContinuousEnv {
 public:
  explicit LinearTrack(std::size_t horizon = 100) : horizon_(horizon) {}

  std::string_view name() const override { return "linear_track"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t action_dim() const override { return 1; }
  double action_bound() const override { return 1.0; }
  std::size_t horizon() const override { return horizon_; }
  std::unique_ptr<ContinuousEnv> clone() const override { return std::make_unique<LinearTrack>(*this); }

  static constexpr double kGain = 0.1;

 protected:
  Vec initial_state(SeededRng&) const override { return {0.0}; }
  Vec transition(std::span<const double> s, std::span<const double> a) const override;
  double reward(std::span<const double>, std::span<const double>,
                std::span<const double> next) const override;

 private:
  std::size_t horizon_;
};

// Planar point moved by velocity commands toward a fixed goal.
// s' = clamp(s + 0.1 a, -4, 4), r = -||s' - goal||; terminal within 0.1 of
// the goal. Starts uniformly in [-1, 1]^2; the goal (3, 3) lies outside.
class PointReach final : public ContinuousEnv {
 public:
  explicit PointReach(std::size_t horizon = 100) : horizon_(horizon) {}

  std::string_view name() const override { return "point_reach"; }
  std::size_t state_dim() const override { return 2; }
  std::size_t action_dim() const override { return 2; }
  double action_bound() const override { return 1.0; }
  std::size_t horizon() const override { return horizon_; }
  std::unique_ptr<ContinuousEnv> clone() const override { return std::make_unique<PointReach>(*this); }

  static constexpr double kGain = 0.1;
  static constexpr double kArena = 4.0;
  static constexpr double kGoalX = 3.0;
  static constexpr double kGoalY = 3.0;
  static constexpr double kGoalRadius = 0.1;

  static double distance_to_goal(std::span<const double> s);

 protected:
  Vec initial_state(SeededRng& rng) const override;
  Vec transition(std::span<const double> s, std::span<const double> a) const override;
  double reward(std::span<const double>, std::span<const double>,
                std::span<const double> next) const override;
  bool is_terminal(std::span<const double> next) const override;

 private:
  std::size_t horizon_;
};

// Torque-limited pendulum swing-up. State [cos th, sin th, th_dot] with th = 0
// upright; reward -(th^2 + 0.1 th_dot^2 + 0.001 u^2), so the upright rest
// point is the reward maximum. Starts at th ~ U(-pi, pi), th_dot ~ U(-1, 1).
class Pendulum1D final : public ContinuousEnv {
 public:
  explicit Pendulum1D(std::size_t horizon = 200) : horizon_(horizon) {}

  std::string_view name() const override { return "pendulum"; }
  std::size_t state_dim() const override { return 3; }
  std::size_t action_dim() const override { return 1; }
  double action_bound() const override { return 2.0; }
  std::size_t horizon() const override { return horizon_; }
  std::unique_ptr<ContinuousEnv> clone() const override { return std::make_unique<Pendulum1D>(*this); }

  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;

  static Vec state_from_angle(double theta, double theta_dot);

 protected:
  Vec initial_state(SeededRng& rng) const override;
  Vec transition(std::span<const double> s, std::span<const double> a) const override;
  double reward(std::span<const double> s, std::span<const double> a,
                std::span<const double> next) const override;

 private:
  std::size_t horizon_;
};

enum class EnvId { LinearTrack, PointReach, Pendulum };

std::unique_ptr<ContinuousEnv> make_env(EnvId id);
EnvId parse_env_id(std::string_view name);  // throws ConfigError
std::string_view env_id_name(EnvId id);

}  // namespace tddr
