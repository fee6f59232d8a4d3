#include "tddr/env/continuous_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tddr {

Vec ContinuousEnv::reset(SeededRng& rng) {
  elapsed_ = 0;
  return initial_state(rng);
}

StepResult ContinuousEnv::step(std::span<const double> state, std::span<const double> action) {
  require_shape(state.size() == state_dim(), std::string(name()) + ": state has wrong dimension");
  require_shape(action.size() == action_dim(), std::string(name()) + ": action has wrong dimension");
  StepResult out;
  out.next_state = transition(state, action);
  out.reward = reward(state, action, out.next_state);
  ++elapsed_;
  out.terminal = is_terminal(out.next_state);
  out.done = out.terminal || elapsed_ >= horizon();
  return out;
}

Vec LinearTrack::transition(std::span<const double> s, std::span<const double> a) const {
  return {s[0] + kGain * a[0]};
}

double LinearTrack::reward(std::span<const double>, std::span<const double>,
                           std::span<const double> next) const {
  return -std::abs(next[0]);
}

double PointReach::distance_to_goal(std::span<const double> s) {
  return std::hypot(s[0] - kGoalX, s[1] - kGoalY);
}

Vec PointReach::initial_state(SeededRng& rng) const {
  const double x = rng.uniform(-1.0, 1.0);
  const double y = rng.uniform(-1.0, 1.0);
  return {x, y};
}

Vec PointReach::transition(std::span<const double> s, std::span<const double> a) const {
  return {std::clamp(s[0] + kGain * a[0], -kArena, kArena),
          std::clamp(s[1] + kGain * a[1], -kArena, kArena)};
}

double PointReach::reward(std::span<const double>, std::span<const double>,
                          std::span<const double> next) const {
  return -distance_to_goal(next);
}

bool PointReach::is_terminal(std::span<const double> next) const {
  return distance_to_goal(next) < kGoalRadius;
}

namespace {

double wrap_angle(double th) {
  return std::remainder(th, 2.0 * std::numbers::pi);
}

}  // namespace

Vec Pendulum1D::state_from_angle(double theta, double theta_dot) {
  return {std::cos(theta), std::sin(theta), theta_dot};
}

Vec Pendulum1D::initial_state(SeededRng& rng) const {
  const double th = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double th_dot = rng.uniform(-1.0, 1.0);
  return state_from_angle(th, th_dot);
}

Vec Pendulum1D::transition(std::span<const double> s, std::span<const double> a) const {
  const double th = std::atan2(s[1], s[0]);
  const double u = std::clamp(a[0], -action_bound(), action_bound());
  double th_dot = s[2] + (3.0 * kGravity / (2.0 * kLength) * s[1] + 3.0 / (kMass * kLength * kLength) * u) * kDt;
  th_dot = std::clamp(th_dot, -kMaxSpeed, kMaxSpeed);
  return state_from_angle(th + th_dot * kDt, th_dot);
}

double Pendulum1D::reward(std::span<const double> s, std::span<const double> a,
                          std::span<const double>) const {
  const double th = wrap_angle(std::atan2(s[1], s[0]));
  const double u = std::clamp(a[0], -action_bound(), action_bound());
  return -(th * th + 0.1 * s[2] * s[2] + 0.001 * u * u);
}

std::unique_ptr<ContinuousEnv> make_env(EnvId id) {
  switch (id) {
    case EnvId::LinearTrack: return std::make_unique<LinearTrack>();
    case EnvId::PointReach: return std::make_unique<PointReach>();
    case EnvId::Pendulum: return std::make_unique<Pendulum1D>();
  }
  throw std::invalid_argument("make_env: unknown id");
}

EnvId parse_env_id(std::string_view name) {
  if (name == "linear_track") return EnvId::LinearTrack;
  if (name == "point_reach") return EnvId::PointReach;
  if (name == "pendulum") return EnvId::Pendulum;
  throw ConfigError("unknown env '" + std::string(name) + "' (expected linear_track, point_reach, pendulum)");
}

std::string_view env_id_name(EnvId id) {
  switch (id) {
    case EnvId::LinearTrack: return "linear_track";
    case EnvId::PointReach: return "point_reach";
    case EnvId::Pendulum: return "pendulum";
  }
  return "?";
}

}  // namespace tddr
