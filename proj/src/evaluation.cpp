#include "tddr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace tddr {

std::vector<BiasRecord> measure_bias(ContinuousEnv& env, const Policy& behavior, const Policy& greedy,
                                     const ValueFn& value, std::size_t n_probe_states, std::size_t n_rollouts,
                                     double gamma, SeededRng& rng) {
  if (n_probe_states == 0) throw std::invalid_argument("measure_bias: need at least one probe state");
  std::vector<BiasRecord> out;
  out.reserve(n_probe_states);
  for (std::size_t k = 0; k < n_probe_states; ++k) {
    Vec s = env.reset(rng);
    const std::size_t warm = rng.index(env.horizon());
    for (std::size_t t = 0; t < warm; ++t) {
      StepResult res = env.step(s, clip_action(behavior(s), env.action_bound()));
      if (res.done) break;
      s = std::move(res.next_state);
    }
    BiasRecord rec;
    rec.action = clip_action(greedy(s), env.action_bound());
    rec.q_estimate = value(s, rec.action);
    const MonteCarloEstimate mc = monte_carlo_estimate(env, greedy, s, gamma, n_rollouts, rng);
    rec.mc_return = mc.mean_return;
    rec.truncation_bound = mc.truncation_bound;
    rec.bias = rec.q_estimate - rec.mc_return;
    rec.state = std::move(s);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<BiasRecord> measure_bias(const Agent& agent, ContinuousEnv& env, std::size_t n_probe_states,
                                     std::size_t n_rollouts, double gamma, SeededRng& rng) {
  SeededRng noise = SeededRng(mix_seed(rng.next_u64(), 0));
  return measure_bias(
      env, [&](std::span<const double> s) { return agent.select_behavior_action(s, noise); },
      [&](std::span<const double> s) { return agent.greedy_action(s); },
      [&](std::span<const double> s, std::span<const double> a) { return agent.value_estimate(s, a); },
      n_probe_states, n_rollouts, gamma, rng);
}

MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) return {};
  double sum = 0.0;
  for (double x : v) sum += x;
  MeanStd out{sum / static_cast<double>(v.size()), 0.0};
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

namespace {

template <class F>
double tail_mean(const RunLog& log, std::size_t window, F stat) {
  if (log.rows.empty() || window == 0) return 0.0;
  const std::size_t n = std::min(window, log.rows.size());
  double sum = 0.0;
  for (std::size_t k = log.rows.size() - n; k < log.rows.size(); ++k) sum += stat(log.rows[k]);
  return sum / static_cast<double>(n);
}

}  // namespace

double final_window_return(const RunLog& log, std::size_t window) {
  return tail_mean(log, window, [](const EvalRow& r) { return r.mean_return; });
}

double final_window_bias(const RunLog& log, std::size_t window) {
  return tail_mean(log, window, [](const EvalRow& r) { return mean_std(r.biases).mean; });
}

std::size_t SweepResult::best_index() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < points.size(); ++k)
    if (points[k].final_return.mean > points[best].final_return.mean) best = k;
  return best;
}

SweepResult sweep_upsilon(const AgentConfig& base, EnvId env_id, std::span<const double> grid,
                          std::span<const std::uint64_t> seeds, const TrainingSchedule& schedule,
                          std::size_t final_window) {
  for (double u : grid)
    if (!(u >= 0.0 && u <= 1.0)) throw ConfigError("upsilon grid values must lie in [0, 1]");
  if (grid.empty() || seeds.empty()) throw ConfigError("sweep needs a nonempty grid and seed list");

  SweepResult res;
  res.cells.resize(grid.size() * seeds.size());
  const auto proto = make_env(env_id);
  const long n_cells = static_cast<long>(res.cells.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1)
  for (long c = 0; c < n_cells; ++c) {
    try {
      SweepCell& cell = res.cells[c];
      cell.upsilon = grid[c / seeds.size()];
      cell.seed = seeds[c % seeds.size()];
      AgentConfig cfg = base;
      cfg.upsilon = cell.upsilon;
      cfg.seed = cell.seed;
      Agent agent(cfg, proto->state_dim(), proto->action_dim(), proto->action_bound());
      cell.log = run_training(agent, *proto, schedule);
      if (cell.log.rows.empty()) {
        // Nothing trained: score the initial networks so the cell is still populated.
        auto env = proto->clone();
        SeededRng eval_rng = stream_rng(cfg.seed, Stream::Eval, 0);
        cell.final_return = evaluate_policy(agent, *env, std::max<std::size_t>(schedule.eval_episodes, 1), eval_rng).mean_return;
        SeededRng bias_rng = stream_rng(cfg.seed, Stream::Bias, 0);
        Vec b;
        for (const auto& r : measure_bias(agent, *env, std::max<std::size_t>(schedule.bias_probe_states, 1),
                                          std::max<std::size_t>(schedule.bias_rollouts, 1), cfg.gamma, bias_rng))
          b.push_back(r.bias);
        cell.final_bias = mean_std(b).mean;
      } else {
        cell.final_return = final_window_return(cell.log, final_window);
        cell.final_bias = final_window_bias(cell.log, final_window);
      }
    } catch (...) {
#pragma omp critical(sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    Vec rets, biases;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      rets.push_back(res.cells[g * seeds.size() + k].final_return);
      biases.push_back(res.cells[g * seeds.size() + k].final_bias);
    }
    res.points.push_back({grid[g], mean_std(rets), mean_std(biases)});
  }
  return res;
}

}  // namespace tddr
