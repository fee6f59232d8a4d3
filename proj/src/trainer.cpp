#include "tddr/trainer.hpp"

#include <cmath>
#include <string>

#include "tddr/evaluation.hpp"

namespace tddr {

SeededRng stream_rng(std::uint64_t seed, Stream s, std::uint64_t index) {
  return SeededRng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(s)), index));
}

RunLog run_training(Agent& agent, const ContinuousEnv& env_proto, const TrainingSchedule& schedule,
                    const EvalHook& on_eval, const TrainHook& on_train) {
  if (schedule.eval_period == 0) throw std::invalid_argument("run_training: eval_period must be positive");
  const AgentConfig& cfg = agent.config();
  require_shape(env_proto.state_dim() == agent.state_dim() && env_proto.action_dim() == agent.action_dim(),
                "run_training: agent and environment dimensions differ");

  auto env = env_proto.clone();
  auto eval_env = env_proto.clone();
  SeededRng env_rng = stream_rng(cfg.seed, Stream::Env);
  SeededRng act_rng = stream_rng(cfg.seed, Stream::Action);
  SeededRng train_rng = stream_rng(cfg.seed, Stream::Train);
  const double bound = env->action_bound();

  RunLog log{cfg.seed, {}};
  Vec s = env->reset(env_rng);
  for (std::size_t t = 1; t <= schedule.total_steps; ++t) {
    Vec a;
    if (t <= cfg.start_steps) {
      a.resize(env->action_dim());
      for (double& v : a) v = act_rng.uniform(-bound, bound);
    } else {
      a = agent.select_behavior_action(s, act_rng);
    }
    StepResult res = env->step(s, a);
    agent.buffer().push({s, a, res.reward, res.next_state, res.terminal});
    s = res.done ? env->reset(env_rng) : std::move(res.next_state);

    if (t >= cfg.start_steps && agent.ready()) {
      const StepDiagnostics d = agent.train_step(train_rng);
      if (!d.all_finite()) throw NumericError("non-finite training diagnostic at step " + std::to_string(t));
      if (on_train) on_train(t, d);
    }

    if (t % schedule.eval_period == 0) {
      SeededRng eval_rng = stream_rng(cfg.seed, Stream::Eval, t);
      EvalResult ev = evaluate_policy(agent, *eval_env, schedule.eval_episodes, eval_rng);
      EvalRow row{t, ev.mean_return, std::move(ev.episode_returns), {}};
      if (!std::isfinite(row.mean_return)) throw NumericError("non-finite evaluation return at step " + std::to_string(t));
      if (schedule.bias_probe_states > 0) {
        SeededRng bias_rng = stream_rng(cfg.seed, Stream::Bias, t);
        for (const auto& rec : measure_bias(agent, *eval_env, schedule.bias_probe_states, schedule.bias_rollouts,
                                            cfg.gamma, bias_rng))
          row.biases.push_back(rec.bias);
        if (!all_finite(row.biases)) throw NumericError("non-finite bias estimate at step " + std::to_string(t));
      }
      if (on_eval) on_eval(row);
      log.rows.push_back(std::move(row));
    }
  }
  return log;
}

}  // namespace tddr
