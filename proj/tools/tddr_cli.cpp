#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "tddr/diagnostics.hpp"
#include "tddr/errors.hpp"
#include "tddr/evaluation.hpp"
#include "tddr/runner.hpp"

namespace {

using namespace tddr;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

struct RunOptions {
  std::string config;
  std::vector<std::uint64_t> seed_override;
  std::string out;
};

ExperimentConfig load_with_overrides(const RunOptions& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.seed_override.empty()) cfg.seeds = o.seed_override;
  if (!o.out.empty()) cfg.output_dir = o.out;
  cfg.validate();
  return cfg;
}

void print_final(const std::vector<RunLog>& logs, bool with_bias) {
  Vec rets, biases;
  for (const auto& log : logs) {
    const double r = final_window_return(log, kFinalWindow);
    rets.push_back(r);
    if (with_bias) {
      const double b = final_window_bias(log, kFinalWindow);
      biases.push_back(b);
      std::printf("seed %llu  final_return %.6g  final_bias %.6g\n", static_cast<unsigned long long>(log.seed), r, b);
    } else {
      std::printf("seed %llu  final_return %.6g\n", static_cast<unsigned long long>(log.seed), r);
    }
  }
  const MeanStd r = mean_std(rets);
  std::printf("mean final_return %.6g (std %.6g)\n", r.mean, r.std);
  if (with_bias) {
    const MeanStd b = mean_std(biases);
    std::printf("mean final_bias %.6g (std %.6g)\n", b.mean, b.std);
  }
}

int cmd_train(const RunOptions& o, bool bias_mode) {
  ExperimentConfig cfg = load_with_overrides(o);
  if (bias_mode && cfg.schedule.bias_probe_states == 0) cfg.schedule.bias_probe_states = 20;
  const auto logs = run_experiment(cfg, cfg.output_dir);
  emit_csv(logs, cfg.agent.upsilon, cfg.output_dir);
  print_final(logs, cfg.schedule.bias_probe_states > 0);
  std::printf("results in %s\n", cfg.output_dir.c_str());
  return kOk;
}

int cmd_sweep_upsilon(const RunOptions& o, const std::string& grid_text) {
  const ExperimentConfig cfg = load_with_overrides(o);
  const std::vector<double> grid = parse_double_list(grid_text);
  const SweepResult res = cmd_sweep(cfg, grid, cfg.output_dir);
  std::printf("%-10s %-14s %-14s %-14s %-14s\n", "upsilon", "mean_return", "std_return", "mean_bias", "std_bias");
  for (const auto& p : res.points)
    std::printf("%-10.4g %-14.6g %-14.6g %-14.6g %-14.6g\n", p.upsilon, p.final_return.mean, p.final_return.std,
                p.final_bias.mean, p.final_bias.std);
  std::printf("best upsilon %.4g\n", res.points[res.best_index()].upsilon);
  std::printf("results in %s\n", cfg.output_dir.c_str());
  return kOk;
}

int cmd_tabular(std::size_t seeds, std::size_t steps) {
  bool ok = true;
  for (const auto& r : tabular_check(seeds, steps)) {
    std::printf("seed %llu  %-5s upsilon %.2f  err %.5f  tol %.5f  %s\n", static_cast<unsigned long long>(r.seed),
                std::string(algorithm_name(r.algorithm)).c_str(), r.upsilon, r.error, r.tolerance,
                r.passed() ? "ok" : "FAIL");
    ok = ok && r.passed();
  }
  return ok ? kOk : kFailure;
}

int cmd_gradcheck(std::size_t cases, std::uint64_t seed) {
  const GradcheckReport rep = gradcheck(cases, seed);
  const double limit = 1e-4;
  std::printf("cases %zu\nmlp max relative error %.3e\nencoder max relative error %.3e\n", rep.n_cases,
              rep.mlp_max_rel_error, rep.encoder_max_rel_error);
  const bool ok = rep.mlp_max_rel_error <= limit && rep.encoder_max_rel_error <= limit;
  std::printf("%s (limit %.0e)\n", ok ? "ok" : "FAIL", limit);
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-actor regularized TD learning experiments"};
  app.require_subcommand(1);

  RunOptions train_opts, bias_opts, sweep_opts;
  auto add_run_options = [](CLI::App* sub, RunOptions& o) {
    sub->add_option("--config", o.config, "Experiment config file")->required();
    sub->add_option("--out", o.out, "Output directory (overrides output_dir)");
  };

  auto* train = app.add_subcommand("train", "Train one agent per seed and write CSV results");
  add_run_options(train, train_opts);
  train->add_option("--seed-override", train_opts.seed_override, "Seeds replacing the config's list");

  auto* sweep = app.add_subcommand("sweep", "Sweep the regularization weight over a grid");
  add_run_options(sweep, sweep_opts);
  std::string grid;
  sweep->add_option("--upsilon", grid, "Comma-separated grid, e.g. 0,0.5,1")->required();

  auto* bias = app.add_subcommand("bias", "Train with bias probing and report final-phase bias");
  add_run_options(bias, bias_opts);
  bias->add_option("--seed-override", bias_opts.seed_override, "Seeds replacing the config's list");

  std::size_t tab_seeds = 5, tab_steps = 500000;
  auto* tab = app.add_subcommand("tabular-check", "Tabular convergence against value iteration");
  tab->add_option("--seeds", tab_seeds, "Number of random MDPs")->check(CLI::PositiveNumber);
  tab->add_option("--steps", tab_steps, "Updates per run")->check(CLI::PositiveNumber);

  std::size_t grad_cases = 100;
  std::uint64_t grad_seed = 0;
  auto* grad = app.add_subcommand("gradcheck", "Backprop against central finite differences");
  grad->add_option("--cases", grad_cases, "Random networks to check")->check(CLI::PositiveNumber);
  grad->add_option("--seed", grad_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return cmd_train(train_opts, false);
    if (*bias) return cmd_train(bias_opts, true);
    if (*sweep) return cmd_sweep_upsilon(sweep_opts, grid);
    if (*tab) return cmd_tabular(tab_seeds, tab_steps);
    if (*grad) return cmd_gradcheck(grad_cases, grad_seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
