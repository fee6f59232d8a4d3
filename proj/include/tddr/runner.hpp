#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tddr/agent.hpp"
#include "tddr/env/continuous_env.hpp"
#include "tddr/evaluation.hpp"
#include "tddr/trainer.hpp"

namespace tddr {

struct ExperimentConfig {
  AgentConfig agent;  // agent.seed is overwritten per run from `seeds`
  EnvId env = EnvId::LinearTrack;
  TrainingSchedule schedule{.bias_probe_states = 20};
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "results";

  void validate() const;  // throws ConfigError

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Flat `key = value` (or `key: value`) text, `#` starts a comment. Lists are
// `[a, b]` or `a,b`. Missing keys take defaults; unknown keys, malformed
// values and failed validation throw ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);  // IoError if unreadable
std::string serialize_config(const ExperimentConfig& cfg);
std::vector<std::string> config_keys();

// Lists such as "0,0.5,1" or "[0, 0.5, 1]".
std::vector<double> parse_double_list(std::string_view text);

// Trains one agent per seed (in parallel) and returns the logs in seed
// order. With a non-empty out_dir, each seed's returns file is created up
// front and every evaluation row is appended and synced as it is produced,
// so an interrupted run leaves only complete rows.
std::vector<RunLog> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir = {});

std::string returns_file_name(std::uint64_t seed);
std::string returns_header(std::size_t n_episodes);
std::string format_number(double v);  // %.17g
std::string returns_row(const EvalRow& row);

// Per-seed returns, the across-seed aggregate and, when rows carry bias
// probes, the bias table. Every CSV gets a whitespace-separated .dat mirror.
void emit_csv(std::span<const RunLog> logs, double upsilon, const std::filesystem::path& dir);

// Runs the sweep and writes one subdirectory per grid value plus summary.csv.
// Returns the result so callers can report the best value.
SweepResult cmd_sweep(const ExperimentConfig& cfg, std::span<const double> grid, const std::filesystem::path& dir);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace tddr
