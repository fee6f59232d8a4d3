#include "tddr/runner.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "tddr/errors.hpp"

namespace tddr {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty())
    throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty())
    throw ConfigError("key '" + std::string(key) + "': expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::string_view> split_list(std::string_view v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("unterminated list '" + std::string(v) + "'");
    v = trim(v.substr(1, v.size() - 2));
  }
  std::vector<std::string_view> items;
  if (v.empty()) return items;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    items.push_back(trim(v.substr(start, comma == std::string_view::npos ? v.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

struct Field {
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
Field double_field(T ExperimentConfig::*part, double T::*member, const char* key) {
  return {[=](ExperimentConfig& c, std::string_view v) { (c.*part).*member = to_double(key, v); },
          [=](const ExperimentConfig& c) { return format_number((c.*part).*member); }};
}

template <class T>
Field size_field(T ExperimentConfig::*part, std::size_t T::*member, const char* key) {
  return {[=](ExperimentConfig& c, std::string_view v) { (c.*part).*member = to_uint(key, v); },
          [=](const ExperimentConfig& c) { return std::to_string((c.*part).*member); }};
}

// Ordered so serialization is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
  using A = AgentConfig;
  using S = TrainingSchedule;
  constexpr auto ag = &ExperimentConfig::agent;
  constexpr auto sc = &ExperimentConfig::schedule;
  static const std::vector<std::pair<std::string, Field>> table = {
      {"algorithm",
       {[](ExperimentConfig& c, std::string_view v) { c.agent.algorithm = parse_algorithm(v); },
        [](const ExperimentConfig& c) { return std::string(algorithm_name(c.agent.algorithm)); }}},
      {"env",
       {[](ExperimentConfig& c, std::string_view v) { c.env = parse_env_id(v); },
        [](const ExperimentConfig& c) { return std::string(env_id_name(c.env)); }}},
      {"seeds",
       {[](ExperimentConfig& c, std::string_view v) {
          c.seeds.clear();
          for (auto item : split_list(v)) c.seeds.push_back(to_uint("seeds", item));
        },
        [](const ExperimentConfig& c) {
          std::string out = "[";
          for (std::size_t k = 0; k < c.seeds.size(); ++k) out += (k ? ", " : "") + std::to_string(c.seeds[k]);
          return out + "]";
        }}},
      {"output_dir",
       {[](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(v); },
        [](const ExperimentConfig& c) { return c.output_dir; }}},
      {"upsilon", double_field(ag, &A::upsilon, "upsilon")},
      {"gamma", double_field(ag, &A::gamma, "gamma")},
      {"tau", double_field(ag, &A::tau, "tau")},
      {"target_noise_sigma", double_field(ag, &A::target_noise_sigma, "target_noise_sigma")},
      {"target_noise_clip", double_field(ag, &A::target_noise_clip, "target_noise_clip")},
      {"exploration_sigma", double_field(ag, &A::exploration_sigma, "exploration_sigma")},
      {"batch_size", size_field(ag, &A::batch_size, "batch_size")},
      {"start_steps", size_field(ag, &A::start_steps, "start_steps")},
      {"swap_period", size_field(ag, &A::swap_period, "swap_period")},
      {"hidden_dim", size_field(ag, &A::hidden_dim, "hidden_dim")},
      {"embed_dim", size_field(ag, &A::embed_dim, "embed_dim")},
      {"buffer_capacity", size_field(ag, &A::buffer_capacity, "buffer_capacity")},
      {"actor_lr", double_field(ag, &A::actor_lr, "actor_lr")},
      {"critic_lr", double_field(ag, &A::critic_lr, "critic_lr")},
      {"encoder_lr", double_field(ag, &A::encoder_lr, "encoder_lr")},
      {"policy_delay", size_field(ag, &A::policy_delay, "policy_delay")},
      {"mirror_actors",
       {[](ExperimentConfig& c, std::string_view v) { c.agent.mirror_actors = to_bool("mirror_actors", v); },
        [](const ExperimentConfig& c) { return std::string(c.agent.mirror_actors ? "true" : "false"); }}},
      {"total_steps", size_field(sc, &S::total_steps, "total_steps")},
      {"eval_period", size_field(sc, &S::eval_period, "eval_period")},
      {"eval_episodes", size_field(sc, &S::eval_episodes, "eval_episodes")},
      {"bias_probe_states", size_field(sc, &S::bias_probe_states, "bias_probe_states")},
      {"bias_rollouts", size_field(sc, &S::bias_rollouts, "bias_rollouts")},
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& [name, f] : fields())
    if (name == key) return &f;
  return nullptr;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Whole-file write through a temporary so readers never see a partial file.
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

// One CSV text plus its .dat mirror: '#'-prefixed header, spaces for commas.
void write_table(const fs::path& csv_path, const std::string& header, const std::vector<std::string>& rows) {
  std::string csv = header + "\n", dat = "# ";
  for (char ch : header) dat += ch == ',' ? ' ' : ch;
  dat += "\n";
  for (const auto& r : rows) {
    csv += r + "\n";
    for (char ch : r) dat += ch == ',' ? ' ' : ch;
    dat += "\n";
  }
  write_file_atomic(csv_path, csv);
  fs::path dat_path = csv_path;
  dat_path.replace_extension(".dat");
  write_file_atomic(dat_path, dat);
}

// Append-only log where each line reaches the file in a single write() and
// is synced before the call returns.
class DurableLog {
 public:
  DurableLog(const fs::path& path, const std::string& header) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    append(header);
  }
  DurableLog(const DurableLog&) = delete;
  DurableLog& operator=(const DurableLog&) = delete;
  ~DurableLog() {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(const std::string& line) {
    const std::string buf = line + "\n";
    const ssize_t n = ::write(fd_, buf.data(), buf.size());
    if (n != static_cast<ssize_t>(buf.size())) throw IoError("short write to " + path_.string());
    if (::fsync(fd_) != 0) throw IoError("fsync failed for " + path_.string() + ": " + std::strerror(errno));
  }

 private:
  fs::path path_;
  int fd_ = -1;
};

std::string join_row(std::initializer_list<double> vals) {
  std::string out;
  for (double v : vals) out += (out.empty() ? "" : ",") + format_number(v);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  agent.validate();
  if (schedule.eval_period == 0) throw ConfigError("eval_period must be positive");
  if (schedule.total_steps < schedule.eval_period) throw ConfigError("total_steps must be at least eval_period");
  if (schedule.eval_episodes == 0) throw ConfigError("eval_episodes must be positive");
  if (schedule.bias_probe_states > 0 && schedule.bias_rollouts == 0)
    throw ConfigError("bias_rollouts must be positive when probing is enabled");
  if (seeds.empty()) throw ConfigError("seeds must list at least one seed");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("seeds must be distinct");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto sep = line.find_first_of("=:");
    if (sep == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + std::string(line) + "'");
    std::string key(trim(line.substr(0, sep)));
    const std::string_view value = trim(line.substr(sep + 1));
    if (key == "seed") key = "seeds";
    const Field* f = find_field(key);
    if (!f) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing value for '" + key + "'");
    f->set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + " = " + f.get(cfg) + "\n";
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, f] : fields()) keys.push_back(name);
  return keys;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text)) out.push_back(to_double("list", item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string returns_file_name(std::uint64_t seed) { return "returns_seed" + std::to_string(seed) + ".csv"; }

std::string returns_header(std::size_t n_episodes) {
  std::string h = "step,mean_return";
  for (std::size_t k = 0; k < n_episodes; ++k) h += ",ep" + std::to_string(k);
  return h;
}

std::string returns_row(const EvalRow& row) {
  std::string out = std::to_string(row.step) + "," + format_number(row.mean_return);
  for (double r : row.episode_returns) out += "," + format_number(r);
  return out;
}

std::vector<RunLog> run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_file_atomic(out_dir / "config.txt", serialize_config(cfg));
  }
  const auto proto = make_env(cfg.env);
  std::vector<RunLog> logs(cfg.seeds.size());
  std::exception_ptr failure;
  const long n = static_cast<long>(cfg.seeds.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < n; ++k) {
    try {
      AgentConfig ac = cfg.agent;
      ac.seed = cfg.seeds[k];
      Agent agent(ac, proto->state_dim(), proto->action_dim(), proto->action_bound());
      std::unique_ptr<DurableLog> sink;
      if (!out_dir.empty())
        sink = std::make_unique<DurableLog>(out_dir / returns_file_name(ac.seed), returns_header(cfg.schedule.eval_episodes));
      EvalHook hook;
      if (sink) hook = [&](const EvalRow& row) { sink->append(returns_row(row)); };
      try {
        logs[k] = run_training(agent, *proto, cfg.schedule, hook);
      } catch (const NumericError& e) {
        throw NumericError("seed " + std::to_string(ac.seed) + ": " + e.what());
      } catch (const IoError& e) {
        throw IoError("seed " + std::to_string(ac.seed) + ": " + e.what());
      }
    } catch (...) {
#pragma omp critical(experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return logs;
}

void emit_csv(std::span<const RunLog> logs, double upsilon, const fs::path& dir) {
  if (logs.empty()) throw std::invalid_argument("emit_csv: no logs");
  const std::size_t n_rows = logs.front().rows.size();
  for (const auto& log : logs)
    if (log.rows.size() != n_rows) throw std::invalid_argument("emit_csv: logs have different row counts");
  ensure_dir(dir);

  for (const auto& log : logs) {
    const std::size_t n_ep = log.rows.empty() ? 0 : log.rows.front().episode_returns.size();
    std::vector<std::string> rows;
    for (const auto& r : log.rows) rows.push_back(returns_row(r));
    write_table(dir / returns_file_name(log.seed), returns_header(n_ep), rows);
  }

  std::vector<std::string> agg_rows, bias_rows;
  bool has_bias = n_rows > 0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    Vec rets, biases;
    for (const auto& log : logs) {
      const EvalRow& r = log.rows[i];
      if (r.step != logs.front().rows[i].step) throw std::invalid_argument("emit_csv: logs disagree on steps");
      rets.push_back(r.mean_return);
      if (r.biases.empty()) has_bias = false;
      else biases.push_back(mean_std(r.biases).mean);
    }
    const MeanStd ret = mean_std(rets);
    agg_rows.push_back(std::to_string(logs.front().rows[i].step) + "," + join_row({ret.mean, ret.std}));
    if (has_bias) {
      const MeanStd b = mean_std(biases);
      bias_rows.push_back(std::to_string(logs.front().rows[i].step) + "," + join_row({upsilon, b.mean, b.std}));
    }
  }
  write_table(dir / "aggregate.csv", "step,mean_return,std_return", agg_rows);
  if (has_bias) write_table(dir / "bias.csv", "step,upsilon,mean_bias,std_bias", bias_rows);
}

SweepResult cmd_sweep(const ExperimentConfig& cfg, std::span<const double> grid, const fs::path& dir) {
  cfg.validate();
  for (double u : grid)
    if (!(u >= 0.0 && u <= 1.0)) throw ConfigError("upsilon " + format_number(u) + " is outside [0, 1]");
  if (cfg.seeds.size() < 2) throw ConfigError("a sweep needs at least two seeds");
  ensure_dir(dir);
  write_file_atomic(dir / "config.txt", serialize_config(cfg));

  SweepResult res = sweep_upsilon(cfg.agent, cfg.env, grid, cfg.seeds, cfg.schedule);
  const std::size_t n_seeds = cfg.seeds.size();
  std::vector<std::string> rows;
  for (std::size_t g = 0; g < res.points.size(); ++g) {
    std::vector<RunLog> logs;
    for (std::size_t k = 0; k < n_seeds; ++k) logs.push_back(res.cells[g * n_seeds + k].log);
    const SweepPoint& p = res.points[g];
    emit_csv(logs, p.upsilon, dir / ("upsilon_" + format_number(p.upsilon)));
    rows.push_back(join_row({p.upsilon, p.final_return.mean, p.final_return.std, p.final_bias.mean, p.final_bias.std}));
  }
  write_table(dir / "summary.csv", "upsilon,mean_return,std_return,mean_bias,std_bias", rows);
  write_file_atomic(dir / "best_upsilon.txt", format_number(res.points[res.best_index()].upsilon) + "\n");
  return res;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  for (auto item : split_list(line)) t.header.emplace_back(item);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (auto item : split_list(line)) {
      double v = 0.0;
      const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || p != item.data() + item.size())
        throw IoError(path.string() + ": malformed field '" + std::string(item) + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw IoError(path.string() + ": row width differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace tddr
