#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "hexq/error.hpp"
#include "hexq/net/qnetwork.hpp"
#include "hexq/trainer.hpp"

namespace hexq {

/// Everything `hexq train` reads from its flat key=value file.
struct TrainingRun {
  NetConfig net;
  TrainConfig train;
  MentorConfig mentor;
  bool run_mentor = true;
  std::string db_path;         // empty: generate one
  std::size_t db_positions = 1000;
  double db_temperature = 0.2;
  std::string init_weights;    // empty: fresh initialisation
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

inline bool parse_flag(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("bad value for " + key + ": '" + v + "'");
}

}  // namespace detail

/// Lines are `key = value`; '#' starts a comment. Unknown keys are errors.
inline TrainingRun parse_training_config(std::istream& in) {
  using detail::parse_flag;
  using detail::parse_number;
  using detail::parse_real;
  TrainingRun run;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string k = detail::trim(line.substr(0, eq));
    const std::string v = detail::trim(line.substr(eq + 1));

    if (k == "board_size") run.net.board_size = parse_number<int>(k, v);
    else if (k == "conv_layers") run.net.conv_layers = parse_number<int>(k, v);
    else if (k == "filters_d3") run.net.filters_d3 = parse_number<int>(k, v);
    else if (k == "filters_d5") run.net.filters_d5 = parse_number<int>(k, v);
    else if (k == "init_seed") run.net.init_seed = parse_number<std::uint64_t>(k, v);
    else if (k == "epsilon") run.train.epsilon = parse_real(k, v);
    else if (k == "replay_capacity") run.train.replay_capacity = parse_number<std::size_t>(k, v);
    else if (k == "batch_size") run.train.batch_size = parse_number<std::size_t>(k, v);
    else if (k == "gamma") {
      if (parse_real(k, v) != 1.0) throw ConfigError("gamma is fixed at 1 (no discounting)");
    }
    else if (k == "learning_rate") run.train.optimizer.learning_rate = parse_real(k, v);
    else if (k == "rho") run.train.optimizer.decay = parse_real(k, v);
    else if (k == "eps_opt") run.train.optimizer.damping = parse_real(k, v);
    else if (k == "episodes") run.train.episodes = parse_number<int>(k, v);
    else if (k == "metrics_window") run.train.metrics_window = parse_number<int>(k, v);
    else if (k == "checkpoint_interval") run.train.checkpoint_interval = parse_number<int>(k, v);
    else if (k == "flip_probability") run.train.flip_probability = parse_real(k, v);
    else if (k == "seed") run.train.seed = parse_number<std::uint64_t>(k, v);
    else if (k == "mentor") run.run_mentor = parse_flag(k, v);
    else if (k == "mentor_passes") run.mentor.passes = parse_number<int>(k, v);
    else if (k == "mentor_batch_size") run.mentor.batch_size = parse_number<std::size_t>(k, v);
    else if (k == "mentor_learning_rate") run.mentor.optimizer.learning_rate = parse_real(k, v);
    else if (k == "mentor_seed") run.mentor.seed = parse_number<std::uint64_t>(k, v);
    else if (k == "db") run.db_path = v;
    else if (k == "db_positions") run.db_positions = parse_number<std::size_t>(k, v);
    else if (k == "db_temperature") run.db_temperature = parse_real(k, v);
    else if (k == "init_weights") run.init_weights = v;
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + k + "'");
  }
  run.net.validate();
  run.train.validate();
  if (run.mentor.passes < 0) throw ConfigError("mentor_passes must be non-negative");
  if (!(run.db_temperature > 0.0)) throw ConfigError("db_temperature must be positive");
  return run;
}

inline TrainingRun load_training_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_training_config(in);
}

}  // namespace hexq
