#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/circuit.hpp"
#include "hexq/encode.hpp"
#include "hexq/error.hpp"
#include "hexq/net/qnetwork.hpp"
#include "hexq/net/rmsprop.hpp"
#include "hexq/parallel.hpp"
#include "hexq/policy.hpp"
#include "hexq/posdb.hpp"
#include "hexq/replay.hpp"

namespace hexq {

struct TrainConfig {
  double epsilon = 0.1;
  std::size_t replay_capacity = 100000;
  std::size_t batch_size = 64;
  static constexpr double gamma = 1.0;  // undiscounted episodes
  RmsPropConfig optimizer;
  int episodes = 1000;
  int metrics_window = 200;
  int checkpoint_interval = 1000;
  double flip_probability = 0.5;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
    if (replay_capacity == 0) throw ConfigError("replay_capacity must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (episodes < 0) throw ConfigError("episodes must be non-negative");
    if (metrics_window < 1) throw ConfigError("metrics_window must be positive");
    if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
      throw ConfigError("flip_probability must lie in [0, 1]");
    }
    if (!(optimizer.learning_rate > 0.0) || !(optimizer.decay >= 0.0 && optimizer.decay < 1.0) ||
        !(optimizer.damping > 0.0)) {
      throw ConfigError("invalid RMSProp settings");
    }
  }
};

struct EpisodeRecord {
  int episode = 0;
  double mean_abs_max_q = 0.0;  // over positions where a move was chosen
  double mean_cost = std::numeric_limits<double>::quiet_NaN();  // NaN when no update ran
  bool first_mover_win = false;
  int episode_len = 0;

  Color first_mover = Color::White;  // side to move in the drawn start position
  bool start_flipped = false;
  int next_state_flips = 0;
  int updates = 0;
  int rewards = 0;  // number of r = 1 transitions emitted
};

struct MetricsLog {
  int window = 200;
  std::vector<EpisodeRecord> episodes;

  /// Trailing mean over the last `window` episodes at each index; NaN
  /// entries (episodes without updates) are left out of the mean.
  std::vector<double> running_mean(double EpisodeRecord::*field) const {
    std::vector<double> out(episodes.size(), std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      const double v = episodes[i].*field;
      if (!std::isnan(v)) {
        sum += v;
        ++count;
      }
      if (i >= static_cast<std::size_t>(window)) {
        const double old = episodes[i - static_cast<std::size_t>(window)].*field;
        if (!std::isnan(old)) {
          sum -= old;
          --count;
        }
      }
      if (count > 0) out[i] = sum / count;
    }
    return out;
  }

  void write_csv(std::ostream& out) const {
    out << "episode,mean_abs_max_q,mean_cost,first_mover_win,episode_len\n";
    for (const auto& e : episodes) {
      out << e.episode << ',' << e.mean_abs_max_q << ',';
      if (std::isnan(e.mean_cost)) {
        out << "nan";
      } else {
        out << e.mean_cost;
      }
      out << ',' << (e.first_mover_win ? 1 : 0) << ',' << e.episode_len << '\n';
    }
  }
};

/// Mean of `series` over [begin, end), skipping NaN.
inline double mean_over(const std::vector<double>& series, std::size_t begin, std::size_t end) {
  double s = 0.0;
  int n = 0;
  for (std::size_t i = begin; i < end && i < series.size(); ++i) {
    if (!std::isnan(series[i])) {
      s += series[i];
      ++n;
    }
  }
  return n > 0 ? s / n : std::numeric_limits<double>::quiet_NaN();
}

/// Action values of a White-to-move board, indexed row * N + col.
template <typename T>
std::vector<T> network_values(const QNetwork<T>& net, const Board& white_to_move) {
  return evaluate(net, encode<T>(white_to_move));
}

/// Regression targets: r for terminal records, r - max_legal Q(next_state)
/// otherwise, clamped to [-1, 1].
template <typename T>
std::vector<T> q_target(std::span<const Experience> batch, const QNetwork<T>& net, ForwardCache<T>& cache) {
  if (batch.empty()) throw UsageError("q_target needs a non-empty batch");
  std::vector<T> targets(batch.size());
  std::vector<InputTensor<T>> inputs;
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    targets[i] = static_cast<T>(batch[i].reward);
    if (!batch[i].terminal) {
      open.push_back(i);
      inputs.push_back(encode<T>(batch[i].next_state));
    }
  }
  if (!open.empty()) {
    forward(net, std::span<const InputTensor<T>>(inputs), cache);
    for (std::size_t k = 0; k < open.size(); ++k) {
      const Experience& e = batch[open[k]];
      const auto legal = e.next_state.legal_moves();
      const T best = max_legal_value<T>(cache.values(static_cast<int>(k)), legal, e.next_state.size());
      targets[open[k]] = static_cast<T>(e.reward) - best;
    }
  }
  for (T& t : targets) t = std::clamp(t, T(-1), T(1));
  return targets;
}

template <typename T>
std::vector<T> q_target(std::span<const Experience> batch, const QNetwork<T>& net) {
  ForwardCache<T> cache;
  return q_target(batch, net, cache);
}

// ---------------------------------------------------------------------------
// Mentoring
// ---------------------------------------------------------------------------

/// A White-to-move position with heuristic targets on its legal cells.
template <typename T>
struct MentorSample {
  Board board;
  std::vector<T> target;  // row * N + col; 0 on occupied cells
  std::vector<T> legal;   // 1 on legal cells, 0 elsewhere
};

template <typename T>
MentorSample<T> make_mentor_sample(const Board& position) {
  MentorSample<T> s;
  s.board = position.to_move() == Color::White ? position : transpose_swap(position);
  const HeuristicValues hv = heuristic_action_values(s.board, HeuristicMode::Exact);
  s.target.assign(hv.values.size(), T(0));
  s.legal.assign(hv.values.size(), T(0));
  for (std::size_t i = 0; i < hv.values.size(); ++i) {
    if (hv.values[i]) {
      s.target[i] = static_cast<T>(*hv.values[i]);
      s.legal[i] = T(1);
    }
  }
  return s;
}

/// Heuristic targets for every database position (computed in parallel).
template <typename T>
std::vector<MentorSample<T>> build_mentor_set(const PositionDatabase& db, unsigned threads = 0) {
  const auto refs = db.positions();
  std::vector<MentorSample<T>> samples(refs.size());
  parallel_for(refs.size(), [&](std::size_t i) { samples[i] = make_mentor_sample<T>(db.board_at(refs[i])); },
               threads);
  return samples;
}

template <typename T>
MentorSample<T> flipped(const MentorSample<T>& s) {
  MentorSample<T> f;
  f.board = flip180(s.board);
  const int n = s.board.size();
  f.target.resize(s.target.size());
  f.legal.resize(s.legal.size());
  for (int i = 0; i < n * n; ++i) {
    const int j = n * n - 1 - i;  // 180 degree rotation of a row-major index
    f.target[static_cast<std::size_t>(j)] = s.target[static_cast<std::size_t>(i)];
    f.legal[static_cast<std::size_t>(j)] = s.legal[static_cast<std::size_t>(i)];
  }
  return f;
}

/// Mean over samples of the squared error averaged over each sample's legal cells.
template <typename T>
double masked_mse(const QNetwork<T>& net, std::span<const MentorSample<T>> samples, std::size_t chunk = 256) {
  double total = 0.0;
  ForwardCache<T> cache;
  std::vector<InputTensor<T>> inputs;
  for (std::size_t start = 0; start < samples.size(); start += chunk) {
    const std::size_t end = std::min(samples.size(), start + chunk);
    inputs.clear();
    for (std::size_t i = start; i < end; ++i) inputs.push_back(encode<T>(samples[i].board));
    forward(net, std::span<const InputTensor<T>>(inputs), cache);
    for (std::size_t i = start; i < end; ++i) {
      const auto q = cache.values(static_cast<int>(i - start));
      double se = 0.0, cells = 0.0;
      for (std::size_t a = 0; a < q.size(); ++a) {
        const double d = static_cast<double>(q[a]) - samples[i].target[a];
        se += samples[i].legal[a] * d * d;
        cells += samples[i].legal[a];
      }
      total += cells > 0 ? se / cells : 0.0;
    }
  }
  return samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
}

struct MentorConfig {
  int passes = 20;
  std::size_t batch_size = 64;
  RmsPropConfig optimizer;
  bool flip_augment = true;  // rotate each drawn sample by 180 degrees with probability 1/2
  int loss_window = 200;
  std::uint64_t seed = 1;
};

struct MentorResult {
  std::vector<double> batch_loss;
  std::vector<double> trailing_loss;
};

/// Supervised regression of the network onto precomputed heuristic targets,
/// legal cells only, with RMSProp mini-batches over shuffled passes.
template <typename T>
MentorResult mentor(QNetwork<T>& net, std::span<const MentorSample<T>> samples, const MentorConfig& cfg) {
  if (samples.empty()) throw ConfigError("mentoring needs a non-empty position database");
  if (cfg.batch_size == 0) throw ConfigError("mentor batch_size must be positive");
  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution coin(0.5);
  auto opt = make_optimizer(net, cfg.optimizer);
  ForwardCache<T> cache;
  Gradients<T> grads = net.params.zeros_like();
  const int actions = net.config.actions();
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<MentorSample<T>> batch;
  std::vector<InputTensor<T>> inputs;
  std::vector<T> g_out;
  MentorResult result;
  double window_sum = 0.0;

  for (int pass = 0; pass < cfg.passes; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      inputs.clear();
      for (std::size_t k = start; k < end; ++k) {
        const auto& s = samples[order[k]];
        batch.push_back(cfg.flip_augment && coin(rng) ? flipped(s) : s);
        inputs.push_back(encode<T>(batch.back().board));
      }
      forward(net, std::span<const InputTensor<T>>(inputs), cache);
      const auto b = static_cast<T>(batch.size());
      g_out.assign(batch.size() * static_cast<std::size_t>(actions), T(0));
      double loss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto q = cache.values(static_cast<int>(i));
        T cells = 0;
        for (const T l : batch[i].legal) cells += l;
        if (cells == T(0)) continue;
        double se = 0.0;
        for (int a = 0; a < actions; ++a) {
          const auto ua = static_cast<std::size_t>(a);
          const T d = (q[ua] - batch[i].target[ua]) * batch[i].legal[ua];
          se += static_cast<double>(d) * d;
          g_out[i * static_cast<std::size_t>(actions) + ua] = T(2) * d / (cells * b);
        }
        loss += se / cells;
      }
      loss /= static_cast<double>(batch.size());
      backward(net, cache, std::span<const T>(g_out), grads);
      rmsprop_step(net, opt, grads);

      result.batch_loss.push_back(loss);
      window_sum += loss;
      if (result.batch_loss.size() > static_cast<std::size_t>(cfg.loss_window)) {
        window_sum -= result.batch_loss[result.batch_loss.size() - 1 - static_cast<std::size_t>(cfg.loss_window)];
      }
      const auto n = std::min(result.batch_loss.size(), static_cast<std::size_t>(cfg.loss_window));
      result.trailing_loss.push_back(window_sum / static_cast<double>(n));
    }
  }
  return result;
}

template <typename T>
MentorResult mentor(QNetwork<T>& net, const PositionDatabase& db, const MentorConfig& cfg) {
  if (db.position_count() == 0) throw ConfigError("mentoring needs a non-empty position database");
  const auto samples = build_mentor_set<T>(db);
  return mentor(net, std::span<const MentorSample<T>>(samples), cfg);
}

// ---------------------------------------------------------------------------
// Deep Q-learning with experience replay
// ---------------------------------------------------------------------------

template <typename T>
struct TrainHooks {
  std::function<void(const Experience&)> on_experience;
  std::function<void(const EpisodeRecord&)> on_episode;
  std::function<void(int episodes_done, const QNetwork<T>&)> on_checkpoint;
};

/// Self-play Q-learning. Each episode draws a database position, picks the
/// side to move at random, and rotates it by 180 degrees with probability
/// `flip_probability`. The game is kept White-to-move by transposing after
/// every move, so one network plays both sides. Every move stores
/// (s, a, r, s'), with s' rotated with probability `flip_probability`, then
/// runs one RMSProp step on a replay batch against r - max Q(s').
template <typename T>
MetricsLog train_dql(QNetwork<T>& net, const PositionDatabase& db, const TrainConfig& cfg,
                     const TrainHooks<T>& hooks = {}) {
  cfg.validate();
  const auto starts = db.positions();
  if (starts.empty()) throw ConfigError("training needs a non-empty position database");
  if (db.size != net.config.board_size) throw ConfigError("database and network board sizes differ");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick_start(0, starts.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ReplayBuffer<Experience> memory(cfg.replay_capacity);
  auto opt = make_optimizer(net, cfg.optimizer);
  ForwardCache<T> act_cache, target_cache, train_cache;
  Gradients<T> grads = net.params.zeros_like();
  const int n = net.config.board_size;
  const int actions = net.config.actions();
  std::vector<InputTensor<T>> inputs;
  std::vector<T> g_out;

  MetricsLog log;
  log.window = cfg.metrics_window;
  log.episodes.reserve(static_cast<std::size_t>(cfg.episodes));

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    EpisodeRecord rec;
    rec.episode = ep;
    Board start = db.board_at(starts[pick_start(rng)]);
    rec.first_mover = unit(rng) < 0.5 ? Color::White : Color::Black;
    start = start.with_to_move(rec.first_mover);
    if (unit(rng) < cfg.flip_probability) {
      start = flip180(start);
      rec.start_flipped = true;
    }
    Board s = start.to_move() == Color::White ? start : transpose_swap(start);

    double abs_max_q = 0.0;
    double cost_sum = 0.0;
    while (true) {
      const auto legal = s.legal_moves();
      const InputTensor<T> x = encode<T>(s);
      forward(net, std::span<const InputTensor<T>>(&x, 1), act_cache);
      const auto q = act_cache.values(0);
      abs_max_q += std::abs(static_cast<double>(max_legal_value<T>(q, legal, n)));
      const Cell a = epsilon_greedy<T>(q, legal, cfg.epsilon, n, rng);

      const Board after = s.play(a);
      const bool terminal = after.finished();
      const int reward = terminal ? 1 : 0;
      const Board next = transpose_swap(after);
      Board stored = next;
      if (unit(rng) < cfg.flip_probability) {
        stored = flip180(next);
        ++rec.next_state_flips;
      }
      Experience e{s, a, reward, stored, terminal};
      if (hooks.on_experience) hooks.on_experience(e);
      memory.add(std::move(e));
      rec.rewards += reward;
      ++rec.episode_len;

      if (auto batch = memory.sample_batch(cfg.batch_size, rng)) {
        const std::vector<T> targets = q_target<T>(*batch, net, target_cache);
        inputs.clear();
        for (const auto& b : *batch) inputs.push_back(encode<T>(b.state));
        forward(net, std::span<const InputTensor<T>>(inputs), train_cache);
        g_out.assign(batch->size() * static_cast<std::size_t>(actions), T(0));
        double cost = 0.0;
        const auto bs = static_cast<T>(batch->size());
        for (std::size_t i = 0; i < batch->size(); ++i) {
          const auto& b = (*batch)[i];
          const auto idx = static_cast<std::size_t>(b.action.row * n + b.action.col);
          const T diff = train_cache.values(static_cast<int>(i))[idx] - targets[i];
          cost += static_cast<double>(diff) * diff;
          g_out[i * static_cast<std::size_t>(actions) + idx] = T(2) * diff / bs;
        }
        backward(net, train_cache, std::span<const T>(g_out), grads);
        rmsprop_step(net, opt, grads);
        cost_sum += cost / static_cast<double>(batch->size());
        ++rec.updates;
      }

      if (terminal) break;
      s = next;
    }

    rec.mean_abs_max_q = abs_max_q / rec.episode_len;
    if (rec.updates > 0) rec.mean_cost = cost_sum / rec.updates;
    rec.first_mover_win = rec.episode_len % 2 == 1;
    log.episodes.push_back(rec);
    if (hooks.on_episode) hooks.on_episode(rec);
    if (hooks.on_checkpoint && cfg.checkpoint_interval > 0 && (ep + 1) % cfg.checkpoint_interval == 0) {
      hooks.on_checkpoint(ep + 1, net);
    }
  }
  return log;
}

}  // namespace hexq
