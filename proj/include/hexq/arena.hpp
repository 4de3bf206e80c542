#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/circuit.hpp"
#include "hexq/encode.hpp"
#include "hexq/error.hpp"
#include "hexq/net/qnetwork.hpp"
#include "hexq/net/weights_io.hpp"
#include "hexq/parallel.hpp"
#include "hexq/policy.hpp"

namespace hexq {

struct UniformRandomAgent {};

/// One-ply resistance player; exactly tied best moves are broken at random.
struct HeuristicAgent {
  HeuristicMode mode = HeuristicMode::Exact;
};

/// Greedy over the network's legal action values (epsilon-greedy if epsilon > 0).
struct NetGreedyAgent {
  std::shared_ptr<const QNetwork<float>> net;
  double epsilon = 0.0;
};

struct Agent {
  std::string label;
  std::variant<UniformRandomAgent, HeuristicAgent, NetGreedyAgent> kind;
};

inline Agent random_agent() { return {"random", UniformRandomAgent{}}; }

inline Agent heuristic_agent(HeuristicMode mode = HeuristicMode::Exact) {
  return {mode == HeuristicMode::Exact ? "heuristic" : "heuristic-estimate", HeuristicAgent{mode}};
}

inline Agent net_agent(std::shared_ptr<const QNetwork<float>> net, std::string label = "net") {
  return {std::move(label), NetGreedyAgent{std::move(net), 0.0}};
}

/// "random", "heuristic", "heuristic-estimate" or "net:<weights file>".
inline Agent parse_agent(const std::string& spec) {
  if (spec == "random") return random_agent();
  if (spec == "heuristic" || spec == "heuristic-exact") return heuristic_agent(HeuristicMode::Exact);
  if (spec == "heuristic-estimate") return heuristic_agent(HeuristicMode::Estimate);
  if (spec.rfind("net:", 0) == 0) {
    const std::string path = spec.substr(4);
    return net_agent(std::make_shared<const QNetwork<float>>(load_weights<float>(path)), spec);
  }
  throw ParseError("unknown agent '" + spec + "' (random | heuristic | heuristic-estimate | net:<file>)");
}

/// Network action values for the side to move, in the board's own
/// coordinates. Black-to-move boards go through transpose_swap first.
inline std::vector<float> net_values_for(const QNetwork<float>& net, const Board& board) {
  if (board.to_move() == Color::White) return evaluate(net, encode<float>(board));
  const std::vector<float> t = evaluate(net, encode<float>(transpose_swap(board)));
  const int n = board.size();
  std::vector<float> v(t.size());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) v[static_cast<std::size_t>(r * n + c)] = t[static_cast<std::size_t>(c * n + r)];
  }
  return v;
}

template <typename Rng>
Cell choose_move(const Agent& agent, const Board& board, Rng& rng) {
  const auto legal = board.legal_moves();
  if (legal.empty()) throw GameOverError("no legal moves");
  return std::visit(
      [&](const auto& kind) -> Cell {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, UniformRandomAgent>) {
          std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
          return legal[pick(rng)];
        } else if constexpr (std::is_same_v<K, HeuristicAgent>) {
          const HeuristicValues hv = heuristic_action_values(board, kind.mode);
          double best = -2.0;
          for (const Cell c : legal) best = std::max(best, *hv.at(c));
          std::vector<Cell> top;
          for (const Cell c : legal) {
            if (*hv.at(c) >= best - 1e-12) top.push_back(c);
          }
          std::uniform_int_distribution<std::size_t> pick(0, top.size() - 1);
          return top[pick(rng)];
        } else {
          if (!kind.net) throw UsageError("net agent without a network");
          if (kind.net->config.board_size != board.size()) {
            throw ConfigError("network board size does not match the game");
          }
          const std::vector<float> v = net_values_for(*kind.net, board);
          return epsilon_greedy<float>(v, legal, kind.epsilon, board.size(), rng);
        }
      },
      agent.kind);
}

struct GameRecord {
  std::vector<Cell> moves;
  Color winner = Color::White;
  bool first_won = false;  // the first agent moves first, as White
};

/// Plays one game to the end. A forced opening is placed as move 1 on
/// behalf of the first agent.
template <typename Rng>
GameRecord play_game(const Agent& first, const Agent& second, int size, std::optional<Cell> opening, Rng& rng) {
  Board b = new_board(size);
  GameRecord rec;
  if (opening) {
    b.apply(*opening);
    rec.moves.push_back(*opening);
  }
  while (!b.finished()) {
    const Agent& mover = b.to_move() == Color::White ? first : second;
    const Cell c = choose_move(mover, b, rng);
    b.apply(c);
    rec.moves.push_back(c);
  }
  rec.winner = *b.winner();
  rec.first_won = rec.winner == Color::White;
  return rec;
}

struct GameResult {
  std::optional<Cell> forced_opening;
  std::string first_agent;
  std::string winner_agent;
  std::vector<Cell> moves;
};

struct MatchReport {
  std::string agent_a;
  std::string agent_b;
  std::string mode;  // "open" or "all-openings"
  int size = 0;
  std::uint64_t seed = 0;
  int games = 0;
  int a_first_games = 0;
  int a_first_wins = 0;
  int a_second_games = 0;
  int a_second_wins = 0;
  std::vector<GameResult> results;

  int a_wins() const { return a_first_wins + a_second_wins; }
  int b_wins() const { return games - a_wins(); }
  double a_win_rate() const { return games ? static_cast<double>(a_wins()) / games : 0.0; }
  double a_first_rate() const { return a_first_games ? static_cast<double>(a_first_wins) / a_first_games : 0.0; }
  double a_second_rate() const {
    return a_second_games ? static_cast<double>(a_second_wins) / a_second_games : 0.0;
  }
};

namespace detail {

inline MatchReport run_match(const Agent& a, const Agent& b, int size, std::uint64_t seed, std::string mode,
                             const std::vector<std::pair<bool, std::optional<Cell>>>& schedule,
                             unsigned threads) {
  MatchReport rep;
  rep.agent_a = a.label;
  rep.agent_b = b.label;
  rep.mode = std::move(mode);
  rep.size = size;
  rep.seed = seed;
  rep.games = static_cast<int>(schedule.size());
  std::vector<GameRecord> records(schedule.size());
  parallel_for(
      schedule.size(),
      [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        const bool a_first = schedule[i].first;
        records[i] = a_first ? play_game(a, b, size, schedule[i].second, rng)
                             : play_game(b, a, size, schedule[i].second, rng);
      },
      threads);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const bool a_first = schedule[i].first;
    const bool a_won = records[i].first_won == a_first;
    if (a_first) {
      ++rep.a_first_games;
      rep.a_first_wins += a_won ? 1 : 0;
    } else {
      ++rep.a_second_games;
      rep.a_second_wins += a_won ? 1 : 0;
    }
    rep.results.push_back({schedule[i].second, a_first ? a.label : b.label, a_won ? a.label : b.label,
                           std::move(records[i].moves)});
  }
  return rep;
}

}  // namespace detail

/// One game per opening cell with `a` moving first, then the same with `b` first: 2 N^2 games.
inline MatchReport tournament_all_openings(const Agent& a, const Agent& b, int size, std::uint64_t seed = 0,
                                           unsigned threads = 0) {
  (void)new_board(size);
  std::vector<std::pair<bool, std::optional<Cell>>> schedule;
  for (const bool a_first : {true, false}) {
    for (int i = 0; i < size * size; ++i) schedule.push_back({a_first, Cell{i / size, i % size}});
  }
  return detail::run_match(a, b, size, seed, "all-openings", schedule, threads);
}

/// `games` games with free openings; `a` moves first in even-numbered games.
inline MatchReport tournament_unrestricted(const Agent& a, const Agent& b, int size, int games,
                                           std::uint64_t seed, unsigned threads = 0) {
  if (games < 1) throw ConfigError("tournament needs at least one game");
  (void)new_board(size);
  std::vector<std::pair<bool, std::optional<Cell>>> schedule;
  for (int i = 0; i < games; ++i) schedule.push_back({i % 2 == 0, std::nullopt});
  return detail::run_match(a, b, size, seed, "open", schedule, threads);
}

inline void write_report_csv(const MatchReport& rep, std::ostream& out) {
  out << "opening,first_agent,winner,moves\n";
  for (const auto& g : rep.results) {
    out << (g.moves.empty() ? std::string("-") : to_string(g.moves.front())) << ',' << g.first_agent << ','
        << g.winner_agent << ',';
    for (std::size_t i = 0; i < g.moves.size(); ++i) out << (i ? " " : "") << to_string(g.moves[i]);
    out << '\n';
  }
}

/// Win rates of agent A by mover order, one row per match.
inline void write_summary(const MatchReport& rep, std::ostream& out) {
  const std::string opening = rep.mode == "all-openings"
                                  ? "all " + std::to_string(rep.size * rep.size) + " openings"
                                  : std::string("unrestricted");
  out << rep.agent_a << " vs " << rep.agent_b << " on " << rep.size << 'x' << rep.size << " (seed " << rep.seed
      << ")\n";
  out << std::left << std::setw(22) << "first move" << std::setw(8) << "games" << std::setw(12) << "A first"
      << std::setw(12) << "A second" << "A total\n";
  out << std::setw(22) << opening << std::setw(8) << rep.games << std::fixed << std::setprecision(3)
      << std::setw(12) << rep.a_first_rate() << std::setw(12) << rep.a_second_rate() << rep.a_win_rate() << '\n';
  out.unsetf(std::ios::floatfield);
}

}  // namespace hexq
