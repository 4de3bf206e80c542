#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/circuit.hpp"
#include "hexq/error.hpp"
#include "hexq/parallel.hpp"

namespace hexq {

/// Start positions for mentoring and self-play. Each stored line is a game
/// record cut just before its winning move; every non-empty prefix of a line
/// is one position, so no position is decided.
struct PositionDatabase {
  int size = 0;
  std::vector<std::vector<Cell>> games;

  struct PositionRef {
    std::uint32_t game = 0;
    std::uint32_t plies = 0;  // prefix length, >= 1
  };

  std::size_t position_count() const {
    std::size_t n = 0;
    for (const auto& g : games) n += g.size();
    return n;
  }

  std::vector<PositionRef> positions() const {
    std::vector<PositionRef> refs;
    refs.reserve(position_count());
    for (std::size_t g = 0; g < games.size(); ++g) {
      for (std::size_t k = 1; k <= games[g].size(); ++k) {
        refs.push_back({static_cast<std::uint32_t>(g), static_cast<std::uint32_t>(k)});
      }
    }
    return refs;
  }

  Board board_at(PositionRef ref) const {
    const auto& g = games[ref.game];
    return replay(size, std::span<const Cell>(g.data(), ref.plies));
  }

  /// Keeps only the first `n` positions, cutting the last kept line if needed.
  void truncate_positions(std::size_t n) {
    std::size_t kept = 0;
    for (std::size_t g = 0; g < games.size(); ++g) {
      if (kept + games[g].size() >= n) {
        games[g].resize(n - kept);
        games.resize(g + 1);
        return;
      }
      kept += games[g].size();
    }
  }

  friend bool operator==(const PositionDatabase&, const PositionDatabase&) = default;
};

/// Index drawn with probability exp(v_i / tau) / sum_j exp(v_j / tau).
template <typename Rng>
std::size_t softmax_select(std::span<const double> values, double temperature, Rng& rng) {
  if (!(temperature > 0.0)) throw ConfigError("softmax temperature must be positive");
  if (values.empty()) throw UsageError("softmax_select needs at least one value");
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<double> cumulative(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += std::exp((values[i] - top) / temperature);
    cumulative[i] = total;
  }
  std::uniform_real_distribution<double> u(0.0, total);
  const double x = u(rng);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
  return it == cumulative.end() ? values.size() - 1 : static_cast<std::size_t>(it - cumulative.begin());
}

/// One noisy self-play game: a uniformly random opening, then softmax over
/// exact-mode resistance values. Returns the full move list including the
/// winning move.
template <typename Rng>
std::vector<Cell> noisy_heuristic_game(int size, double temperature, Rng& rng) {
  Board b = new_board(size);
  std::vector<Cell> moves;
  std::uniform_int_distribution<int> opening(0, size * size - 1);
  const int first = opening(rng);
  moves.push_back(b.cell_at(first));
  b.apply(moves.back());
  std::vector<double> values;
  while (!b.finished()) {
    const auto legal = b.legal_moves();
    const HeuristicValues hv = heuristic_action_values(b, HeuristicMode::Exact);
    values.clear();
    for (const Cell c : legal) values.push_back(*hv.at(c));
    const Cell pick = legal[softmax_select(values, temperature, rng)];
    moves.push_back(pick);
    b.apply(pick);
  }
  return moves;
}

/// Plays `games` noisy games; game i uses RNG stream derive_seed(seed, i), so
/// the result does not depend on the thread count.
inline PositionDatabase generate_db(int games, double temperature, int size, std::uint64_t seed,
                                    unsigned threads = 0) {
  if (games < 1) throw ConfigError("database needs at least one game");
  if (!(temperature > 0.0)) throw ConfigError("softmax temperature must be positive");
  (void)new_board(size);
  PositionDatabase db;
  db.size = size;
  db.games.resize(static_cast<std::size_t>(games));
  parallel_for(
      db.games.size(),
      [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(seed, i));
        auto moves = noisy_heuristic_game(size, temperature, rng);
        moves.pop_back();
        db.games[i] = std::move(moves);
      },
      threads);
  return db;
}

/// Generates games until at least `target` positions exist, then trims to exactly `target`.
inline PositionDatabase generate_db_positions(std::size_t target, double temperature, int size,
                                              std::uint64_t seed, unsigned threads = 0) {
  if (target == 0) throw ConfigError("database needs at least one position");
  PositionDatabase db;
  db.size = size;
  std::uint64_t round = 0;
  while (db.position_count() < target) {
    const std::size_t missing = target - db.position_count();
    const int batch = static_cast<int>(std::max<std::size_t>(1, missing / std::max(1, size * size / 2)));
    PositionDatabase more = generate_db(batch, temperature, size, derive_seed(seed, round), threads);
    ++round;
    for (auto& g : more.games) db.games.push_back(std::move(g));
  }
  db.truncate_positions(target);
  return db;
}

// File format: first line "size=N count=M", then M lines of space-separated cells.

inline void write_db(const PositionDatabase& db, std::ostream& out) {
  out << "size=" << db.size << " count=" << db.games.size() << '\n';
  for (const auto& g : db.games) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i > 0) out << ' ';
      out << to_string(g[i]);
    }
    out << '\n';
  }
}

inline PositionDatabase read_db(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty database file");
  PositionDatabase db;
  std::size_t count = 0;
  {
    int size = 0;
    long long n = -1;
    char tail = 0;
    if (std::sscanf(header.c_str(), "size=%d count=%lld%c", &size, &n, &tail) != 2 || n < 0) {
      throw ParseError("bad database header '" + header + "'");
    }
    if (size < kMinBoardSize || size > kMaxBoardSize) throw ParseError("database board size out of range");
    db.size = size;
    count = static_cast<std::size_t>(n);
  }
  std::string line;
  for (std::size_t g = 0; g < count; ++g) {
    if (!std::getline(in, line)) throw ParseError("database ends after " + std::to_string(g) + " games");
    std::istringstream tokens(line);
    std::vector<Cell> moves;
    Board b = new_board(db.size);
    for (std::string tok; tokens >> tok;) {
      const Cell c = parse_cell(tok, db.size);
      try {
        b.apply(c);
      } catch (const Error& e) {
        throw ParseError("database game " + std::to_string(g + 1) + " does not replay: " + e.what());
      }
      if (b.finished()) throw ParseError("database game " + std::to_string(g + 1) + " contains a decided position");
      moves.push_back(c);
    }
    db.games.push_back(std::move(moves));
  }
  if (std::getline(in, line) && !line.empty()) throw ParseError("trailing data after the last database game");
  return db;
}

inline void save_db(const PositionDatabase& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_db(db, out);
}

inline PositionDatabase load_db(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_db(in);
}

}  // namespace hexq
