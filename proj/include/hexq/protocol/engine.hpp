#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hexq/arena.hpp"
#include "hexq/board.hpp"
#include "hexq/error.hpp"

namespace hexq {

inline std::optional<Color> parse_color(std::string_view s) {
  if (s == "white" || s == "w" || s == "White" || s == "W") return Color::White;
  if (s == "black" || s == "b" || s == "Black" || s == "B") return Color::Black;
  return std::nullopt;
}

/// Line-oriented engine with GTP framing: "= payload\n\n" on success and
/// "? message\n\n" on failure.
class EngineSession {
 public:
  explicit EngineSession(Agent agent, int size = 13, std::uint64_t seed = 0)
      : agent_(std::move(agent)), board_(new_board(size)), rng_(seed) {}

  const Board& board() const noexcept { return board_; }
  bool quit_requested() const noexcept { return quit_; }

  /// Executes one command line; returns the framed response, or an empty
  /// string for blank and comment lines.
  std::string execute(const std::string& line) {
    std::istringstream in(line);
    std::string cmd;
    if (!(in >> cmd) || cmd.front() == '#') return {};
    std::vector<std::string> args;
    for (std::string a; in >> a;) args.push_back(a);

    try {
      if (cmd == "name") return ok("hexq");
      if (cmd == "version") return ok("1.0");
      if (cmd == "protocol_version") return ok("2");
      if (cmd == "list_commands") {
        return ok("name\nversion\nboardsize\nclear_board\nplay\ngenmove\nshowboard\nundo\nquit");
      }
      if (cmd == "quit") {
        quit_ = true;
        return ok("");
      }
      if (cmd == "boardsize") {
        if (args.size() != 1) return fail("syntax error");
        int n = 0;
        try {
          n = std::stoi(args[0]);
        } catch (const std::exception&) {
          return fail("syntax error");
        }
        if (n < kMinBoardSize || n > kMaxBoardSize) return fail("unacceptable size");
        board_ = new_board(n);
        history_.clear();
        return ok("");
      }
      if (cmd == "clear_board") {
        board_ = new_board(board_.size());
        history_.clear();
        return ok("");
      }
      if (cmd == "showboard") return ok("\n" + trimmed(diagram(board_)));
      if (cmd == "undo") {
        if (history_.empty()) return fail("cannot undo");
        const Color mover = history_.back().second;
        history_.pop_back();
        board_ = Board::setup(board_.size(), history_, mover);
        return ok("");
      }
      if (cmd == "play") {
        if (args.size() != 2) return fail("syntax error");
        const auto color = parse_color(args[0]);
        if (!color) return fail("invalid color");
        Cell cell;
        try {
          cell = parse_cell(args[1], board_.size());
        } catch (const ParseError&) {
          return fail("invalid coordinate");
        }
        if (board_.finished()) return fail("game over");
        if (board_.at(cell) != Stone::Empty) return fail("illegal move");
        board_ = board_.with_to_move(*color).play(cell);
        history_.push_back({cell, *color});
        return ok("");
      }
      if (cmd == "genmove") {
        if (args.size() != 1) return fail("syntax error");
        const auto color = parse_color(args[0]);
        if (!color) return fail("invalid color");
        if (board_.finished()) return fail("game over");
        const Board position = board_.with_to_move(*color);
        const Cell cell = choose_move(agent_, position, rng_);
        board_ = position.play(cell);
        history_.push_back({cell, *color});
        return ok(to_string(cell));
      }
    } catch (const Error& e) {
      return fail(e.what());
    }
    return fail("unknown command");
  }

 private:
  static std::string ok(const std::string& payload) { return "= " + payload + "\n\n"; }
  static std::string fail(const std::string& message) { return "? " + message + "\n\n"; }
  static std::string trimmed(std::string s) {
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
  }

  Agent agent_;
  Board board_;
  std::vector<std::pair<Cell, Color>> history_;
  std::mt19937_64 rng_;
  bool quit_ = false;
};

/// Reads commands until `quit` or end of input.
inline void engine_loop(EngineSession& session, std::istream& in, std::ostream& out) {
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string response = session.execute(line);
    if (!response.empty()) out << response << std::flush;
    if (session.quit_requested()) break;
  }
}

}  // namespace hexq
