#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hexq/error.hpp"

namespace hexq {

// White joins the left and right edges, Black joins top and bottom.
enum class Color : std::uint8_t { White, Black };

constexpr Color opponent(Color c) noexcept {
  return c == Color::White ? Color::Black : Color::White;
}

inline std::string_view to_string(Color c) noexcept {
  return c == Color::White ? "white" : "black";
}

enum class Stone : std::uint8_t { Empty, White, Black };

constexpr Stone stone_of(Color c) noexcept {
  return c == Color::White ? Stone::White : Stone::Black;
}

inline constexpr int kMinBoardSize = 5;
inline constexpr int kMaxBoardSize = 13;
inline constexpr int kMaxCells = kMaxBoardSize * kMaxBoardSize;

struct Cell {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// The six neighbours of (r, c) are (r + dr, c + dc) for these offsets.
inline constexpr std::array<Cell, 6> kNeighborOffsets{
    {{-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}}};

/// Hex distance between two cells under the neighbour convention above.
constexpr int hex_distance(int drow, int dcol) noexcept {
  auto abs = [](int v) { return v < 0 ? -v : v; };
  return (abs(drow) + abs(dcol) + abs(drow + dcol)) / 2;
}

enum class Edge : std::uint8_t { Left, Right, Top, Bottom };

constexpr Color owner(Edge e) noexcept {
  return (e == Edge::Left || e == Edge::Right) ? Color::White : Color::Black;
}

/// A Hex position. Cheap to copy; connectivity to the four board edges is kept
/// in a union-find over the cells plus four virtual edge nodes, so winner
/// detection is a pair of root lookups.
class Board {
 public:
  Board() : Board(kMinBoardSize) {}

  /// Arbitrary position setup (analysis, tests, protocol). Accepts any size in
  /// [1, 13] and ignores move alternation; stones must be on distinct cells.
  static Board setup(int size, std::span<const std::pair<Cell, Color>> stones,
                     Color to_move) {
    if (size < 1 || size > kMaxBoardSize) {
      throw ConfigError("board size must be in [1, 13], got " + std::to_string(size));
    }
    Board b(size);
    for (const auto& [cell, color] : stones) {
      if (!b.contains(cell)) throw IllegalMoveError("cell off board");
      if (b.at(cell) != Stone::Empty) throw IllegalMoveError("cell occupied");
      b.place_stone(b.index(cell), color);
    }
    b.to_move_ = to_move;
    return b;
  }

  int size() const noexcept { return size_; }
  int cell_count() const noexcept { return size_ * size_; }
  Color to_move() const noexcept { return to_move_; }
  int move_count() const noexcept { return stones_; }

  bool contains(Cell c) const noexcept {
    return c.row >= 0 && c.col >= 0 && c.row < size_ && c.col < size_;
  }
  int index(Cell c) const noexcept { return c.row * size_ + c.col; }
  Cell cell_at(int index) const noexcept { return {index / size_, index % size_}; }

  Stone at(Cell c) const noexcept { return cells_[static_cast<std::size_t>(index(c))]; }
  Stone at(int index) const noexcept { return cells_[static_cast<std::size_t>(index)]; }

  std::optional<Color> winner() const noexcept { return winner_; }
  bool finished() const noexcept { return winner_.has_value(); }

  /// True when `c` holds a stone whose group touches `e` (a same-colour edge).
  bool connected(Cell c, Edge e) const noexcept {
    const Stone s = at(c);
    if (s == Stone::Empty || s != stone_of(owner(e))) return false;
    return find(index(c)) == find(edge_node(e));
  }

  /// Root of the connectivity class of a cell or edge; equal roots mean connected.
  int group_of(int cell_index) const noexcept { return find(cell_index); }
  int group_of(Edge e) const noexcept { return find(edge_node(e)); }

  std::vector<Cell> legal_moves() const {
    std::vector<Cell> moves;
    if (finished()) return moves;
    moves.reserve(static_cast<std::size_t>(cell_count() - stones_));
    for (int i = 0; i < cell_count(); ++i) {
      if (cells_[static_cast<std::size_t>(i)] == Stone::Empty) moves.push_back(cell_at(i));
    }
    return moves;
  }

  /// Places a stone of the side to move and passes the turn.
  void apply(Cell c) {
    if (finished()) throw GameOverError("game over");
    if (!contains(c)) throw IllegalMoveError("cell off board");
    if (at(c) != Stone::Empty) throw IllegalMoveError("illegal move");
    place_stone(index(c), to_move_);
    to_move_ = opponent(to_move_);
  }

  Board play(Cell c) const {
    Board next = *this;
    next.apply(c);
    return next;
  }

  /// Same stones, different side to move. Used where the first mover of a
  /// position is chosen independently of its stone counts.
  Board with_to_move(Color c) const {
    Board b = *this;
    b.to_move_ = c;
    return b;
  }

  friend bool operator==(const Board& a, const Board& b) noexcept {
    return a.size_ == b.size_ && a.to_move_ == b.to_move_ && a.cells_ == b.cells_;
  }

 private:
  explicit Board(int size) : size_(static_cast<std::uint8_t>(size)) {
    for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = static_cast<std::uint8_t>(i);
  }

  friend Board new_board(int size);
  friend Board transpose_swap(const Board& b);
  friend Board flip180(const Board& b);

  static constexpr int edge_node(Edge e) noexcept { return kMaxCells + static_cast<int>(e); }

  int find(int x) const noexcept {
    while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
    return x;
  }

  void unite(int a, int b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return;
    auto& ra = rank_[static_cast<std::size_t>(a)];
    auto& rb = rank_[static_cast<std::size_t>(b)];
    if (ra < rb) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(a);
    if (ra == rb) ++rank_[static_cast<std::size_t>(a)];
  }

  void place_stone(int idx, Color color) noexcept {
    cells_[static_cast<std::size_t>(idx)] = stone_of(color);
    ++stones_;
    const int r = idx / size_;
    const int c = idx % size_;
    for (const Cell d : kNeighborOffsets) {
      const Cell n{r + d.row, c + d.col};
      if (contains(n) && at(n) == stone_of(color)) unite(idx, index(n));
    }
    if (color == Color::White) {
      if (c == 0) unite(idx, edge_node(Edge::Left));
      if (c == size_ - 1) unite(idx, edge_node(Edge::Right));
      if (find(edge_node(Edge::Left)) == find(edge_node(Edge::Right))) winner_ = Color::White;
    } else {
      if (r == 0) unite(idx, edge_node(Edge::Top));
      if (r == size_ - 1) unite(idx, edge_node(Edge::Bottom));
      if (find(edge_node(Edge::Top)) == find(edge_node(Edge::Bottom))) winner_ = Color::Black;
    }
  }

  std::uint8_t size_;
  Color to_move_ = Color::White;
  int stones_ = 0;
  std::optional<Color> winner_;
  std::array<Stone, kMaxCells> cells_{};
  std::array<std::uint8_t, kMaxCells + 4> parent_{};
  std::array<std::uint8_t, kMaxCells + 4> rank_{};
};

/// Empty board of a playable size, White to move.
inline Board new_board(int size) {
  if (size < kMinBoardSize || size > kMaxBoardSize) {
    throw ConfigError("board size must be in [5, 13], got " + std::to_string(size));
  }
  return Board(size);
}

/// Mirror across the main diagonal and exchange colours: (r, c) of colour K
/// becomes (c, r) of the other colour. The side to move flips with it, so the
/// result is the same game seen from the other player's seat.
inline Board transpose_swap(const Board& b) {
  Board out(b.size());
  for (int i = 0; i < b.cell_count(); ++i) {
    const Stone s = b.at(i);
    if (s == Stone::Empty) continue;
    const Cell c = b.cell_at(i);
    out.place_stone(out.index({c.col, c.row}), s == Stone::White ? Color::Black : Color::White);
  }
  out.to_move_ = opponent(b.to_move());
  return out;
}

/// 180 degree rotation; colours and side to move are unchanged.
inline Board flip180(const Board& b) {
  Board out(b.size());
  const int n = b.size();
  for (int i = 0; i < b.cell_count(); ++i) {
    const Stone s = b.at(i);
    if (s == Stone::Empty) continue;
    const Cell c = b.cell_at(i);
    out.place_stone(out.index({n - 1 - c.row, n - 1 - c.col}),
                    s == Stone::White ? Color::White : Color::Black);
  }
  out.to_move_ = b.to_move();
  return out;
}

constexpr Cell transpose(Cell c) noexcept { return {c.col, c.row}; }
constexpr Cell rotate180(Cell c, int size) noexcept {
  return {size - 1 - c.row, size - 1 - c.col};
}

/// "a1" is row 0, column 0; the letter names the column, the number the row.
inline std::string to_string(Cell c) {
  std::string s(1, static_cast<char>('a' + c.col));
  s += std::to_string(c.row + 1);
  return s;
}

inline Cell parse_cell(std::string_view text, int size) {
  if (text.size() < 2) throw ParseError("malformed cell '" + std::string(text) + "'");
  char letter = text.front();
  if (letter >= 'A' && letter <= 'Z') letter = static_cast<char>(letter - 'A' + 'a');
  if (letter < 'a' || letter > 'z') throw ParseError("malformed cell '" + std::string(text) + "'");
  const std::string_view digits = text.substr(1);
  if (digits.front() == '0') throw ParseError("malformed cell '" + std::string(text) + "'");
  int row = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), row);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ParseError("malformed cell '" + std::string(text) + "'");
  }
  const Cell cell{row - 1, letter - 'a'};
  if (cell.row < 0 || cell.col < 0 || cell.row >= size || cell.col >= size) {
    throw ParseError("cell '" + std::string(text) + "' outside a " + std::to_string(size) +
                     "x" + std::to_string(size) + " board");
  }
  return cell;
}

/// Board replayed from the empty position through a move list.
inline Board replay(int size, std::span<const Cell> moves) {
  Board b = new_board(size);
  for (const Cell c : moves) b.apply(c);
  return b;
}

/// Rhombus diagram, one row per line, each row shifted right by one more
/// space: O is white, @ is black, . is empty.
inline std::string diagram(const Board& b) {
  std::ostringstream out;
  out << "   ";
  for (int c = 0; c < b.size(); ++c) out << static_cast<char>('a' + c) << ' ';
  out << '\n';
  for (int r = 0; r < b.size(); ++r) {
    out << std::string(static_cast<std::size_t>(r), ' ');
    if (r + 1 < 10) out << ' ';
    out << r + 1 << ' ';
    for (int c = 0; c < b.size(); ++c) {
      const Stone s = b.at(Cell{r, c});
      out << (s == Stone::White ? 'O' : s == Stone::Black ? '@' : '.');
      if (c + 1 < b.size()) out << ' ';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hexq
