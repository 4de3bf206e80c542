#pragma once

#include <cstddef>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/error.hpp"

namespace hexq {

enum Channel : int {
  kWhitePresent = 0,
  kBlackPresent = 1,
  kWhiteLeft = 2,
  kWhiteRight = 3,
  kBlackTop = 4,
  kBlackBottom = 5,
};

inline constexpr int kInputChannels = 6;
inline constexpr int kPadding = 2;

/// Network input: 6 binary planes over the board plus a two-cell border.
/// Stored channel-major, `values[(ch * extent + y) * extent + x]`.
template <typename T>
struct InputTensor {
  int board_size = 0;
  std::vector<T> values;

  int extent() const noexcept { return board_size + 2 * kPadding; }

  T& at(int ch, int y, int x) noexcept {
    return values[static_cast<std::size_t>((ch * extent() + y) * extent() + x)];
  }
  T at(int ch, int y, int x) const noexcept {
    return values[static_cast<std::size_t>((ch * extent() + y) * extent() + x)];
  }

  friend bool operator==(const InputTensor&, const InputTensor&) = default;
};

/// Encodes a White-to-move position. Interior cell (r, c) lands at (r + 2, c + 2).
/// Left/right border columns are white stones joined to their edge, top/bottom
/// border rows are black stones joined to theirs, and the four 2x2 corners are
/// both at once.
template <typename T = float>
InputTensor<T> encode(const Board& board) {
  if (board.to_move() != Color::White) {
    throw UsageError("encode expects White to move; apply transpose_swap first");
  }
  const int n = board.size();
  InputTensor<T> t;
  t.board_size = n;
  const int e = t.extent();
  t.values.assign(static_cast<std::size_t>(kInputChannels * e * e), T(0));

  for (int y = 0; y < e; ++y) {
    for (int x = 0; x < e; ++x) {
      const bool left = x < kPadding;
      const bool right = x >= n + kPadding;
      const bool top = y < kPadding;
      const bool bottom = y >= n + kPadding;
      if (left || right) {
        t.at(kWhitePresent, y, x) = T(1);
        t.at(left ? kWhiteLeft : kWhiteRight, y, x) = T(1);
      }
      if (top || bottom) {
        t.at(kBlackPresent, y, x) = T(1);
        t.at(top ? kBlackTop : kBlackBottom, y, x) = T(1);
      }
    }
  }

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Cell cell{r, c};
      const int y = r + kPadding;
      const int x = c + kPadding;
      switch (board.at(cell)) {
        case Stone::White:
          t.at(kWhitePresent, y, x) = T(1);
          if (board.connected(cell, Edge::Left)) t.at(kWhiteLeft, y, x) = T(1);
          if (board.connected(cell, Edge::Right)) t.at(kWhiteRight, y, x) = T(1);
          break;
        case Stone::Black:
          t.at(kBlackPresent, y, x) = T(1);
          if (board.connected(cell, Edge::Top)) t.at(kBlackTop, y, x) = T(1);
          if (board.connected(cell, Edge::Bottom)) t.at(kBlackBottom, y, x) = T(1);
          break;
        case Stone::Empty:
          break;
      }
    }
  }
  return t;
}

}  // namespace hexq
