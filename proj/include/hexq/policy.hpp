#pragma once

#include <random>
#include <span>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/error.hpp"

namespace hexq {

/// Legal cell with the highest value; ties go to the lowest cell index.
template <typename T>
Cell argmax_legal(std::span<const T> values, std::span<const Cell> legal, int size) {
  if (legal.empty()) throw UsageError("no legal moves to choose from");
  Cell best = legal.front();
  T best_value = values[static_cast<std::size_t>(best.row * size + best.col)];
  for (const Cell c : legal.subspan(1)) {
    const T v = values[static_cast<std::size_t>(c.row * size + c.col)];
    const bool lower_index = c.row * size + c.col < best.row * size + best.col;
    if (v > best_value || (v == best_value && lower_index)) {
      best = c;
      best_value = v;
    }
  }
  return best;
}

template <typename T>
T max_legal_value(std::span<const T> values, std::span<const Cell> legal, int size) {
  const Cell c = argmax_legal(values, legal, size);
  return values[static_cast<std::size_t>(c.row * size + c.col)];
}

/// With probability epsilon a uniformly random legal cell, otherwise the
/// greedy legal cell.
template <typename T, typename Rng>
Cell epsilon_greedy(std::span<const T> values, std::span<const Cell> legal, double epsilon, int size,
                    Rng& rng) {
  if (legal.empty()) throw UsageError("epsilon_greedy needs at least one legal move");
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
      return legal[pick(rng)];
    }
  }
  return argmax_legal(values, legal, size);
}

}  // namespace hexq
