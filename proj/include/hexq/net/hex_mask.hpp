#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hexq/board.hpp"
#include "hexq/error.hpp"

namespace hexq {

/// Window offset of one filter tap relative to the output position.
struct Tap {
  int dy = 0;
  int dx = 0;
};

inline void check_diameter(int diameter) {
  if (diameter != 3 && diameter != 5) {
    throw ConfigError("hexagonal filters come in diameter 3 or 5, got " + std::to_string(diameter));
  }
}

/// Square window (row-major, diameter x diameter) with 1 on cells within hex
/// distance diameter/2 of the centre and 0 elsewhere.
inline std::vector<std::uint8_t> hex_mask(int diameter) {
  check_diameter(diameter);
  const int radius = diameter / 2;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(diameter * diameter), 0);
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (hex_distance(dy, dx) <= radius) {
        mask[static_cast<std::size_t>((dy + radius) * diameter + dx + radius)] = 1;
      }
    }
  }
  return mask;
}

/// Active taps ordered by hex distance, row-major within a distance ring, so
/// the first 7 taps of diameter 5 are exactly the taps of diameter 3.
inline std::vector<Tap> hex_taps(int diameter) {
  check_diameter(diameter);
  const int radius = diameter / 2;
  std::vector<Tap> taps;
  for (int ring = 0; ring <= radius; ++ring) {
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        if (hex_distance(dy, dx) == ring) taps.push_back({dy, dx});
      }
    }
  }
  return taps;
}

inline int active_taps(int diameter) { return static_cast<int>(hex_taps(diameter).size()); }

}  // namespace hexq
