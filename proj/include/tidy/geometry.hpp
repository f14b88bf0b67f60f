#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "tidy/error.hpp"

namespace tidy {

/// Eight compass directions; N points toward row 0 (up in renders).
enum class Heading : std::uint8_t { N, NE, E, SE, S, SW, W, NW };

inline const char* to_string(Heading h) {
  static const char* names[8] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  return names[static_cast<int>(h)];
}

Heading parse_heading(const std::string& token);

struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
};

struct GridPose {
  int x = 0;
  int y = 0;
  Heading heading = Heading::E;

  Cell cell() const { return {x, y}; }
  bool operator==(const GridPose&) const = default;
};

inline double euclidean(Cell a, Cell b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

/// Unit step for a heading, in (dx, dy) with y growing downward.
inline Cell heading_delta(Heading h) {
  static constexpr std::array<Cell, 8> deltas = {
      Cell{0, -1}, Cell{1, -1}, Cell{1, 0}, Cell{1, 1},
      Cell{0, 1},  Cell{-1, 1}, Cell{-1, 0}, Cell{-1, -1}};
  return deltas[static_cast<int>(h)];
}

/// Heading that best matches a single-cell move (dx, dy in {-1,0,1}).
Heading heading_from_delta(int dx, int dy);

}  // namespace tidy
