#pragma once

#include <limits>
#include <vector>

#include "tidy/semantic_map.hpp"

namespace tidy {

inline constexpr double kLethalCost = std::numeric_limits<double>::infinity();

/// Per-cell traversal cost derived from a SemanticMap. Occupied and Unknown
/// cells are Lethal, as are registered receptacle positions (furniture).
/// Cells within `radius` (Chebyshev) of an Occupied cell are Lethal; beyond
/// that the cost decays linearly back to the base cost of 1.
struct Costmap {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  std::vector<double> cost;

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  double at(Cell c) const { return cost[static_cast<std::size_t>(c.y) * width + c.x]; }
  bool lethal(Cell c) const { return at(c) == kLethalCost; }
};

Costmap inflate(const SemanticMap& map, int radius_cells);

}  // namespace tidy
