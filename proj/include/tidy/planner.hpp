#pragma once

#include <vector>

#include "tidy/costmap.hpp"

namespace tidy {

enum class Connectivity { Four, Eight };

/// Cells to traverse, excluding the start cell. Each pose's heading is the
/// direction of the step that enters it.
struct Path {
  std::vector<GridPose> cells;
  double total_cost = 0.0;

  bool empty() const { return cells.empty(); }
  std::size_t length() const { return cells.size(); }
};

/// Minimum-cost path via A* with a fixed neighbor expansion order
/// (E,N,W,S,NE,NW,SW,SE) so equal-cost ties resolve deterministically.
/// Diagonal steps cost the cell cost times sqrt(2). Empty path when
/// start == goal.
Path plan_point_goal(const Costmap& cm, Cell start, Cell goal,
                     Connectivity connectivity = Connectivity::Eight);

/// Local approach toward a possibly-Lethal goal: walks the Bresenham segment
/// from start toward goal, takes the last non-Lethal cell before the first
/// Lethal one as the carrot, and point-goal plans to it. When the segment is
/// blocked immediately, falls back to the reachable non-Lethal cell nearest
/// the goal within `fallback_radius` cells of it.
Path carrot_plan(const Costmap& cm, Cell start, Cell goal, int fallback_radius = 3,
                 Connectivity connectivity = Connectivity::Eight);

/// 8-connected raster segment from a to b, inclusive of both endpoints.
std::vector<Cell> bresenham_line(Cell a, Cell b);

}  // namespace tidy
