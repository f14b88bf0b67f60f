#include "tidy/costmap.hpp"

#include <deque>

namespace tidy {
namespace {

// Weight of the inflation gradient just outside the lethal band.
constexpr double kInflationWeight = 4.0;

}  // namespace

Costmap inflate(const SemanticMap& map, int radius_cells) {
  Costmap cm;
  cm.width = map.width;
  cm.height = map.height;
  cm.resolution = map.resolution;
  cm.cost.assign(static_cast<std::size_t>(map.width) * map.height, 1.0);

  // Chebyshev distance to the nearest Occupied cell via 8-connected BFS.
  const int inf = std::numeric_limits<int>::max();
  std::vector<int> dist(cm.cost.size(), inf);
  std::deque<Cell> queue;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.cell({x, y}) == CellState::Occupied) {
        dist[static_cast<std::size_t>(y) * map.width + x] = 0;
        queue.push_back({x, y});
      }
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(c.y) * map.width + c.x];
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell n{c.x + dx, c.y + dy};
        if (!map.in_bounds(n)) continue;
        auto& nd = dist[static_cast<std::size_t>(n.y) * map.width + n.x];
        if (nd > d + 1) {
          nd = d + 1;
          queue.push_back(n);
        }
      }
  }

  const int span = radius_cells;  // decay width beyond the lethal band
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * map.width + x;
      const CellState s = map.cell({x, y});
      if (s != CellState::Free) {
        cm.cost[i] = kLethalCost;
        continue;
      }
      const int d = dist[i];
      if (d <= radius_cells) {
        cm.cost[i] = kLethalCost;
      } else if (span > 0 && d <= radius_cells + span) {
        cm.cost[i] =
            1.0 + kInflationWeight * static_cast<double>(radius_cells + span + 1 - d) / (span + 1);
      }
    }

  for (const auto& rec : map.receptacles)
    if (cm.in_bounds(rec.position))
      cm.cost[static_cast<std::size_t>(rec.position.y) * map.width + rec.position.x] = kLethalCost;

  return cm;
}

}  // namespace tidy
