#include "tidy/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>

namespace tidy {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Fixed expansion order: E, N, W, S, NE, NW, SW, SE.
struct Step {
  int dx, dy;
  bool diagonal;
};
constexpr Step kSteps[8] = {{1, 0, false}, {0, -1, false}, {-1, 0, false}, {0, 1, false},
                            {1, -1, true}, {-1, -1, true}, {-1, 1, true},  {1, 1, true}};

double octile(Cell a, Cell b) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
}

struct OpenEntry {
  double f;
  std::uint64_t seq;
  int index;
};
struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    return a.seq > b.seq;  // earlier insertion wins on ties
  }
};

Path reconstruct(const Costmap& cm, const std::vector<int>& parent, Cell start, Cell goal,
                 double total_cost) {
  Path path;
  path.total_cost = total_cost;
  std::vector<Cell> rev;
  Cell c = goal;
  while (!(c == start)) {
    rev.push_back(c);
    const int p = parent[static_cast<std::size_t>(c.y) * cm.width + c.x];
    c = {p % cm.width, p / cm.width};
  }
  std::reverse(rev.begin(), rev.end());
  Cell prev = start;
  for (const Cell& step : rev) {
    path.cells.push_back(
        GridPose{step.x, step.y, heading_from_delta(step.x - prev.x, step.y - prev.y)});
    prev = step;
  }
  return path;
}

}  // namespace

Path plan_point_goal(const Costmap& cm, Cell start, Cell goal, Connectivity connectivity) {
  if (!cm.in_bounds(start) || cm.lethal(start))
    fail(ErrorCode::NoPathExists, "start cell is untraversable");
  if (!cm.in_bounds(goal) || cm.lethal(goal))
    fail(ErrorCode::GoalUntraversable, "goal cell (" + std::to_string(goal.x) + "," +
                                           std::to_string(goal.y) + ") is untraversable");
  if (start == goal) return Path{};

  const std::size_t n = static_cast<std::size_t>(cm.width) * cm.height;
  std::vector<double> g(n, kLethalCost);
  std::vector<int> parent(n, -1);
  std::vector<bool> closed(n, false);

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::uint64_t seq = 0;
  const int start_idx = start.y * cm.width + start.x;
  g[start_idx] = 0.0;
  open.push({octile(start, goal), seq++, start_idx});

  const int step_count = connectivity == Connectivity::Four ? 4 : 8;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = true;
    const Cell cur{top.index % cm.width, top.index / cm.width};
    if (cur == goal) return reconstruct(cm, parent, start, goal, g[top.index]);
    for (int s = 0; s < step_count; ++s) {
      const Cell nb{cur.x + kSteps[s].dx, cur.y + kSteps[s].dy};
      if (!cm.in_bounds(nb) || cm.lethal(nb)) continue;
      const std::size_t ni = static_cast<std::size_t>(nb.y) * cm.width + nb.x;
      if (closed[ni]) continue;
      const double step_cost = cm.at(nb) * (kSteps[s].diagonal ? kSqrt2 : 1.0);
      const double cand = g[top.index] + step_cost;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = top.index;
        open.push({cand + octile(nb, goal), seq++, static_cast<int>(ni)});
      }
    }
  }
  fail(ErrorCode::NoPathExists, "no traversable path from start to goal");
}

std::vector<Cell> bresenham_line(Cell a, Cell b) {
  std::vector<Cell> out;
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x);
  const int dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1;
  const int sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    out.push_back({x, y});
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return out;
}

Path carrot_plan(const Costmap& cm, Cell start, Cell goal, int fallback_radius,
                 Connectivity connectivity) {
  if (!cm.in_bounds(start) || cm.lethal(start))
    fail(ErrorCode::NoPathExists, "start cell is untraversable");
  if (!cm.in_bounds(goal))
    fail(ErrorCode::NoApproachExists, "goal cell outside the grid");
  if (start == goal) return Path{};

  const auto segment = bresenham_line(start, goal);
  Cell carrot = start;
  for (std::size_t i = 1; i < segment.size(); ++i) {
    if (cm.lethal(segment[i])) break;
    carrot = segment[i];
  }
  if (!(carrot == start)) return plan_point_goal(cm, start, carrot, connectivity);

  // Segment blocked immediately: approach the reachable non-Lethal cell
  // nearest the goal within the fallback radius (including the start).
  struct Candidate {
    double dist;
    Cell cell;
  };
  std::vector<Candidate> candidates;
  for (int y = goal.y - fallback_radius; y <= goal.y + fallback_radius; ++y)
    for (int x = goal.x - fallback_radius; x <= goal.x + fallback_radius; ++x) {
      const Cell c{x, y};
      if (!cm.in_bounds(c) || cm.lethal(c)) continue;
      if (euclidean(c, goal) > fallback_radius + 1e-9) continue;
      candidates.push_back({euclidean(c, goal), c});
    }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.cell.y != b.cell.y) return a.cell.y < b.cell.y;
    return a.cell.x < b.cell.x;
  });
  for (const auto& cand : candidates) {
    if (cand.cell == start) return Path{};
    try {
      return plan_point_goal(cm, start, cand.cell, connectivity);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPathExists) throw;
    }
  }
  fail(ErrorCode::NoApproachExists, "no reachable approach cell near the goal");
}

}  // namespace tidy
