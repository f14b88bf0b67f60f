#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tidy/planner.hpp"
#include "tidy/world.hpp"

using namespace tidy;

namespace {

SemanticMap open_map(int w, int h) {
  std::ostringstream text;
  text << "width " << w << "\nheight " << h << "\nresolution 1\n";
  for (int y = 0; y < h; ++y) text << std::string(w, '.') << "\n";
  return load_map(text.str());
}

SemanticMap map_from_rows(const std::vector<std::string>& rows) {
  std::ostringstream text;
  text << "width " << rows[0].size() << "\nheight " << rows.size() << "\nresolution 1\n";
  for (const auto& row : rows) text << row << "\n";
  return load_map(text.str());
}

SemanticMap random_map(std::mt19937_64& rng, int w, int h, double density) {
  std::ostringstream text;
  text << "width " << w << "\nheight " << h << "\nresolution 1\n";
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) text << (u(rng) < density ? '#' : '.');
    text << "\n";
  }
  return load_map(text.str());
}

Cell random_free_cell(std::mt19937_64& rng, const Costmap& cm) {
  std::uniform_int_distribution<int> px(0, cm.width - 1), py(0, cm.height - 1);
  for (int i = 0; i < 10000; ++i) {
    const Cell c{px(rng), py(rng)};
    if (!cm.lethal(c)) return c;
  }
  return {-1, -1};
}

}  // namespace

TEST_CASE("inflate marks obstacles and unknown cells lethal at radius 0") {
  const SemanticMap map = map_from_rows({".#.", ".?.", "..."});
  const Costmap cm = inflate(map, 0);
  CHECK(cm.lethal({1, 0}));
  CHECK(cm.lethal({1, 1}));
  CHECK_FALSE(cm.lethal({0, 0}));
  CHECK(cm.at({0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("inflate radius 1 makes the 8-neighborhood of an obstacle lethal") {
  const SemanticMap map = map_from_rows({".....", ".....", "..#..", ".....", "....."});
  const Costmap cm = inflate(map, 1);
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) CHECK(cm.lethal({2 + dx, 2 + dy}));
  CHECK_FALSE(cm.lethal({0, 0}));
  // Beyond the lethal band the cost decays toward the base cost.
  CHECK(cm.at({0, 2}) > 1.0);
  CHECK(cm.at({0, 0}) >= 1.0);
}

TEST_CASE("inflate of an all-free map is a uniform base cost") {
  const Costmap cm = inflate(open_map(6, 4), 2);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) CHECK(cm.at({x, y}) == doctest::Approx(1.0));
}

TEST_CASE("registered receptacles are lethal in the costmap") {
  SemanticMap map = open_map(4, 4);
  map.rooms.push_back("hall");
  std::fill(map.room_labels.begin(), map.room_labels.end(), 0);
  register_receptacle(map, {"table", {2, 2}, 0});
  const Costmap cm = inflate(map, 0);
  CHECK(cm.lethal({2, 2}));
}

TEST_CASE("4-connected plan across an empty 5x5 grid takes 8 steps") {
  const Costmap cm = inflate(open_map(5, 5), 0);
  const Path path = plan_point_goal(cm, {0, 0}, {4, 4}, Connectivity::Four);
  CHECK(path.length() == 8);
  CHECK(path.total_cost == doctest::Approx(8.0));
  CHECK(path.cells.back().cell() == Cell{4, 4});
  CHECK(oracles::path_is_safe(cm, path));
}

TEST_CASE("plan through a one-gap wall matches the exhaustive oracle") {
  const SemanticMap map = map_from_rows({
      "...#...",
      "...#...",
      "...#...",
      "...#...",
      "...#...",
      ".......",
      "...#...",
  });
  const Costmap cm = inflate(map, 0);
  const Path path = plan_point_goal(cm, {0, 0}, {6, 0});
  const auto oracle = oracles::dijkstra_cost(cm, {0, 0}, {6, 0});
  REQUIRE(oracle.has_value());
  CHECK(path.total_cost == doctest::Approx(*oracle));
  CHECK(oracles::path_is_safe(cm, path));
  bool through_gap = false;
  for (const auto& pose : path.cells) through_gap |= (pose.cell() == Cell{3, 5});
  CHECK(through_gap);
}

TEST_CASE("plan errors: lethal goal, unreachable goal, trivial start") {
  const SemanticMap map = map_from_rows({".#.", ".#.", ".#."});
  const Costmap cm = inflate(map, 0);
  try {
    plan_point_goal(cm, {0, 0}, {1, 1});
    FAIL("expected GoalUntraversable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GoalUntraversable);
  }
  try {
    plan_point_goal(cm, {0, 0}, {2, 2});
    FAIL("expected NoPathExists");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPathExists);
  }
  CHECK(plan_point_goal(cm, {0, 1}, {0, 1}).empty());
}

TEST_CASE("carrot with a clear line reaches the goal itself") {
  const Costmap cm = inflate(open_map(7, 3), 0);
  const Path path = carrot_plan(cm, {0, 1}, {6, 1});
  REQUIRE(!path.empty());
  CHECK(path.cells.back().cell() == Cell{6, 1});
}

TEST_CASE("carrot toward a lethal goal stops on the last clear segment cell") {
  const SemanticMap map = map_from_rows({"......#"});
  const Costmap cm = inflate(map, 0);
  const Path path = carrot_plan(cm, {0, 0}, {6, 0});
  REQUIRE(!path.empty());
  CHECK(path.cells.back().cell() == Cell{5, 0});

  // Oracle ray walk: the carrot is the last non-lethal cell before the
  // first lethal one.
  const auto segment = oracles::ray_walk({0, 0}, {6, 0});
  Cell expected = {0, 0};
  for (std::size_t i = 1; i < segment.size(); ++i) {
    if (cm.lethal(segment[i])) break;
    expected = segment[i];
  }
  CHECK(path.cells.back().cell() == expected);
}

TEST_CASE("carrot start == goal gives an empty path") {
  const Costmap cm = inflate(open_map(3, 3), 0);
  CHECK(carrot_plan(cm, {1, 1}, {1, 1}).empty());
}

TEST_CASE("carrot falls back near a ringed goal and errors when sealed") {
  // Goal enclosed by a lethal ring; the fallback finds a cell within the
  // search radius.
  const SemanticMap ringed = map_from_rows({
      ".........",
      "...###...",
      "...#.#...",
      "...###...",
      ".........",
  });
  const Costmap cm = inflate(ringed, 0);
  const Path path = carrot_plan(cm, {0, 2}, {4, 2});
  REQUIRE(!path.empty());
  CHECK(euclidean(path.cells.back().cell(), {4, 2}) <= 3.0);
  CHECK(oracles::path_is_safe(cm, path));

  // A thick blob leaves nothing non-lethal within the fallback radius.
  const SemanticMap sealed = map_from_rows({
      "...........",
      ".#########.",
      ".#########.",
      ".#########.",
      ".#########.",
      ".#########.",
      ".#########.",
      ".#########.",
      "...........",
  });
  const Costmap cm2 = inflate(sealed, 0);
  try {
    carrot_plan(cm2, {0, 0}, {5, 4});
    FAIL("expected NoApproachExists");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoApproachExists);
  }
}

TEST_CASE("random grids: planner cost equals the exhaustive oracle") {
  std::mt19937_64 rng(42);
  int planned = 0;
  for (int seed_trial = 0; seed_trial < 10; ++seed_trial) {
    const SemanticMap map = random_map(rng, 32, 32, 0.2);
    const Costmap cm = inflate(map, 0);
    const Cell start = random_free_cell(rng, cm);
    const Cell goal = random_free_cell(rng, cm);
    if (start.x < 0 || goal.x < 0) continue;
    const auto oracle = oracles::dijkstra_cost(cm, start, goal);
    try {
      const Path path = plan_point_goal(cm, start, goal);
      REQUIRE(oracle.has_value());
      CHECK(path.total_cost == doctest::Approx(*oracle).epsilon(1e-9));
      CHECK(oracles::path_is_safe(cm, path));
      ++planned;
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::NoPathExists);
      CHECK_FALSE(oracle.has_value());
    }
  }
  CHECK(planned > 0);
}

TEST_CASE("carrot endpoint is never farther from the goal than the start") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const SemanticMap map = random_map(rng, 24, 24, 0.25);
    const Costmap cm = inflate(map, 0);
    const Cell start = random_free_cell(rng, cm);
    std::uniform_int_distribution<int> pc(0, 23);
    const Cell goal{pc(rng), pc(rng)};
    if (start.x < 0) continue;
    try {
      const Path path = carrot_plan(cm, start, goal);
      const Cell end = path.empty() ? start : path.cells.back().cell();
      CHECK(euclidean(end, goal) <= euclidean(start, goal) + 1e-9);
      CHECK(oracles::path_is_safe(cm, path));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoApproachExists);
    }
  }
}

TEST_CASE("plans are deterministic across repeated queries") {
  std::mt19937_64 rng(5);
  const SemanticMap map = random_map(rng, 24, 24, 0.2);
  const Costmap cm = inflate(map, 0);
  const Cell start = random_free_cell(rng, cm);
  const Cell goal = random_free_cell(rng, cm);
  try {
    const Path a = plan_point_goal(cm, start, goal);
    const Path b = plan_point_goal(cm, start, goal);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i] == b.cells[i]);
  } catch (const Error&) {
  }
}

TEST_CASE("path_follow advances one cell per tick to the path end") {
  WorldState world;
  world.map = open_map(6, 3);
  world.robot.pose = {0, 1, Heading::E};
  Path path;
  path.cells = {{1, 1, Heading::E}, {2, 1, Heading::E}, {3, 1, Heading::E}};
  PathFollower follower{path};

  for (int t = 0; t < 3; ++t) {
    CHECK(follower.advance(world) == FollowStatus::Advancing);
    step(world);
  }
  CHECK(world.robot.pose.cell() == Cell{3, 1});
  CHECK(world.tick == 3);
  CHECK(follower.advance(world) == FollowStatus::Arrived);
}

TEST_CASE("empty path is an immediate arrival") {
  WorldState world;
  world.map = open_map(3, 3);
  world.robot.pose = {1, 1, Heading::N};
  PathFollower follower{Path{}};
  CHECK(follower.advance(world) == FollowStatus::Arrived);
  CHECK(world.robot.pose.cell() == Cell{1, 1});
}

TEST_CASE("a receptacle registered onto a path cell blocks the follower") {
  WorldState world;
  world.map = open_map(6, 3);
  world.map.rooms.push_back("hall");
  std::fill(world.map.room_labels.begin(), world.map.room_labels.end(), 0);
  world.robot.pose = {0, 1, Heading::E};
  Path path;
  path.cells = {{1, 1, Heading::E}, {2, 1, Heading::E}, {3, 1, Heading::E}};
  PathFollower follower{path};

  CHECK(follower.advance(world) == FollowStatus::Advancing);
  step(world);
  register_receptacle(world.map, {"chair", {2, 1}, world.tick});
  CHECK(follower.advance(world) == FollowStatus::Blocked);
  CHECK(world.robot.pose.cell() == Cell{1, 1});
}
