#include "tidy/world.hpp"

#include <algorithm>
#include <cmath>

namespace tidy {
namespace {

constexpr double kPi = 3.14159265358979323846;

double heading_angle(Heading h) {
  const Cell d = heading_delta(h);
  return std::atan2(static_cast<double>(d.y), static_cast<double>(d.x));
}

bool in_field_of_view(const RobotState& robot, Cell target, double range, double fov_degrees) {
  const Cell rc = robot.pose.cell();
  const double dist = euclidean(rc, target);
  if (dist > range + 1e-9) return false;
  if (fov_degrees >= 360.0 || (target == rc)) return true;
  const double to_target = std::atan2(static_cast<double>(target.y - rc.y),
                                      static_cast<double>(target.x - rc.x));
  double diff = std::fabs(to_target - heading_angle(robot.pose.heading));
  if (diff > kPi) diff = 2 * kPi - diff;
  return diff <= fov_degrees * kPi / 360.0 + 1e-9;
}

}  // namespace

const char* to_string(FailReason reason) {
  switch (reason) {
    case FailReason::None: return "None";
    case FailReason::HandOccupied: return "HandOccupied";
    case FailReason::NothingHeld: return "NothingHeld";
    case FailReason::OutOfReach: return "OutOfReach";
    case FailReason::ContainerClosed: return "ContainerClosed";
    case FailReason::NotOpenable: return "NotOpenable";
    case FailReason::InjectedFault: return "InjectedFault";
    case FailReason::ObjectDropped: return "ObjectDropped";
  }
  return "?";
}

ObjectInstance& WorldState::object(int id) {
  if (id < 0 || id >= static_cast<int>(objects.size()))
    fail(ErrorCode::UnknownObject, "no object with id " + std::to_string(id));
  return objects[id];
}

const ObjectInstance& WorldState::object(int id) const {
  return const_cast<WorldState*>(this)->object(id);
}

const ReceptacleRecord& WorldState::receptacle(int id) const {
  if (id < 0 || id >= static_cast<int>(map.receptacles.size()))
    fail(ErrorCode::UnknownReceptacle, "no receptacle with id " + std::to_string(id));
  return map.receptacles[id];
}

bool WorldState::receptacle_is_open(int id) const {
  receptacle(id);
  return id < static_cast<int>(receptacle_open.size()) && receptacle_open[id];
}

bool WorldState::cell_blocked(Cell c) const {
  if (!map.in_bounds(c)) return true;
  if (map.cell(c) != CellState::Free) return true;
  for (const auto& rec : map.receptacles)
    if (rec.position == c) return true;
  return false;
}

bool WorldState::within_reach(Cell c) const {
  return chebyshev(robot.pose.cell(), c) <= robot.reach;
}

void WorldState::queue_move(Cell c) { queued_move = c; }

void WorldState::sync_open_state() {
  if (receptacle_open.size() < map.receptacles.size())
    receptacle_open.resize(map.receptacles.size(), false);
}

std::vector<Detection> scan(WorldState& world, const ScanParams& params) {
  world.sync_open_state();
  const double range = params.range.value_or(world.robot.sensor.range);
  const double fov = params.fov_degrees.value_or(world.robot.sensor.fov_degrees);
  const std::string robot_room = world.map.room_at(world.robot.pose.cell());

  auto visible = [&](Cell pos) {
    if (params.whole_room)
      return !robot_room.empty() && world.map.room_at(pos) == robot_room;
    return in_field_of_view(world.robot, pos, range, fov);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto dropped_out = [&]() {
    return world.inject.p_miss > 0.0 && unit(world.rng) < world.inject.p_miss;
  };

  std::vector<Detection> out;
  const auto receptacle_snapshot = world.map.receptacles;  // registry mutates below
  for (const auto& rec : receptacle_snapshot) {
    if (!visible(rec.position) || dropped_out()) continue;
    Detection d;
    d.kind = Detection::Kind::Receptacle;
    d.id = rec.id;
    d.cls = rec.receptacle_class;
    d.position = rec.position;
    out.push_back(std::move(d));
  }
  for (const auto& obj : world.objects) {
    if (obj.location.kind == Containment::Held) continue;
    if (obj.location.kind == Containment::InsideReceptacle &&
        !world.receptacle_is_open(obj.location.receptacle_id))
      continue;
    if (!visible(obj.location.position) || dropped_out()) continue;
    Detection d;
    d.kind = Detection::Kind::Object;
    d.id = obj.id;
    d.cls = obj.object_class;
    d.position = obj.location.position;
    d.receptacle_id = obj.location.receptacle_id;
    d.mode = obj.location.kind;
    out.push_back(std::move(d));
  }
  for (const auto& d : out)
    if (d.kind == Detection::Kind::Receptacle)
      register_receptacle(world.map, {d.cls, d.position, world.tick});
  world.sync_open_state();
  return out;
}

ActionOutcome pickup(WorldState& world, int object_id) {
  ObjectInstance& obj = world.object(object_id);
  if (world.robot.held.has_value()) return ActionOutcome::failed(FailReason::HandOccupied);
  if (obj.location.kind == Containment::Dropped)
    return ActionOutcome::failed(FailReason::ObjectDropped);
  if (!world.within_reach(obj.location.position))
    return ActionOutcome::failed(FailReason::OutOfReach);
  if (obj.location.kind == Containment::InsideReceptacle &&
      !world.receptacle_is_open(obj.location.receptacle_id))
    return ActionOutcome::failed(FailReason::ContainerClosed);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (world.inject.p_drop > 0.0 && unit(world.rng) < world.inject.p_drop) {
    obj.location = {Containment::Dropped, -1, world.robot.pose.cell()};
    world.dropped_object = true;
    return ActionOutcome::failed(FailReason::ObjectDropped);
  }
  if (world.inject.p_fail_pick > 0.0 && unit(world.rng) < world.inject.p_fail_pick)
    return ActionOutcome::failed(FailReason::InjectedFault);

  obj.location = {Containment::Held, -1, {}};
  world.robot.held = object_id;
  return ActionOutcome::succeeded();
}

ActionOutcome place(WorldState& world, int receptacle_id, PlaceMode mode) {
  const ReceptacleRecord& rec = world.receptacle(receptacle_id);
  if (!world.robot.held.has_value()) return ActionOutcome::failed(FailReason::NothingHeld);
  if (!world.within_reach(rec.position)) return ActionOutcome::failed(FailReason::OutOfReach);
  if (mode == PlaceMode::Inside) {
    if (!rec.openable) return ActionOutcome::failed(FailReason::NotOpenable);
    if (!world.receptacle_is_open(receptacle_id))
      return ActionOutcome::failed(FailReason::ContainerClosed);
  }
  if (world.inject.fail_place_first > 0) {
    --world.inject.fail_place_first;
    return ActionOutcome::failed(FailReason::InjectedFault);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (world.inject.p_drop > 0.0 && unit(world.rng) < world.inject.p_drop) {
    ObjectInstance& obj = world.object(*world.robot.held);
    obj.location = {Containment::Dropped, -1, world.robot.pose.cell()};
    world.robot.held.reset();
    world.dropped_object = true;
    return ActionOutcome::failed(FailReason::ObjectDropped);
  }
  if (world.inject.p_fail_place > 0.0 && unit(world.rng) < world.inject.p_fail_place)
    return ActionOutcome::failed(FailReason::InjectedFault);

  ObjectInstance& obj = world.object(*world.robot.held);
  obj.location.kind =
      mode == PlaceMode::On ? Containment::OnReceptacle : Containment::InsideReceptacle;
  obj.location.receptacle_id = receptacle_id;
  obj.location.position = rec.position;
  world.robot.held.reset();
  return ActionOutcome::succeeded();
}

ActionOutcome open_receptacle(WorldState& world, int receptacle_id) {
  const ReceptacleRecord& rec = world.receptacle(receptacle_id);
  if (!rec.openable) return ActionOutcome::failed(FailReason::NotOpenable);
  if (!world.within_reach(rec.position)) return ActionOutcome::failed(FailReason::OutOfReach);
  if (world.robot.held.has_value()) return ActionOutcome::failed(FailReason::HandOccupied);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (world.inject.p_fail_open > 0.0 && unit(world.rng) < world.inject.p_fail_open)
    return ActionOutcome::failed(FailReason::InjectedFault);
  world.sync_open_state();
  world.receptacle_open[receptacle_id] = true;
  return ActionOutcome::succeeded();
}

int find_temp_location(const WorldState& world, int inflate_radius) {
  if (!world.robot.held.has_value())
    fail(ErrorCode::NoTempLocation, "robot is not holding an object");
  const std::string room = world.map.room_at(world.robot.pose.cell());
  if (room.empty()) fail(ErrorCode::NoTempLocation, "robot is not inside a labeled room");

  struct Entry {
    double dist;
    int id;
    Cell position;
  };
  std::vector<Entry> candidates;
  for (const auto& rec : world.map.receptacles)
    if (rec.room == room && !rec.openable)
      candidates.push_back({euclidean(world.robot.pose.cell(), rec.position), rec.id,
                            rec.position});
  std::sort(candidates.begin(), candidates.end(), [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });

  const Costmap cm = world_costmap(world, inflate_radius);
  for (const auto& cand : candidates) {
    try {
      const Path path = carrot_plan(cm, world.robot.pose.cell(), cand.position);
      const Cell end = path.empty() ? world.robot.pose.cell() : path.cells.back().cell();
      if (chebyshev(end, cand.position) <= world.robot.reach) return cand.id;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPathExists && e.code() != ErrorCode::NoApproachExists) throw;
    }
  }
  fail(ErrorCode::NoTempLocation, "no reachable non-openable receptacle in room '" + room + "'");
}

void step(WorldState& world) {
  ++world.tick;
  if (world.queued_move.has_value()) {
    const Cell target = *world.queued_move;
    world.queued_move.reset();
    const Cell cur = world.robot.pose.cell();
    if (chebyshev(cur, target) == 1 && !world.cell_blocked(target)) {
      world.robot.pose.heading = heading_from_delta(target.x - cur.x, target.y - cur.y);
      world.robot.pose.x = target.x;
      world.robot.pose.y = target.y;
    }
  }
}

FollowStatus PathFollower::advance(WorldState& world) {
  if (path.cells.empty()) return FollowStatus::Arrived;
  const Cell cur = world.robot.pose.cell();
  if (cur == path.cells.back().cell()) return FollowStatus::Arrived;
  std::size_t next = 0;
  for (std::size_t i = 0; i < path.cells.size(); ++i)
    if (path.cells[i].cell() == cur) {
      next = i + 1;
      break;
    }
  const Cell target = path.cells[next].cell();
  if (world.cell_blocked(target)) return FollowStatus::Blocked;
  world.queue_move(target);
  return FollowStatus::Advancing;
}

Costmap world_costmap(const WorldState& world, int inflate_radius) {
  return inflate(world.map, inflate_radius);
}

}  // namespace tidy
