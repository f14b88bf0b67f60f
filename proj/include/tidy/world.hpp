#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tidy/planner.hpp"
#include "tidy/semantic_map.hpp"

namespace tidy {

enum class Containment { OnReceptacle, InsideReceptacle, Held, Dropped };

struct ObjectLocation {
  Containment kind = Containment::OnReceptacle;
  int receptacle_id = -1;  // valid for On/Inside
  Cell position;           // valid when not held
};

struct ObjectInstance {
  int id = 0;
  std::string object_class;
  ObjectLocation location;
};

struct SensorConfig {
  double range = 8.0;
  double fov_degrees = 360.0;
};

struct RobotState {
  GridPose pose;
  std::optional<int> held;
  int reach = 1;
  SensorConfig sensor;
};

struct FailureInjection {
  double p_fail_pick = 0.0;
  double p_fail_place = 0.0;
  double p_fail_open = 0.0;
  double p_miss = 0.0;
  double p_drop = 0.0;
  int fail_place_first = 0;  // deterministically fail the first N place attempts
};

enum class FailReason {
  None,
  HandOccupied,
  NothingHeld,
  OutOfReach,
  ContainerClosed,
  NotOpenable,
  InjectedFault,
  ObjectDropped,
};

const char* to_string(FailReason reason);

struct ActionOutcome {
  bool ok = false;
  FailReason reason = FailReason::None;

  static ActionOutcome succeeded() { return {true, FailReason::None}; }
  static ActionOutcome failed(FailReason r) { return {false, r}; }
};

/// The single source of simulated truth: object containment, receptacle
/// open/closed state, and the robot. Actions are transactional; a Failed
/// outcome leaves the world untouched (the injected drop is the one
/// deliberate exception and marks the episode unrecoverable).
struct WorldState {
  SemanticMap map;
  std::vector<ObjectInstance> objects;
  RobotState robot;
  std::vector<bool> receptacle_open;  // parallel with map.receptacles
  long tick = 0;
  std::mt19937_64 rng;
  FailureInjection inject;
  std::optional<Cell> queued_move;
  bool dropped_object = false;

  ObjectInstance& object(int id);              // throws UnknownObject
  const ObjectInstance& object(int id) const;  // throws UnknownObject
  const ReceptacleRecord& receptacle(int id) const;  // throws UnknownReceptacle
  bool receptacle_is_open(int id) const;
  /// Untraversable right now: non-Free cell or a registered receptacle.
  bool cell_blocked(Cell c) const;
  bool within_reach(Cell c) const;
  void queue_move(Cell c);
  /// Keeps the open-state vector in step with a growing registry.
  void sync_open_state();
};

struct ScanParams {
  std::optional<double> range;
  std::optional<double> fov_degrees;
  /// Detect everything in the robot's current room regardless of range and
  /// field of view (the receptacle-navigation room sweep).
  bool whole_room = false;
};

struct Detection {
  enum class Kind { Object, Receptacle };
  Kind kind = Kind::Object;
  int id = -1;  // object id or receptacle id
  std::string cls;
  Cell position;
  int receptacle_id = -1;       // objects: the containing receptacle
  Containment mode = Containment::OnReceptacle;  // objects: on or inside
};

/// Ground-truth detector with optional per-detection dropout. Receptacle
/// detections are fused into the map registry. Objects in hand or inside a
/// closed receptacle are not visible.
std::vector<Detection> scan(WorldState& world, const ScanParams& params = {});

ActionOutcome pickup(WorldState& world, int object_id);

enum class PlaceMode { On, Inside };

ActionOutcome place(WorldState& world, int receptacle_id, PlaceMode mode);

ActionOutcome open_receptacle(WorldState& world, int receptacle_id);

/// Nearest non-openable receptacle in the robot's current room that the
/// planner can approach to within reach; ties break by distance then id.
int find_temp_location(const WorldState& world, int inflate_radius = 0);

/// Advances the clock one tick and applies any queued robot motion.
void step(WorldState& world);

enum class FollowStatus { Advancing, Arrived, Blocked };

/// Drives the robot along a planned path one cell per tick. Re-checks cell
/// blockage each advance so mid-run map updates surface as Blocked.
struct PathFollower {
  Path path;

  FollowStatus advance(WorldState& world);
};

/// Costmap for the current world: map inflation plus registered receptacles
/// as Lethal cells.
Costmap world_costmap(const WorldState& world, int inflate_radius);

}  // namespace tidy
