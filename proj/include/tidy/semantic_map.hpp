#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tidy/geometry.hpp"

namespace tidy {

enum class CellState : std::uint8_t { Free, Occupied, Unknown };

/// A registered placement surface or container. Receptacles sit on Occupied
/// cells (furniture is an obstacle); the robot approaches an adjacent Free
/// cell to interact.
struct ReceptacleRecord {
  int id = 0;
  std::string receptacle_class;
  std::string room;
  Cell position;
  bool openable = false;
  long last_observed_tick = 0;
};

/// A receptacle detection to be fused into the registry.
struct ReceptacleObservation {
  std::string receptacle_class;
  Cell position;
  long tick = 0;
};

/// 2D occupancy grid with per-cell room labels and a receptacle registry.
///
/// Room labels are painted as axis-aligned rectangles in the map file; the
/// registry starts from the file's static `receptacle` lines and grows as
/// the simulated detector reports new surfaces.
struct SemanticMap {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  std::vector<CellState> cells;       // row-major, width*height
  std::vector<std::int16_t> room_labels;  // index into rooms, -1 = unlabeled
  std::vector<std::string> rooms;
  std::vector<ReceptacleRecord> receptacles;
  std::set<std::string> openable_classes{"drawer"};

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  CellState cell(Cell c) const { return cells[static_cast<std::size_t>(c.y) * width + c.x]; }
  std::int16_t room_index_at(Cell c) const {
    return room_labels[static_cast<std::size_t>(c.y) * width + c.x];
  }
  /// Room name at a cell, empty string when unlabeled.
  std::string room_at(Cell c) const;
  bool has_room(const std::string& room) const;
  int room_index(const std::string& room) const;  // throws UnknownRoom

  bool operator==(const SemanticMap& other) const;
};

/// Merge radius for receptacle fusion, in cells (Chebyshev).
inline constexpr int kReceptacleMergeRadius = 1;

/// Parses the text map format. Fails atomically: any defect throws and no
/// partial map escapes.
SemanticMap load_map(const std::string& map_text);

/// Writes a map back out in the same format `load_map` reads. Room label
/// rectangles are emitted as row runs; `load_map(serialize_map(m)) == m`
/// for any loaded map.
std::string serialize_map(const SemanticMap& map);

/// Free labeled cell nearest (Euclidean) to the centroid of the room's
/// labeled cells. Ties break by scan order (y, then x).
GridPose room_center(const SemanticMap& map, const std::string& room);

/// Fuses a detection into the registry. A same-class record within the merge
/// radius is updated in place; otherwise a new record is appended. The
/// record's room is the label under its position.
void register_receptacle(SemanticMap& map, const ReceptacleObservation& obs);

/// Registry records whose room matches, in registration order.
std::vector<ReceptacleRecord> receptacles_in_room(const SemanticMap& map, const std::string& room);

/// Text rendering: '.' Free, '#' Occupied, '?' Unknown, receptacles as the
/// uppercase initial of their class, '*' for overlay path cells. One line
/// per grid row, each newline-terminated.
std::string render_map(const SemanticMap& map, const std::vector<Cell>& overlay_path = {});

}  // namespace tidy
