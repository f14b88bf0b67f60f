#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tidy/factor_model.hpp"
#include "tidy/world.hpp"

namespace tidy {

std::string read_text_file(const std::string& path);  // throws IoError
void write_text_file(const std::string& path, const std::string& content);

struct ObjectSpec {
  std::string object_class;
  std::string receptacle_ref;  // "class@room", first registry match
  PlaceMode mode = PlaceMode::On;
};

/// Parsed scenario file. Paths are resolved relative to the scenario's own
/// directory.
struct ScenarioConfig {
  std::string map_path;
  std::string corpus_path;
  std::string model_path;  // optional; trained from the corpus when empty
  std::string user;
  int k = 10;
  std::uint64_t seed = 0;
  long max_ticks = 2000;
  std::string room_choice = "kb";  // "kb" or "user"
  GridPose robot_start{0, 0, Heading::E};
  int reach = 1;
  double sensor_range = 8.0;
  double sensor_fov = 360.0;
  int inflate_radius = 0;
  std::vector<ObjectSpec> objects;
  std::vector<std::pair<std::string, bool>> receptacle_states;  // (ref, open)
  FailureInjection inject;
  TrainParams train;
};

ScenarioConfig load_scenario(const std::string& path);

/// "class@room" -> receptacle id (first match in registration order).
int resolve_receptacle_ref(const SemanticMap& map, const std::string& ref);

/// Loads the scenario's map and materializes the initial world state.
WorldState build_world(const ScenarioConfig& scenario);

}  // namespace tidy
