#include "tidy/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace tidy {
namespace {

std::string resolve_relative(const std::string& base_file, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

ScenarioConfig load_scenario(const std::string& path) {
  const std::string text = read_text_file(path);
  ScenarioConfig sc;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto bad = [&](const std::string& msg) -> ParseError { return ParseError(line_no, 1, msg); };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("//", 0) == 0) continue;
    std::istringstream toks(line);
    std::string kw;
    toks >> kw;
    try {
      if (kw == "map") {
        std::string p;
        toks >> p;
        sc.map_path = resolve_relative(path, p);
      } else if (kw == "corpus") {
        std::string p;
        toks >> p;
        sc.corpus_path = resolve_relative(path, p);
      } else if (kw == "model") {
        std::string p;
        toks >> p;
        sc.model_path = resolve_relative(path, p);
      } else if (kw == "user") {
        toks >> sc.user;
      } else if (kw == "k") {
        toks >> sc.k;
        if (sc.k < 1) throw bad("k must be >= 1");
      } else if (kw == "seed") {
        toks >> sc.seed;
      } else if (kw == "max_ticks") {
        toks >> sc.max_ticks;
        if (sc.max_ticks < 1) throw bad("max_ticks must be >= 1");
      } else if (kw == "room_choice") {
        toks >> sc.room_choice;
        if (sc.room_choice != "kb" && sc.room_choice != "user")
          throw bad("room_choice must be kb or user");
      } else if (kw == "robot") {
        std::string heading;
        if (!(toks >> sc.robot_start.x >> sc.robot_start.y >> heading))
          throw bad("usage: robot X Y HEADING");
        sc.robot_start.heading = parse_heading(heading);
      } else if (kw == "reach") {
        toks >> sc.reach;
        if (sc.reach < 1) throw bad("reach must be >= 1");
      } else if (kw == "sensor_range") {
        toks >> sc.sensor_range;
      } else if (kw == "sensor_fov") {
        toks >> sc.sensor_fov;
      } else if (kw == "inflate") {
        toks >> sc.inflate_radius;
        if (sc.inflate_radius < 0) throw bad("inflate must be >= 0");
      } else if (kw == "object") {
        // object CLASS at|in RECEPTACLE_REF
        ObjectSpec spec;
        std::string mode;
        if (!(toks >> spec.object_class >> mode >> spec.receptacle_ref))
          throw bad("usage: object CLASS at|in CLASS@ROOM");
        if (mode == "at" || mode == "on")
          spec.mode = PlaceMode::On;
        else if (mode == "in")
          spec.mode = PlaceMode::Inside;
        else
          throw bad("object placement must be 'at' or 'in'");
        sc.objects.push_back(std::move(spec));
      } else if (kw == "state") {
        std::string ref, value;
        if (!(toks >> ref >> value) || (value != "open" && value != "closed"))
          throw bad("usage: state CLASS@ROOM open|closed");
        sc.receptacle_states.emplace_back(ref, value == "open");
      } else if (kw == "p_fail_pick") {
        toks >> sc.inject.p_fail_pick;
      } else if (kw == "p_fail_place") {
        toks >> sc.inject.p_fail_place;
      } else if (kw == "p_fail_open") {
        toks >> sc.inject.p_fail_open;
      } else if (kw == "p_miss") {
        toks >> sc.inject.p_miss;
      } else if (kw == "p_drop") {
        toks >> sc.inject.p_drop;
      } else if (kw == "fail_place_first") {
        toks >> sc.inject.fail_place_first;
      } else if (kw == "train_d") {
        toks >> sc.train.d;
      } else if (kw == "train_lambda") {
        toks >> sc.train.lambda;
      } else if (kw == "train_lr") {
        toks >> sc.train.learning_rate;
      } else if (kw == "train_epochs") {
        toks >> sc.train.epochs;
      } else if (kw == "train_seed") {
        toks >> sc.train.seed;
      } else if (kw == "train_init") {
        toks >> sc.train.init_scale;
      } else {
        throw bad("unknown scenario directive '" + kw + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw bad(e.what());
    }
    if (toks.fail() && !toks.eof()) throw bad("malformed value for '" + kw + "'");
  }
  if (sc.map_path.empty()) fail(ErrorCode::ConfigError, "scenario has no map line: " + path);
  return sc;
}

int resolve_receptacle_ref(const SemanticMap& map, const std::string& ref) {
  const auto at = ref.find('@');
  if (at == std::string::npos)
    fail(ErrorCode::ConfigError, "receptacle reference '" + ref + "' must be CLASS@ROOM");
  const std::string cls = ref.substr(0, at);
  const std::string room = ref.substr(at + 1);
  for (const auto& rec : map.receptacles)
    if (rec.receptacle_class == cls && rec.room == room) return rec.id;
  fail(ErrorCode::UnknownReceptacle, "no receptacle matches '" + ref + "'");
}

WorldState build_world(const ScenarioConfig& scenario) {
  WorldState world;
  world.map = load_map(read_text_file(scenario.map_path));
  world.robot.pose = scenario.robot_start;
  world.robot.reach = scenario.reach;
  world.robot.sensor.range = scenario.sensor_range;
  world.robot.sensor.fov_degrees = scenario.sensor_fov;
  world.inject = scenario.inject;
  world.rng.seed(scenario.seed);
  world.sync_open_state();

  if (!world.map.in_bounds(scenario.robot_start.cell()) ||
      world.map.cell(scenario.robot_start.cell()) != CellState::Free)
    fail(ErrorCode::ConfigError, "robot start cell is not free");

  for (const auto& [ref, open] : scenario.receptacle_states) {
    const int id = resolve_receptacle_ref(world.map, ref);
    if (open && !world.map.receptacles[id].openable)
      fail(ErrorCode::ConfigError, "receptacle '" + ref + "' is not openable");
    world.receptacle_open[id] = open;
  }

  for (const auto& spec : scenario.objects) {
    const int rec_id = resolve_receptacle_ref(world.map, spec.receptacle_ref);
    const ReceptacleRecord& rec = world.map.receptacles[rec_id];
    if (spec.mode == PlaceMode::Inside && !rec.openable)
      fail(ErrorCode::ConfigError,
           "object '" + spec.object_class + "' placed inside non-openable '" +
               spec.receptacle_ref + "'");
    ObjectInstance obj;
    obj.id = static_cast<int>(world.objects.size());
    obj.object_class = spec.object_class;
    obj.location.kind =
        spec.mode == PlaceMode::On ? Containment::OnReceptacle : Containment::InsideReceptacle;
    obj.location.receptacle_id = rec_id;
    obj.location.position = rec.position;
    world.objects.push_back(std::move(obj));
  }
  return world;
}

}  // namespace tidy
