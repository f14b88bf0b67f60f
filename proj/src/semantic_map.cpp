#include "tidy/semantic_map.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace tidy {
namespace {

bool is_grid_row(const std::string& line) {
  if (line.empty()) return false;
  const char c = line[0];
  return c == '.' || c == '#' || c == '?';
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, int line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, 1, "expected integer for " + what + ", got '" + tok + "'");
  }
}

double parse_double(const std::string& tok, int line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, 1, "expected number for " + what + ", got '" + tok + "'");
  }
}

}  // namespace

std::string SemanticMap::room_at(Cell c) const {
  const std::int16_t idx = room_index_at(c);
  return idx < 0 ? std::string{} : rooms[idx];
}

bool SemanticMap::has_room(const std::string& room) const {
  return std::find(rooms.begin(), rooms.end(), room) != rooms.end();
}

int SemanticMap::room_index(const std::string& room) const {
  const auto it = std::find(rooms.begin(), rooms.end(), room);
  if (it == rooms.end()) fail(ErrorCode::UnknownRoom, "room '" + room + "' is not in the map");
  return static_cast<int>(it - rooms.begin());
}

bool SemanticMap::operator==(const SemanticMap& other) const {
  if (width != other.width || height != other.height || resolution != other.resolution)
    return false;
  if (cells != other.cells) return false;
  // Compare labels by name so room table ordering does not matter.
  for (std::size_t i = 0; i < room_labels.size(); ++i) {
    const std::string a = room_labels[i] < 0 ? "" : rooms[room_labels[i]];
    const std::string b = other.room_labels[i] < 0 ? "" : other.rooms[other.room_labels[i]];
    if (a != b) return false;
  }
  if (receptacles.size() != other.receptacles.size()) return false;
  for (std::size_t i = 0; i < receptacles.size(); ++i) {
    const auto& a = receptacles[i];
    const auto& b = other.receptacles[i];
    if (a.receptacle_class != b.receptacle_class || a.room != b.room ||
        !(a.position == b.position) || a.openable != b.openable ||
        a.last_observed_tick != b.last_observed_tick)
      return false;
  }
  return openable_classes == other.openable_classes;
}

SemanticMap load_map(const std::string& map_text) {
  SemanticMap map;
  map.width = -1;
  map.height = -1;
  std::vector<std::string> grid_rows;
  struct PendingReceptacle {
    std::string cls;
    Cell pos;
    bool openable;
    int line_no;
  };
  std::vector<PendingReceptacle> pending;
  bool openable_classes_declared = false;

  std::istringstream in(map_text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("//", 0) == 0) continue;

    if (is_grid_row(line)) {
      if (map.width < 0 || map.height < 0)
        throw ParseError(line_no, 1, "grid row before width/height headers");
      for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c != '.' && c != '#' && c != '?')
          throw ParseError(line_no, static_cast<int>(i + 1),
                           std::string("invalid grid glyph '") + c + "'");
      }
      if (static_cast<int>(line.size()) != map.width)
        fail(ErrorCode::InconsistentDimensions,
             "grid row " + std::to_string(grid_rows.size()) + " has " +
                 std::to_string(line.size()) + " glyphs, expected " + std::to_string(map.width));
      if (static_cast<int>(grid_rows.size()) >= map.height)
        fail(ErrorCode::InconsistentDimensions,
             "more grid rows than declared height " + std::to_string(map.height));
      grid_rows.push_back(line);
      continue;
    }

    const auto toks = split_tokens(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];
    if (kw == "width") {
      if (toks.size() != 2) throw ParseError(line_no, 1, "usage: width W");
      map.width = parse_int(toks[1], line_no, "width");
      if (map.width <= 0) throw ParseError(line_no, 1, "width must be positive");
    } else if (kw == "height") {
      if (toks.size() != 2) throw ParseError(line_no, 1, "usage: height H");
      map.height = parse_int(toks[1], line_no, "height");
      if (map.height <= 0) throw ParseError(line_no, 1, "height must be positive");
    } else if (kw == "resolution") {
      if (toks.size() != 2) throw ParseError(line_no, 1, "usage: resolution R");
      map.resolution = parse_double(toks[1], line_no, "resolution");
      if (map.resolution <= 0) throw ParseError(line_no, 1, "resolution must be positive");
    } else if (kw == "openable_class") {
      if (toks.size() != 2) throw ParseError(line_no, 1, "usage: openable_class NAME");
      if (!openable_classes_declared) {
        map.openable_classes.clear();
        openable_classes_declared = true;
      }
      map.openable_classes.insert(toks[1]);
    } else if (kw == "room") {
      if (toks.size() != 6) throw ParseError(line_no, 1, "usage: room NAME X0 Y0 X1 Y1");
      if (map.width < 0 || map.height < 0 || grid_rows.empty())
        throw ParseError(line_no, 1, "room line before grid block");
      const std::string& name = toks[1];
      const int x0 = parse_int(toks[2], line_no, "x0");
      const int y0 = parse_int(toks[3], line_no, "y0");
      const int x1 = parse_int(toks[4], line_no, "x1");
      const int y1 = parse_int(toks[5], line_no, "y1");
      if (x0 > x1 || y0 > y1) throw ParseError(line_no, 1, "room rectangle is inverted");
      if (x0 < 0 || y0 < 0 || x1 >= map.width || y1 >= map.height)
        throw ParseError(line_no, 1, "room rectangle out of grid bounds");
      auto it = std::find(map.rooms.begin(), map.rooms.end(), name);
      std::int16_t idx;
      if (it == map.rooms.end()) {
        map.rooms.push_back(name);
        idx = static_cast<std::int16_t>(map.rooms.size() - 1);
      } else {
        idx = static_cast<std::int16_t>(it - map.rooms.begin());
      }
      if (map.room_labels.empty())
        map.room_labels.assign(static_cast<std::size_t>(map.width) * map.height, -1);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          map.room_labels[static_cast<std::size_t>(y) * map.width + x] = idx;
    } else if (kw == "receptacle") {
      if (toks.size() != 4 && toks.size() != 5)
        throw ParseError(line_no, 1, "usage: receptacle CLASS X Y [openable]");
      const bool openable = toks.size() == 5;
      if (openable && toks[4] != "openable")
        throw ParseError(line_no, 1, "trailing token must be 'openable'");
      pending.push_back({toks[1],
                         {parse_int(toks[2], line_no, "x"), parse_int(toks[3], line_no, "y")},
                         openable,
                         line_no});
    } else {
      throw ParseError(line_no, 1, "unknown directive '" + kw + "'");
    }
  }

  if (map.width < 0 || map.height < 0)
    throw ParseError(line_no, 1, "missing width/height headers");
  if (static_cast<int>(grid_rows.size()) != map.height)
    fail(ErrorCode::InconsistentDimensions,
         "grid has " + std::to_string(grid_rows.size()) + " rows, expected " +
             std::to_string(map.height));

  map.cells.resize(static_cast<std::size_t>(map.width) * map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const char c = grid_rows[y][x];
      map.cells[static_cast<std::size_t>(y) * map.width + x] =
          c == '.' ? CellState::Free : (c == '#' ? CellState::Occupied : CellState::Unknown);
    }
  }
  if (map.room_labels.empty())
    map.room_labels.assign(static_cast<std::size_t>(map.width) * map.height, -1);

  for (const auto& p : pending) {
    if (!map.in_bounds(p.pos))
      throw ParseError(p.line_no, 1, "receptacle position out of grid bounds");
    if (p.openable && !map.openable_classes.count(p.cls))
      throw ParseError(p.line_no, 1,
                       "class '" + p.cls + "' is not declared openable");
    const std::string room = map.room_at(p.pos);
    if (room.empty())
      fail(ErrorCode::UnknownRoomLabel,
           "receptacle '" + p.cls + "' at (" + std::to_string(p.pos.x) + "," +
               std::to_string(p.pos.y) + ") has no room label");
    // Must be approachable: the cell itself or an 8-neighbor is non-Occupied.
    bool approachable = map.cell(p.pos) != CellState::Occupied;
    for (int dy = -1; dy <= 1 && !approachable; ++dy)
      for (int dx = -1; dx <= 1 && !approachable; ++dx) {
        const Cell n{p.pos.x + dx, p.pos.y + dy};
        if ((dx != 0 || dy != 0) && map.in_bounds(n) && map.cell(n) != CellState::Occupied)
          approachable = true;
      }
    if (!approachable)
      throw ParseError(p.line_no, 1, "receptacle has no non-Occupied neighbor");
    ReceptacleRecord rec;
    rec.id = static_cast<int>(map.receptacles.size());
    rec.receptacle_class = p.cls;
    rec.room = room;
    rec.position = p.pos;
    rec.openable = p.openable || map.openable_classes.count(p.cls) > 0;
    rec.last_observed_tick = 0;
    map.receptacles.push_back(std::move(rec));
  }
  return map;
}

std::string serialize_map(const SemanticMap& map) {
  std::ostringstream out;
  out << "width " << map.width << "\n";
  out << "height " << map.height << "\n";
  out << "resolution " << map.resolution << "\n";
  for (const auto& cls : map.openable_classes) out << "openable_class " << cls << "\n";
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      switch (map.cell({x, y})) {
        case CellState::Free: out << '.'; break;
        case CellState::Occupied: out << '#'; break;
        case CellState::Unknown: out << '?'; break;
      }
    }
    out << "\n";
  }
  // Labels as height-1 row runs; later lines overwrite earlier, which is
  // harmless here because runs never overlap.
  for (int y = 0; y < map.height; ++y) {
    int x = 0;
    while (x < map.width) {
      const std::int16_t idx = map.room_index_at({x, y});
      if (idx < 0) {
        ++x;
        continue;
      }
      int x_end = x;
      while (x_end + 1 < map.width && map.room_index_at({x_end + 1, y}) == idx) ++x_end;
      out << "room " << map.rooms[idx] << " " << x << " " << y << " " << x_end << " " << y
          << "\n";
      x = x_end + 1;
    }
  }
  for (const auto& rec : map.receptacles) {
    out << "receptacle " << rec.receptacle_class << " " << rec.position.x << " "
        << rec.position.y;
    if (rec.openable) out << " openable";
    out << "\n";
  }
  return out.str();
}

GridPose room_center(const SemanticMap& map, const std::string& room) {
  const int idx = map.room_index(room);
  double sum_x = 0, sum_y = 0;
  long count = 0;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.room_index_at({x, y}) == idx) {
        sum_x += x;
        sum_y += y;
        ++count;
      }
  if (count == 0) fail(ErrorCode::UnknownRoom, "room '" + room + "' has no labeled cells");
  const double cx = sum_x / count;
  const double cy = sum_y / count;

  double best = std::numeric_limits<double>::infinity();
  Cell best_cell{-1, -1};
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      if (map.room_index_at({x, y}) != idx) continue;
      if (map.cell({x, y}) != CellState::Free) continue;
      const double dx = x - cx;
      const double dy = y - cy;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best - 1e-12) {
        best = d2;
        best_cell = {x, y};
      }
    }
  if (best_cell.x < 0)
    fail(ErrorCode::RoomHasNoFreeCell, "room '" + room + "' has no free labeled cell");
  return GridPose{best_cell.x, best_cell.y, Heading::E};
}

void register_receptacle(SemanticMap& map, const ReceptacleObservation& obs) {
  if (!map.in_bounds(obs.position))
    fail(ErrorCode::OutOfBounds,
         "receptacle detection at (" + std::to_string(obs.position.x) + "," +
             std::to_string(obs.position.y) + ") outside the grid");
  ReceptacleRecord* target = nullptr;
  int best_dist = std::numeric_limits<int>::max();
  for (auto& rec : map.receptacles) {
    if (rec.receptacle_class != obs.receptacle_class) continue;
    const int d = chebyshev(rec.position, obs.position);
    if (d <= kReceptacleMergeRadius && d < best_dist) {
      best_dist = d;
      target = &rec;
    }
  }
  if (target != nullptr) {
    // Moving the record must not bring it within the merge radius of another
    // same-class record; if it would, keep the old position and fuse only
    // the observation time.
    bool can_move = true;
    for (const auto& rec : map.receptacles) {
      if (&rec == target || rec.receptacle_class != obs.receptacle_class) continue;
      if (chebyshev(rec.position, obs.position) <= kReceptacleMergeRadius) {
        can_move = false;
        break;
      }
    }
    if (can_move) {
      target->position = obs.position;
      target->room = map.room_at(obs.position);
    }
    target->last_observed_tick = obs.tick;
    return;
  }
  ReceptacleRecord rec;
  rec.id = static_cast<int>(map.receptacles.size());
  rec.receptacle_class = obs.receptacle_class;
  rec.room = map.room_at(obs.position);
  rec.position = obs.position;
  rec.openable = map.openable_classes.count(obs.receptacle_class) > 0;
  rec.last_observed_tick = obs.tick;
  map.receptacles.push_back(std::move(rec));
}

std::vector<ReceptacleRecord> receptacles_in_room(const SemanticMap& map,
                                                  const std::string& room) {
  map.room_index(room);  // throws UnknownRoom
  std::vector<ReceptacleRecord> out;
  for (const auto& rec : map.receptacles)
    if (rec.room == room) out.push_back(rec);
  return out;
}

std::string render_map(const SemanticMap& map, const std::vector<Cell>& overlay_path) {
  std::vector<std::string> rows(map.height, std::string(map.width, '.'));
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      switch (map.cell({x, y})) {
        case CellState::Free: rows[y][x] = '.'; break;
        case CellState::Occupied: rows[y][x] = '#'; break;
        case CellState::Unknown: rows[y][x] = '?'; break;
      }
    }
  for (const auto& rec : map.receptacles) {
    if (!map.in_bounds(rec.position) || rec.receptacle_class.empty()) continue;
    rows[rec.position.y][rec.position.x] =
        static_cast<char>(std::toupper(static_cast<unsigned char>(rec.receptacle_class[0])));
  }
  for (const Cell& c : overlay_path) {
    if (map.in_bounds(c)) rows[c.y][c.x] = '*';
  }
  std::string out;
  for (const auto& row : rows) {
    out += row;
    out += '\n';
  }
  return out;
}

}  // namespace tidy
