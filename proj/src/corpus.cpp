#include "tidy/corpus.hpp"

#include <algorithm>
#include <sstream>

namespace tidy {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.pop_back();
  }
  return out;
}

double parse_number(const std::string& tok, int line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, 1, "bad " + what + " '" + tok + "'");
  }
}

}  // namespace

int RatingsCorpus::user_id(const std::string& name) const {
  const auto it = user_index.find(name);
  if (it == user_index.end()) fail(ErrorCode::UnknownUser, "user '" + name + "'");
  return it->second;
}

int RatingsCorpus::item_id(const PlacementItem& item) const {
  const auto it = item_index.find(item.key());
  if (it == item_index.end()) fail(ErrorCode::UnknownItem, "item '" + item.key() + "'");
  return it->second;
}

bool RatingsCorpus::has_item(const PlacementItem& item) const {
  return item_index.count(item.key()) > 0;
}

int RatingsCorpus::add_user(const std::string& name) {
  const auto it = user_index.find(name);
  if (it != user_index.end()) return it->second;
  users.push_back(name);
  user_index.emplace(name, static_cast<int>(users.size() - 1));
  return static_cast<int>(users.size() - 1);
}

int RatingsCorpus::add_item(const PlacementItem& item) {
  const auto it = item_index.find(item.key());
  if (it != item_index.end()) return it->second;
  items.push_back(item);
  item_index.emplace(item.key(), static_cast<int>(items.size() - 1));
  object_classes.insert(item.object_class);
  room_names.insert(item.room);
  receptacle_classes.insert(item.receptacle_class);
  return static_cast<int>(items.size() - 1);
}

RatingsCorpus ingest_corpus(const std::string& corpus_text) {
  RatingsCorpus corpus;
  std::istringstream in(corpus_text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::map<std::string, int> columns;
  std::set<std::pair<int, int>> seen;  // (user, item) duplicate guard

  auto column = [&](const char* name) -> int {
    const auto it = columns.find(name);
    return it == columns.end() ? -1 : it->second;
  };
  auto field = [&](const std::vector<std::string>& row, int idx) -> std::string {
    return idx >= 0 && idx < static_cast<int>(row.size()) ? row[idx] : std::string{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream pragma(line.substr(1));
      std::string kw;
      pragma >> kw;
      if (kw == "scale") {
        if (header_seen) throw ParseError(line_no, 1, "scale pragma after header");
        if (!(pragma >> corpus.scale_min >> corpus.scale_max) ||
            corpus.scale_min >= corpus.scale_max)
          throw ParseError(line_no, 1, "usage: # scale MIN MAX");
      }
      continue;
    }
    const auto row = split_csv(line);
    if (!header_seen) {
      for (std::size_t i = 0; i < row.size(); ++i) columns[row[i]] = static_cast<int>(i);
      for (const char* required : {"user", "object", "room", "receptacle", "kind", "value"})
        if (column(required) < 0)
          throw ParseError(line_no, 1, std::string("missing column '") + required + "'");
      header_seen = true;
      continue;
    }
    const std::string user = field(row, column("user"));
    const PlacementItem item{field(row, column("object")), field(row, column("room")),
                             field(row, column("receptacle"))};
    const std::string kind = field(row, column("kind"));
    if (user.empty() || item.object_class.empty() || item.room.empty() ||
        item.receptacle_class.empty())
      throw ParseError(line_no, 1, "empty identifier field");

    double rating = 0.0;
    if (kind == "rating") {
      rating = parse_number(field(row, column("value")), line_no, "rating");
    } else if (kind == "rank") {
      const double rank = parse_number(field(row, column("value")), line_no, "rank");
      const std::string total_tok = field(row, column("rank_total"));
      if (total_tok.empty()) throw ParseError(line_no, 1, "rank row without rank_total");
      const double total = parse_number(total_tok, line_no, "rank_total");
      if (rank < 1 || total < 1 || rank > total)
        throw ParseError(line_no, 1, "rank outside [1, rank_total]");
      rating = total <= 1.0 ? corpus.scale_max
                            : corpus.scale_max -
                                  (rank - 1.0) * (corpus.scale_max - corpus.scale_min) /
                                      (total - 1.0);
    } else {
      throw ParseError(line_no, 1, "kind must be 'rating' or 'rank', got '" + kind + "'");
    }
    if (rating < corpus.scale_min - 1e-12 || rating > corpus.scale_max + 1e-12)
      fail(ErrorCode::RatingOutOfScale,
           "rating " + std::to_string(rating) + " outside [" + std::to_string(corpus.scale_min) +
               ", " + std::to_string(corpus.scale_max) + "] at line " + std::to_string(line_no));

    double weight = 1.0;
    const std::string weight_tok = field(row, column("weight"));
    if (!weight_tok.empty()) {
      weight = parse_number(weight_tok, line_no, "weight");
      if (weight < 0) throw ParseError(line_no, 1, "weight must be nonnegative");
    }

    RatingEntry entry;
    entry.user = corpus.add_user(user);
    entry.item = corpus.add_item(item);
    entry.rating = rating;
    entry.weight = weight;
    if (!seen.insert({entry.user, entry.item}).second)
      fail(ErrorCode::DuplicateRating,
           "duplicate rating for (" + user + ", " + item.key() + ") at line " +
               std::to_string(line_no));
    corpus.entries.push_back(entry);
  }
  if (!header_seen) throw ParseError(line_no, 1, "corpus has no header row");
  return corpus;
}

CommonSenseKB build_kb(const RatingsCorpus& corpus) {
  CommonSenseKB kb;
  for (const auto& entry : corpus.entries) {
    const PlacementItem& item = corpus.items[entry.item];
    kb.room_scores[item.object_class][item.room] += entry.rating;
  }
  return kb;
}

std::vector<std::string> target_room(const CommonSenseKB& kb, const std::string& object_class) {
  const auto it = kb.room_scores.find(object_class);
  if (it == kb.room_scores.end())
    fail(ErrorCode::UnknownObject, "object '" + object_class + "' is not in the knowledge base");
  std::vector<std::pair<std::string, double>> rooms(it->second.begin(), it->second.end());
  std::stable_sort(rooms.begin(), rooms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  out.reserve(rooms.size());
  for (const auto& [room, score] : rooms) out.push_back(room);
  return out;
}

}  // namespace tidy
