#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "tidy/error.hpp"

namespace tidy {

/// An item in the preference model: one object class placed in one room on
/// (or in) one receptacle class.
struct PlacementItem {
  std::string object_class;
  std::string room;
  std::string receptacle_class;

  bool operator==(const PlacementItem&) const = default;
  std::string key() const { return object_class + "|" + room + "|" + receptacle_class; }
};

struct RatingEntry {
  int user = 0;   // index into users
  int item = 0;   // index into items
  double rating = 0.0;
  double weight = 1.0;
};

/// Sparse set of user ratings over placement items, plus the vocabularies
/// they induce.
struct RatingsCorpus {
  std::vector<std::string> users;
  std::vector<PlacementItem> items;
  std::vector<RatingEntry> entries;
  double scale_min = 0.0;
  double scale_max = 1.0;

  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> item_index;  // keyed by PlacementItem::key()
  std::set<std::string> object_classes;
  std::set<std::string> room_names;
  std::set<std::string> receptacle_classes;

  int user_id(const std::string& name) const;                      // throws UnknownUser
  int item_id(const PlacementItem& item) const;                    // throws UnknownItem
  bool has_item(const PlacementItem& item) const;
  int add_user(const std::string& name);
  int add_item(const PlacementItem& item);
};

/// Parses the corpus CSV. Header row required; recognized columns are
/// user, object, room, receptacle, kind, value, rank_total, weight.
/// kind is "rating" (value is the score) or "rank" (value is the 1-based
/// rank among rank_total options, mapped linearly onto the scale).
/// Lines starting with '#' before the header may declare `# scale MIN MAX`.
RatingsCorpus ingest_corpus(const std::string& corpus_text);

/// Per-object aggregate room scores derived from the corpus across all
/// users; drives the common-sense choice of target room.
struct CommonSenseKB {
  std::map<std::string, std::map<std::string, double>> room_scores;
};

CommonSenseKB build_kb(const RatingsCorpus& corpus);

/// Rooms for an object, best first; ties break alphabetically.
std::vector<std::string> target_room(const CommonSenseKB& kb, const std::string& object_class);

}  // namespace tidy
