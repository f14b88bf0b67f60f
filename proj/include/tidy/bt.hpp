#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tidy/blackboard.hpp"

namespace tidy::bt {

enum class TickStatus { Success, Failure, Running };

const char* to_string(TickStatus s);

/// One placement target attempted by the tidy tree's retry stage.
struct Candidate {
  std::string room;
  std::string receptacle_class;

  bool operator==(const Candidate&) const = default;
};
using CandidateList = std::vector<Candidate>;

inline std::string bb_repr(const Candidate& c) { return c.room + "/" + c.receptacle_class; }
inline std::string bb_repr(const CandidateList& list) {
  std::string out = "[";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ",";
    out += bb_repr(list[i]);
  }
  return out + "]";
}

/// A leaf's bound behavior. Stateful behaviors carry their progress between
/// ticks and clear it in reset(), which the owning leaf calls whenever the
/// leaf finishes with a terminal status or the subtree is reset.
class Behavior {
 public:
  virtual ~Behavior() = default;
  virtual TickStatus tick(Blackboard& bb) = 0;
  virtual void reset() {}
};

using BehaviorPtr = std::shared_ptr<Behavior>;

/// Wraps a plain callable as a Behavior.
BehaviorPtr make_behavior(std::function<TickStatus(Blackboard&)> fn);

struct TraceEvent {
  enum class Kind { Action, Condition };
  Kind kind;
  std::string name;
  TickStatus status;
  std::string note;  // diagnostic, e.g. a missing blackboard key
};
using TraceFn = std::function<void(const TraceEvent&)>;

class BTNode {
 public:
  virtual ~BTNode() = default;
  virtual TickStatus tick(Blackboard& bb, const TraceFn& trace) = 0;
  virtual void reset() = 0;

  TickStatus tick(Blackboard& bb) { return tick(bb, TraceFn{}); }
};

using NodePtr = std::unique_ptr<BTNode>;

// Node constructors. Construction performs no leaf invocations; malformed
// shapes (empty control nodes, retry budget < 1) throw MalformedTree.
NodePtr sequence(std::vector<NodePtr> children);
NodePtr fallback(std::vector<NodePtr> children);
NodePtr retry(int max_attempts, NodePtr child);
NodePtr inverter(NodePtr child);
NodePtr action(std::string name, BehaviorPtr behavior);
NodePtr condition(std::string name, BehaviorPtr behavior);
/// Condition that succeeds iff the blackboard holds `key` as a true bool.
NodePtr flag_condition(std::string name, std::string key);
/// Retry decorator that re-attempts its child once per remaining entry of the
/// candidate list on the blackboard, advancing the cursor before each
/// re-attempt. The retry budget is the candidate count.
NodePtr retry_over_candidates(std::string list_key, std::string cursor_key, NodePtr child);

using BindingMap = std::map<std::string, BehaviorPtr>;

/// The tidy tree: identify a misplaced object, compute placement candidates,
/// pick the object up, then navigate-and-place with retry over the remaining
/// candidate receptacles.
NodePtr build_tidy_tree(const BindingMap& bindings);

/// The drawer placement tree: approach, and unless the drawer is already
/// open (blackboard flag "drawer_open"), set the held object down on a
/// temporary surface, open the drawer, and re-pick before placing inside.
NodePtr build_drawer_place_tree(const BindingMap& bindings);

/// Loads a tree description: one node per line, two spaces of indentation
/// per depth. Node forms: Sequence | Fallback | Inverter | Retry N |
/// RetryOverCandidates LIST_KEY CURSOR_KEY | Action NAME | Condition NAME |
/// Flag NAME KEY. Action/Condition names resolve against the binding map.
NodePtr parse_tree(const std::string& text, const BindingMap& bindings);

// Blackboard keys used by the built-in trees.
inline constexpr const char* kCandidatesKey = "candidates";
inline constexpr const char* kCandidateCursorKey = "candidate_idx";
inline constexpr const char* kDrawerOpenKey = "drawer_open";

}  // namespace tidy::bt
