#include "tidy/bt.hpp"

#include <sstream>

namespace tidy::bt {

const char* to_string(TickStatus s) {
  switch (s) {
    case TickStatus::Success: return "Success";
    case TickStatus::Failure: return "Failure";
    case TickStatus::Running: return "Running";
  }
  return "?";
}

namespace {

class FnBehavior final : public Behavior {
 public:
  explicit FnBehavior(std::function<TickStatus(Blackboard&)> fn) : fn_(std::move(fn)) {}
  TickStatus tick(Blackboard& bb) override { return fn_(bb); }

 private:
  std::function<TickStatus(Blackboard&)> fn_;
};

class SequenceNode final : public BTNode {
 public:
  explicit SequenceNode(std::vector<NodePtr> children) : children_(std::move(children)) {
    if (children_.empty()) fail(ErrorCode::MalformedTree, "Sequence needs at least one child");
  }
  TickStatus tick(Blackboard& bb, const TraceFn& trace) override {
    for (std::size_t i = resume_; i < children_.size(); ++i) {
      const TickStatus st = children_[i]->tick(bb, trace);
      if (st == TickStatus::Running) {
        resume_ = i;
        return st;
      }
      if (st == TickStatus::Failure) {
        resume_ = 0;
        return st;
      }
    }
    resume_ = 0;
    return TickStatus::Success;
  }
  void reset() override {
    resume_ = 0;
    for (auto& c : children_) c->reset();
  }

 private:
  std::vector<NodePtr> children_;
  std::size_t resume_ = 0;
};

class FallbackNode final : public BTNode {
 public:
  explicit FallbackNode(std::vector<NodePtr> children) : children_(std::move(children)) {
    if (children_.empty()) fail(ErrorCode::MalformedTree, "Fallback needs at least one child");
  }
  TickStatus tick(Blackboard& bb, const TraceFn& trace) override {
    for (std::size_t i = resume_; i < children_.size(); ++i) {
      const TickStatus st = children_[i]->tick(bb, trace);
      if (st == TickStatus::Running) {
        resume_ = i;
        return st;
      }
      if (st == TickStatus::Success) {
        resume_ = 0;
        return st;
      }
    }
    resume_ = 0;
    return TickStatus::Failure;
  }
  void reset() override {
    resume_ = 0;
    for (auto& c : children_) c->reset();
  }

 private:
  std::vector<NodePtr> children_;
  std::size_t resume_ = 0;
};

class RetryNode final : public BTNode {
 public:
  RetryNode(int max_attempts, NodePtr child) : max_(max_attempts), child_(std::move(child)) {
    if (max_ < 1) fail(ErrorCode::MalformedTree, "Retry budget must be >= 1");
    if (!child_) fail(ErrorCode::MalformedTree, "Retry needs a child");
  }
  TickStatus tick(Blackboard& bb, const TraceFn& trace) override {
    while (true) {
      const TickStatus st = child_->tick(bb, trace);
      if (st == TickStatus::Running) return st;
      if (st == TickStatus::Success) {
        attempts_ = 0;
        return st;
      }
      ++attempts_;
      if (attempts_ >= max_) {
        attempts_ = 0;
        return TickStatus::Failure;
      }
      child_->reset();
    }
  }
  void reset() override {
    attempts_ = 0;
    child_->reset();
  }

 private:
  int max_;
  NodePtr child_;
  int attempts_ = 0;
};

class InverterNode final : public BTNode {
 public:
  explicit InverterNode(NodePtr child) : child_(std::move(child)) {
    if (!child_) fail(ErrorCode::MalformedTree, "Inverter needs a child");
  }
  TickStatus tick(Blackboard& bb, const TraceFn& trace) override {
    const TickStatus st = child_->tick(bb, trace);
    if (st == TickStatus::Success) return TickStatus::Failure;
    if (st == TickStatus::Failure) return TickStatus::Success;
    return st;
  }
  void reset() override { child_->reset(); }

 private:
  NodePtr child_;
};

class LeafNode final : public BTNode {
 public:
  LeafNode(TraceEvent::Kind kind, std::string name, BehaviorPtr behavior)
      : kind_(kind), name_(std::move(name)), behavior_(std::move(behavior)) {
    if (!behavior_) fail(ErrorCode::UnboundLeaf, "leaf '" + name_ + "' has no behavior");
  }
  TickStatus tick(Blackboard& bb, const TraceFn& trace) override {
    TickStatus st;
    std::string note;
    try {
      st = behavior_->tick(bb);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BlackboardKeyMissing &&
          e.code() != ErrorCode::BlackboardTypeMismatch)
        throw;
      st = TickStatus::Failure;
      note = e.what();
    }
    if (st != TickStatus::Running) behavior_->reset();
    if (trace) trace({kind_, name_, st, note});
    return st;
  }
  void reset() override { behavior_->reset(); }

 private:
  TraceEvent::Kind kind_;
  std::string name_;
  BehaviorPtr behavior_;
};

class RetryOverCandidatesNode final : public BTNode {
 public:
  RetryOverCandidatesNode(std::string list_key, std::string cursor_key, NodePtr child)
      : list_key_(std::move(list_key)), cursor_key_(std::move(cursor_key)),
        child_(std::move(child)) {
    if (!child_) fail(ErrorCode::MalformedTree, "RetryOverCandidates needs a child");
  }
  TickStatus tick(Blackboard& bb, const TraceFn& trace) override {
    while (true) {
      const TickStatus st = child_->tick(bb, trace);
      if (st != TickStatus::Failure) return st;
      int next = 0;
      std::size_t count = 0;
      try {
        count = bb.get<CandidateList>(list_key_).size();
        next = bb.get<int>(cursor_key_) + 1;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BlackboardKeyMissing &&
            e.code() != ErrorCode::BlackboardTypeMismatch)
          throw;
        return TickStatus::Failure;
      }
      if (next >= static_cast<int>(count)) return TickStatus::Failure;
      bb.set(cursor_key_, next);
      child_->reset();
    }
  }
  void reset() override { child_->reset(); }

 private:
  std::string list_key_;
  std::string cursor_key_;
  NodePtr child_;
};

BehaviorPtr require_binding(const BindingMap& bindings, const std::string& name) {
  const auto it = bindings.find(name);
  if (it == bindings.end() || !it->second)
    fail(ErrorCode::MissingBinding, "no behavior bound for leaf '" + name + "'");
  return it->second;
}

}  // namespace

BehaviorPtr make_behavior(std::function<TickStatus(Blackboard&)> fn) {
  return std::make_shared<FnBehavior>(std::move(fn));
}

NodePtr sequence(std::vector<NodePtr> children) {
  return std::make_unique<SequenceNode>(std::move(children));
}
NodePtr fallback(std::vector<NodePtr> children) {
  return std::make_unique<FallbackNode>(std::move(children));
}
NodePtr retry(int max_attempts, NodePtr child) {
  return std::make_unique<RetryNode>(max_attempts, std::move(child));
}
NodePtr inverter(NodePtr child) { return std::make_unique<InverterNode>(std::move(child)); }
NodePtr action(std::string name, BehaviorPtr behavior) {
  return std::make_unique<LeafNode>(TraceEvent::Kind::Action, std::move(name),
                                    std::move(behavior));
}
NodePtr condition(std::string name, BehaviorPtr behavior) {
  return std::make_unique<LeafNode>(TraceEvent::Kind::Condition, std::move(name),
                                    std::move(behavior));
}
NodePtr flag_condition(std::string name, std::string key) {
  auto probe = make_behavior([key = std::move(key)](Blackboard& bb) {
    return bb.get<bool>(key) ? TickStatus::Success : TickStatus::Failure;
  });
  return condition(std::move(name), std::move(probe));
}
NodePtr retry_over_candidates(std::string list_key, std::string cursor_key, NodePtr child) {
  return std::make_unique<RetryOverCandidatesNode>(std::move(list_key), std::move(cursor_key),
                                                   std::move(child));
}

NodePtr build_tidy_tree(const BindingMap& bindings) {
  std::vector<NodePtr> attempt;
  attempt.push_back(action("RoomNavigator", require_binding(bindings, "RoomNavigator")));
  attempt.push_back(
      action("ReceptacleNavigator", require_binding(bindings, "ReceptacleNavigator")));
  attempt.push_back(action("PlaceBehavior", require_binding(bindings, "PlaceBehavior")));

  std::vector<NodePtr> root;
  root.push_back(action("IdentifyMisplaced", require_binding(bindings, "IdentifyMisplaced")));
  root.push_back(
      action("PlacementCandidates", require_binding(bindings, "PlacementCandidates")));
  root.push_back(action("PickupBehavior", require_binding(bindings, "PickupBehavior")));
  root.push_back(
      retry_over_candidates(kCandidatesKey, kCandidateCursorKey, sequence(std::move(attempt))));
  return sequence(std::move(root));
}

NodePtr build_drawer_place_tree(const BindingMap& bindings) {
  std::vector<NodePtr> closed_branch;
  closed_branch.push_back(
      action("FindTempLocation", require_binding(bindings, "FindTempLocation")));
  closed_branch.push_back(
      action("SetDownTemporary", require_binding(bindings, "SetDownTemporary")));
  closed_branch.push_back(action("OpenDrawer", require_binding(bindings, "OpenDrawer")));
  closed_branch.push_back(action("RePickObject", require_binding(bindings, "RePickObject")));

  std::vector<NodePtr> open_or_prepare;
  open_or_prepare.push_back(flag_condition("DrawerAlreadyOpen", kDrawerOpenKey));
  open_or_prepare.push_back(sequence(std::move(closed_branch)));

  std::vector<NodePtr> root;
  root.push_back(action("ApproachDrawer", require_binding(bindings, "ApproachDrawer")));
  root.push_back(fallback(std::move(open_or_prepare)));
  root.push_back(action("PlaceInside", require_binding(bindings, "PlaceInside")));
  return sequence(std::move(root));
}

namespace {

struct TreeLine {
  int depth;
  std::vector<std::string> toks;
  int line_no;
};

NodePtr build_from_lines(const std::vector<TreeLine>& lines, std::size_t& pos,
                         const BindingMap& bindings) {
  const TreeLine& line = lines[pos];
  ++pos;
  std::vector<NodePtr> children;
  while (pos < lines.size() && lines[pos].depth > line.depth) {
    if (lines[pos].depth != line.depth + 1)
      fail(ErrorCode::MalformedTree,
           "line " + std::to_string(lines[pos].line_no) + ": indentation jumps levels");
    children.push_back(build_from_lines(lines, pos, bindings));
  }

  const std::string& kind = line.toks[0];
  auto expect_args = [&](std::size_t n) {
    if (line.toks.size() != n + 1)
      fail(ErrorCode::MalformedTree,
           "line " + std::to_string(line.line_no) + ": bad arguments for " + kind);
  };
  auto expect_leaf = [&]() {
    if (!children.empty())
      fail(ErrorCode::MalformedTree,
           "line " + std::to_string(line.line_no) + ": " + kind + " cannot have children");
  };
  auto one_child = [&]() -> NodePtr {
    if (children.size() != 1)
      fail(ErrorCode::MalformedTree,
           "line " + std::to_string(line.line_no) + ": " + kind + " needs exactly one child");
    return std::move(children[0]);
  };

  if (kind == "Sequence") {
    expect_args(0);
    return sequence(std::move(children));
  }
  if (kind == "Fallback") {
    expect_args(0);
    return fallback(std::move(children));
  }
  if (kind == "Inverter") {
    expect_args(0);
    return inverter(one_child());
  }
  if (kind == "Retry") {
    expect_args(1);
    int n = 0;
    try {
      n = std::stoi(line.toks[1]);
    } catch (const std::exception&) {
      fail(ErrorCode::MalformedTree,
           "line " + std::to_string(line.line_no) + ": Retry needs an integer budget");
    }
    return retry(n, one_child());
  }
  if (kind == "RetryOverCandidates") {
    expect_args(2);
    return retry_over_candidates(line.toks[1], line.toks[2], one_child());
  }
  if (kind == "Action" || kind == "Condition") {
    expect_args(1);
    expect_leaf();
    const auto it = bindings.find(line.toks[1]);
    if (it == bindings.end() || !it->second)
      fail(ErrorCode::UnboundLeaf, "line " + std::to_string(line.line_no) + ": leaf '" +
                                       line.toks[1] + "' is not in the binding registry");
    return kind == "Action" ? action(line.toks[1], it->second)
                            : condition(line.toks[1], it->second);
  }
  if (kind == "Flag") {
    expect_args(2);
    expect_leaf();
    return flag_condition(line.toks[1], line.toks[2]);
  }
  fail(ErrorCode::MalformedTree,
       "line " + std::to_string(line.line_no) + ": unknown node kind '" + kind + "'");
}

}  // namespace

NodePtr parse_tree(const std::string& text, const BindingMap& bindings) {
  std::vector<TreeLine> lines;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t indent = 0;
    while (indent < raw.size() && raw[indent] == ' ') ++indent;
    const std::string body = raw.substr(indent);
    if (body.empty() || body.rfind("//", 0) == 0) continue;
    if (indent % 2 != 0)
      fail(ErrorCode::MalformedTree,
           "line " + std::to_string(line_no) + ": indentation must be two spaces per level");
    TreeLine line;
    line.depth = static_cast<int>(indent / 2);
    line.line_no = line_no;
    std::istringstream toks(body);
    std::string tok;
    while (toks >> tok) line.toks.push_back(tok);
    lines.push_back(std::move(line));
  }
  if (lines.empty()) fail(ErrorCode::MalformedTree, "tree description is empty");
  if (lines[0].depth != 0) fail(ErrorCode::MalformedTree, "root node must not be indented");
  std::size_t pos = 0;
  NodePtr root = build_from_lines(lines, pos, bindings);
  if (pos != lines.size())
    fail(ErrorCode::MalformedTree,
         "line " + std::to_string(lines[pos].line_no) + ": multiple root nodes");
  return root;
}

}  // namespace tidy::bt
