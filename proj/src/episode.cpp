#include "tidy/episode.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tidy/bt.hpp"

namespace tidy {
namespace {

using bt::Behavior;
using bt::Candidate;
using bt::CandidateList;
using bt::TickStatus;

using json = nlohmann::json;

struct KnownObject {
  int id = 0;
  std::string object_class;
  Cell position;
  int receptacle_id = -1;
  Containment mode = Containment::OnReceptacle;
};

/// Shared state the behaviors operate on during one episode.
struct EpisodeContext {
  WorldState& world;
  const FactorModel& model;
  const CommonSenseKB& kb;
  const ScenarioConfig& cfg;
  EpisodeLog& log;
  std::map<int, KnownObject> known;

  void log_event(json event) {
    event["tick"] = world.tick;
    event["pose"] = {world.robot.pose.x, world.robot.pose.y};
    log.events.push_back(std::move(event));
  }

  void observe(const std::vector<Detection>& detections) {
    for (const auto& d : detections) {
      if (d.kind != Detection::Kind::Object) continue;
      const bool is_new = known.find(d.id) == known.end();
      KnownObject& ko = known[d.id];
      ko.id = d.id;
      ko.object_class = d.cls;
      ko.position = d.position;
      ko.receptacle_id = d.receptacle_id;
      ko.mode = d.mode;
      if (is_new) {
        const auto& rec = world.receptacle(d.receptacle_id);
        log_event({{"type", "discover"},
                   {"object_id", d.id},
                   {"class", d.cls},
                   {"receptacle", rec.receptacle_class},
                   {"room", rec.room}});
      }
    }
  }

  ActionOutcome do_action(const std::string& name, json detail,
                          const std::function<ActionOutcome()>& fn) {
    const ActionOutcome outcome = fn();
    detail["type"] = "action";
    detail["name"] = name;
    detail["outcome"] = outcome.ok ? "Succeeded" : "Failed";
    if (!outcome.ok) detail["reason"] = to_string(outcome.reason);
    log_event(std::move(detail));
    if (outcome.ok)
      ++log.summary.action_successes;
    else
      ++log.summary.action_failures;
    return outcome;
  }

  Costmap costmap() const { return world_costmap(world, cfg.inflate_radius); }

  json receptacle_detail(int rec_id) const {
    const auto& rec = world.receptacle(rec_id);
    return {{"receptacle_id", rec_id},
            {"receptacle", rec.receptacle_class},
            {"room", rec.room}};
  }
};

/// Incremental movement toward a goal cell: plans once, advances one cell
/// per tick, replans when the world changes underneath the path.
class Walker {
 public:
  enum class Mode { Direct, Carrot };

  TickStatus step_toward(EpisodeContext& ctx, Cell goal, int stop_within, Mode mode) {
    WorldState& world = ctx.world;
    const Cell cur = world.robot.pose.cell();
    if (chebyshev(cur, goal) <= stop_within) {
      follower_.reset();
      return TickStatus::Success;
    }
    if (follower_ && !(goal_ == goal)) follower_.reset();
    if (!follower_ && !plan(ctx, goal, mode)) return TickStatus::Failure;

    switch (follower_->advance(world)) {
      case FollowStatus::Advancing:
        return TickStatus::Running;
      case FollowStatus::Blocked:
        // A receptacle appeared on the path; replan next tick against the
        // refreshed costmap.
        follower_.reset();
        return TickStatus::Running;
      case FollowStatus::Arrived:
        // Path exhausted short of the stop distance; replan from here. An
        // empty replan means we cannot get any closer.
        follower_.reset();
        if (!plan(ctx, goal, mode)) return TickStatus::Failure;
        if (follower_->advance(world) == FollowStatus::Advancing) return TickStatus::Running;
        follower_.reset();
        return TickStatus::Failure;
    }
    return TickStatus::Failure;
  }

  void reset() {
    follower_.reset();
    goal_.reset();
  }

 private:
  bool plan(EpisodeContext& ctx, Cell goal, Mode mode) {
    try {
      const Costmap cm = ctx.costmap();
      const Cell cur = ctx.world.robot.pose.cell();
      Path path = mode == Mode::Direct ? plan_point_goal(cm, cur, goal)
                                       : carrot_plan(cm, cur, goal);
      if (path.empty()) return false;
      follower_ = PathFollower{std::move(path)};
      goal_ = goal;
      return true;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoPathExists || e.code() == ErrorCode::NoApproachExists ||
          e.code() == ErrorCode::GoalUntraversable)
        return false;
      throw;
    }
  }

  std::optional<PathFollower> follower_;
  std::optional<Cell> goal_;
};

// Blackboard keys shared by the episode behaviors.
constexpr const char* kTargetObjectKey = "target_object";
constexpr const char* kTargetObjectClassKey = "target_object_class";
constexpr const char* kTargetReceptacleKey = "target_receptacle";
constexpr const char* kTempReceptacleKey = "temp_receptacle";
constexpr const char* kTempObjectKey = "temp_object";
constexpr const char* kNoMisplacedKey = "no_misplaced";

const Candidate& current_candidate(Blackboard& bb) {
  const auto& list = bb.get<CandidateList>(bt::kCandidatesKey);
  const int idx = bb.get<int>(bt::kCandidateCursorKey);
  if (idx < 0 || idx >= static_cast<int>(list.size()))
    fail(ErrorCode::BlackboardKeyMissing, "candidate cursor out of range");
  return list[idx];
}

/// Picks the known misplaced object with the worst current-placement rank.
class IdentifyMisplacedBehavior final : public Behavior {
 public:
  explicit IdentifyMisplacedBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    int chosen = -1;
    int worst_rank = -1;
    for (const auto& [id, ko] : ctx_.known) {
      if (ko.mode == Containment::Held || ko.mode == Containment::Dropped) continue;
      const auto& rec = ctx_.world.receptacle(ko.receptacle_id);
      bool misplaced = false;
      int rank = 0;
      try {
        misplaced = is_misplaced(ctx_.model, ctx_.cfg.user, ko.object_class, rec.room,
                                 rec.receptacle_class, ctx_.cfg.k);
        rank = placement_rank(ctx_.model, ctx_.cfg.user, ko.object_class, rec.room,
                              rec.receptacle_class);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownObject) continue;  // not in the model's vocabulary
        throw;
      }
      if (!misplaced) continue;
      if (rank > worst_rank) {
        worst_rank = rank;
        chosen = id;
      }
    }
    if (chosen < 0) {
      bb.set(kNoMisplacedKey, true);
      return TickStatus::Failure;
    }
    bb.set(kTargetObjectKey, chosen);
    bb.set(kTargetObjectClassKey, ctx_.known.at(chosen).object_class);
    return TickStatus::Success;
  }

 private:
  EpisodeContext& ctx_;
};

/// Flattens target rooms x per-room receptacle rankings into the candidate
/// list the retry decorator walks.
class PlacementCandidatesBehavior final : public Behavior {
 public:
  explicit PlacementCandidatesBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const std::string& cls = bb.get<std::string>(kTargetObjectClassKey);
    const std::vector<std::string> rooms = ctx_.cfg.room_choice == "user"
                                               ? user_room_ranking(ctx_.model, ctx_.cfg.user, cls)
                                               : target_room(ctx_.kb, cls);
    CandidateList candidates;
    for (const auto& room : rooms)
      for (const auto& rc : receptacle_candidates(ctx_.model, ctx_.cfg.user, cls, room))
        candidates.push_back({room, rc});
    if (candidates.empty()) return TickStatus::Failure;
    bb.set(bt::kCandidatesKey, candidates);
    bb.set(bt::kCandidateCursorKey, 0);
    return TickStatus::Success;
  }

 private:
  EpisodeContext& ctx_;
};

class PickupBehavior final : public Behavior {
 public:
  explicit PickupBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const int id = bb.get<int>(kTargetObjectKey);
    if (ctx_.world.robot.held == id) return TickStatus::Success;
    const KnownObject& ko = ctx_.known.at(id);
    const TickStatus st =
        walker_.step_toward(ctx_, ko.position, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    const ActionOutcome outcome = ctx_.do_action(
        "pickup", {{"object_id", id}, {"class", ko.object_class}},
        [&] { return pickup(ctx_.world, id); });
    return outcome.ok ? TickStatus::Success : TickStatus::Failure;
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

class RoomNavigatorBehavior final : public Behavior {
 public:
  explicit RoomNavigatorBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const Candidate& cand = current_candidate(bb);
    Cell center;
    try {
      center = room_center(ctx_.world.map, cand.room).cell();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnknownRoom || e.code() == ErrorCode::RoomHasNoFreeCell)
        return TickStatus::Failure;
      throw;
    }
    return walker_.step_toward(ctx_, center, 0, Walker::Mode::Direct);
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

/// Scans the room once, then approaches the first registered receptacle of
/// the candidate class.
class ReceptacleNavigatorBehavior final : public Behavior {
 public:
  explicit ReceptacleNavigatorBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const Candidate& cand = current_candidate(bb);
    if (!scanned_) {
      ScanParams params;
      params.whole_room = true;
      ctx_.observe(scan(ctx_.world, params));
      scanned_ = true;
    }
    int target = -1;
    for (const auto& rec : receptacles_in_room(ctx_.world.map, cand.room))
      if (rec.receptacle_class == cand.receptacle_class) {
        target = rec.id;
        break;
      }
    if (target < 0) return TickStatus::Failure;
    const Cell pos = ctx_.world.receptacle(target).position;
    const TickStatus st =
        walker_.step_toward(ctx_, pos, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st == TickStatus::Success) bb.set(kTargetReceptacleKey, target);
    return st;
  }

  void reset() override {
    walker_.reset();
    scanned_ = false;
  }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
  bool scanned_ = false;
};

class ApproachDrawerBehavior final : public Behavior {
 public:
  explicit ApproachDrawerBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const int rec_id = bb.get<int>(kTargetReceptacleKey);
    const Cell pos = ctx_.world.receptacle(rec_id).position;
    const TickStatus st =
        walker_.step_toward(ctx_, pos, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    bb.set(bt::kDrawerOpenKey, ctx_.world.receptacle_is_open(rec_id));
    return TickStatus::Success;
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

class FindTempLocationBehavior final : public Behavior {
 public:
  explicit FindTempLocationBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    try {
      const int id = find_temp_location(ctx_.world, ctx_.cfg.inflate_radius);
      bb.set(kTempReceptacleKey, id);
      return TickStatus::Success;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoTempLocation) return TickStatus::Failure;
      throw;
    }
  }

 private:
  EpisodeContext& ctx_;
};

class SetDownTemporaryBehavior final : public Behavior {
 public:
  explicit SetDownTemporaryBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const int temp = bb.get<int>(kTempReceptacleKey);
    if (!ctx_.world.robot.held.has_value()) return TickStatus::Failure;
    const Cell pos = ctx_.world.receptacle(temp).position;
    const TickStatus st =
        walker_.step_toward(ctx_, pos, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    bb.set(kTempObjectKey, *ctx_.world.robot.held);
    const ActionOutcome outcome = ctx_.do_action("place", ctx_.receptacle_detail(temp),
                                                 [&] { return place(ctx_.world, temp, PlaceMode::On); });
    return outcome.ok ? TickStatus::Success : TickStatus::Failure;
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

class OpenDrawerBehavior final : public Behavior {
 public:
  explicit OpenDrawerBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const int rec_id = bb.get<int>(kTargetReceptacleKey);
    const Cell pos = ctx_.world.receptacle(rec_id).position;
    const TickStatus st =
        walker_.step_toward(ctx_, pos, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    const ActionOutcome outcome = ctx_.do_action("open", ctx_.receptacle_detail(rec_id),
                                                 [&] { return open_receptacle(ctx_.world, rec_id); });
    return outcome.ok ? TickStatus::Success : TickStatus::Failure;
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

class RePickObjectBehavior final : public Behavior {
 public:
  explicit RePickObjectBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const int obj_id = bb.get<int>(kTempObjectKey);
    const ObjectInstance& obj = ctx_.world.object(obj_id);
    if (ctx_.world.robot.held == obj_id) return TickStatus::Success;
    const TickStatus st = walker_.step_toward(ctx_, obj.location.position,
                                              ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    const ActionOutcome outcome = ctx_.do_action(
        "pickup", {{"object_id", obj_id}, {"class", obj.object_class}},
        [&] { return pickup(ctx_.world, obj_id); });
    return outcome.ok ? TickStatus::Success : TickStatus::Failure;
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

class PlaceInsideBehavior final : public Behavior {
 public:
  explicit PlaceInsideBehavior(EpisodeContext& ctx) : ctx_(ctx) {}

  TickStatus tick(Blackboard& bb) override {
    const int rec_id = bb.get<int>(kTargetReceptacleKey);
    const Cell pos = ctx_.world.receptacle(rec_id).position;
    const TickStatus st =
        walker_.step_toward(ctx_, pos, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    const ActionOutcome outcome =
        ctx_.do_action("place", ctx_.receptacle_detail(rec_id),
                       [&] { return place(ctx_.world, rec_id, PlaceMode::Inside); });
    return outcome.ok ? TickStatus::Success : TickStatus::Failure;
  }

  void reset() override { walker_.reset(); }

 private:
  EpisodeContext& ctx_;
  Walker walker_;
};

/// Places on plain receptacles directly; openable targets route through the
/// drawer placement tree.
class PlaceBehaviorLeaf final : public Behavior {
 public:
  PlaceBehaviorLeaf(EpisodeContext& ctx, bt::TraceFn trace)
      : ctx_(ctx), trace_(std::move(trace)) {
    bt::BindingMap bindings;
    bindings["ApproachDrawer"] = std::make_shared<ApproachDrawerBehavior>(ctx_);
    bindings["FindTempLocation"] = std::make_shared<FindTempLocationBehavior>(ctx_);
    bindings["SetDownTemporary"] = std::make_shared<SetDownTemporaryBehavior>(ctx_);
    bindings["OpenDrawer"] = std::make_shared<OpenDrawerBehavior>(ctx_);
    bindings["RePickObject"] = std::make_shared<RePickObjectBehavior>(ctx_);
    bindings["PlaceInside"] = std::make_shared<PlaceInsideBehavior>(ctx_);
    drawer_tree_ = bt::build_drawer_place_tree(bindings);
  }

  TickStatus tick(Blackboard& bb) override {
    const int rec_id = bb.get<int>(kTargetReceptacleKey);
    const ReceptacleRecord& rec = ctx_.world.receptacle(rec_id);
    if (rec.openable) return drawer_tree_->tick(bb, trace_);
    const TickStatus st =
        walker_.step_toward(ctx_, rec.position, ctx_.world.robot.reach, Walker::Mode::Carrot);
    if (st != TickStatus::Success) return st;
    const ActionOutcome outcome =
        ctx_.do_action("place", ctx_.receptacle_detail(rec_id),
                       [&] { return place(ctx_.world, rec_id, PlaceMode::On); });
    return outcome.ok ? TickStatus::Success : TickStatus::Failure;
  }

  void reset() override {
    walker_.reset();
    drawer_tree_->reset();
  }

 private:
  EpisodeContext& ctx_;
  bt::TraceFn trace_;
  Walker walker_;
  bt::NodePtr drawer_tree_;
};

}  // namespace

std::string EpisodeLog::to_jsonl() const {
  std::ostringstream out;
  for (const auto& event : events) out << event.dump() << "\n";
  json placements = json::array();
  for (const auto& p : summary.placements)
    placements.push_back({{"object_id", p.object_id},
                          {"class", p.object_class},
                          {"room", p.room},
                          {"receptacle", p.receptacle_class},
                          {"mode", p.mode}});
  const json tail = {{"type", "summary"},
                     {"objects_rearranged", summary.objects_rearranged},
                     {"successes", summary.action_successes},
                     {"failures", summary.action_failures},
                     {"total_path_cells", summary.total_path_cells},
                     {"total_ticks", summary.total_ticks},
                     {"terminal_reason", summary.terminal_reason},
                     {"placements", placements}};
  out << tail.dump() << "\n";
  return out.str();
}

int EpisodeLog::exit_code() const {
  if (summary.terminal_reason == "AllPlaced") return 0;
  if (summary.terminal_reason == "UnrecoverableFailure") return 2;
  if (summary.terminal_reason == "TickBudgetExhausted") return 3;
  return 1;
}

EpisodeLog run_episode(const ScenarioConfig& scenario) {
  if (scenario.user.empty()) fail(ErrorCode::ConfigError, "scenario does not name a user");
  if (scenario.corpus_path.empty())
    fail(ErrorCode::ConfigError, "scenario does not reference a corpus");
  if (scenario.k < 1) fail(ErrorCode::ConfigError, "k must be >= 1");
  if (scenario.max_ticks < 1) fail(ErrorCode::ConfigError, "max_ticks must be >= 1");

  const RatingsCorpus corpus = ingest_corpus(read_text_file(scenario.corpus_path));
  const FactorModel model = scenario.model_path.empty()
                                ? train(corpus, scenario.train)
                                : load_model(read_text_file(scenario.model_path));
  const CommonSenseKB kb = build_kb(corpus);
  model.user_id(scenario.user);  // validate before the loop

  EpisodeLog log;
  WorldState world = build_world(scenario);
  EpisodeContext ctx{world, model, kb, scenario, log, {}};

  const bt::TraceFn trace = [&](const bt::TraceEvent& ev) {
    if (ev.status == TickStatus::Running) return;
    json event = {{"type", "leaf"},
                  {"name", ev.name},
                  {"kind", ev.kind == bt::TraceEvent::Kind::Action ? "action" : "condition"},
                  {"status", bt::to_string(ev.status)}};
    if (!ev.note.empty()) event["note"] = ev.note;
    ctx.log_event(std::move(event));
  };

  bt::BindingMap bindings;
  bindings["IdentifyMisplaced"] = std::make_shared<IdentifyMisplacedBehavior>(ctx);
  bindings["PlacementCandidates"] = std::make_shared<PlacementCandidatesBehavior>(ctx);
  bindings["PickupBehavior"] = std::make_shared<PickupBehavior>(ctx);
  bindings["RoomNavigator"] = std::make_shared<RoomNavigatorBehavior>(ctx);
  bindings["ReceptacleNavigator"] = std::make_shared<ReceptacleNavigatorBehavior>(ctx);
  bindings["PlaceBehavior"] = std::make_shared<PlaceBehaviorLeaf>(ctx, trace);
  const bt::NodePtr tree = bt::build_tidy_tree(bindings);

  ctx.observe(scan(world));  // initial sweep from the start pose

  std::string terminal;
  while (terminal.empty()) {
    Blackboard bb;
    bb.on_set = [&](const std::string& key, const std::string& repr) {
      ctx.log_event({{"type", "bb"}, {"key", key}, {"value", repr}});
    };
    tree->reset();

    TickStatus status = TickStatus::Running;
    while (true) {
      if (world.tick >= scenario.max_ticks) {
        terminal = "TickBudgetExhausted";
        break;
      }
      ctx.observe(scan(world));  // perception runs in the background every tick
      status = tree->tick(bb, trace);
      const Cell before = world.robot.pose.cell();
      step(world);
      const Cell after = world.robot.pose.cell();
      if (!(before == after)) {
        ++log.summary.total_path_cells;
        ctx.log_event({{"type", "move"}, {"to", {after.x, after.y}}});
      }
      if (world.dropped_object) {
        terminal = "UnrecoverableFailure";
        break;
      }
      if (status != TickStatus::Running) break;
    }
    if (!terminal.empty()) break;

    ctx.log_event({{"type", "activation"}, {"status", bt::to_string(status)}});
    if (status == TickStatus::Success) {
      ++log.summary.objects_rearranged;
      continue;
    }
    terminal = bb.has(kNoMisplacedKey) ? "AllPlaced" : "UnrecoverableFailure";
  }

  log.summary.terminal_reason = terminal;
  log.summary.total_ticks = world.tick;
  for (const auto& obj : world.objects) {
    FinalPlacement p;
    p.object_id = obj.id;
    p.object_class = obj.object_class;
    switch (obj.location.kind) {
      case Containment::Held:
        p.mode = "held";
        break;
      case Containment::Dropped:
        p.mode = "dropped";
        break;
      case Containment::OnReceptacle:
      case Containment::InsideReceptacle: {
        p.mode = obj.location.kind == Containment::OnReceptacle ? "on" : "inside";
        const auto& rec = world.receptacle(obj.location.receptacle_id);
        p.room = rec.room;
        p.receptacle_class = rec.receptacle_class;
        break;
      }
    }
    log.summary.placements.push_back(std::move(p));
  }
  return log;
}

EpisodeLog run_episode(const EpisodeConfig& config) {
  ScenarioConfig scenario = load_scenario(config.scenario_path);
  if (config.user) scenario.user = *config.user;
  if (config.k) scenario.k = *config.k;
  if (config.seed) scenario.seed = *config.seed;
  if (config.max_ticks) scenario.max_ticks = *config.max_ticks;
  if (config.model_path) scenario.model_path = *config.model_path;
  if (config.corpus_path) scenario.corpus_path = *config.corpus_path;
  if (config.room_choice) {
    if (*config.room_choice != "kb" && *config.room_choice != "user")
      fail(ErrorCode::ConfigError, "room choice must be kb or user");
    scenario.room_choice = *config.room_choice;
  }
  return run_episode(scenario);
}

std::vector<Cell> trajectory_from_log(const std::string& jsonl) {
  std::vector<Cell> out;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception&) {
      fail(ErrorCode::ParseError, "episode log line is not JSON: " + line);
    }
    if (event.value("type", "") == "move")
      out.push_back({event["to"][0].get<int>(), event["to"][1].get<int>()});
  }
  return out;
}

}  // namespace tidy
