// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tidy/episode.hpp"

using namespace tidy;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " — ",
              detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string scenario(const std::string& name) { return data_path("scenarios/" + name); }

EpisodeConfig episode_config(const std::string& path) {
  EpisodeConfig config;
  config.scenario_path = path;
  return config;
}

FactorModel random_factor_model(std::mt19937_64& rng, int n_users, int n_items, int d) {
  FactorModel m;
  m.d = d;
  m.lambda = 0.01;
  for (int u = 0; u < n_users; ++u) m.users.push_back("user" + std::to_string(u));
  for (int i = 0; i < n_items; ++i)
    m.items.push_back({"obj" + std::to_string(i % 7), "room" + std::to_string(i % 5),
                       "rec" + std::to_string(i)});
  m.rebuild_indices();
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  m.user_factors.resize(static_cast<std::size_t>(n_users) * d);
  m.item_factors.resize(static_cast<std::size_t>(n_items) * d);
  for (auto& v : m.user_factors) v = val(rng);
  for (auto& v : m.item_factors) v = val(rng);
  return m;
}

// --------------------------------------------------------------------------
void criterion_gradient_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const int dims[3] = {1, 4, 16};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> users(2, 30), items(2, 50);
    const int n_users = users(rng);
    const int n_items = items(rng);
    FactorModel m = random_factor_model(rng, n_users, n_items, dims[trial % 3]);
    RatingsCorpus corpus;
    corpus.users = m.users;
    corpus.items = m.items;
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int u = 0; u < n_users; ++u)
      for (int i = 0; i < n_items; ++i)
        if (val(rng) < 0.4) corpus.entries.push_back({u, i, val(rng), 0.5 + val(rng)});
    if (corpus.entries.empty()) corpus.entries.push_back({0, 0, 0.5, 1.0});
    const double err = oracles::max_gradient_rel_error(gradient(m, corpus),
                                                       oracles::fd_gradient(m, corpus, 1e-5));
    worst = std::max(worst, err);
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "max rel err " << worst << ", " << elapsed << " s";
  report("gradient correctness (20 random models, FD h=1e-5, rel err < 1e-4, < 5 s)",
         worst < 1e-4 && elapsed < 5.0, detail.str());
}

// --------------------------------------------------------------------------
void criterion_low_rank_recovery() {
  const auto t0 = Clock::now();
  const int n_users = 50, n_items = 60;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  std::vector<double> a(n_users), b(n_items);
  for (auto& v : a) v = coef(rng);
  for (auto& v : b) v = coef(rng);

  RatingsCorpus corpus;
  std::vector<std::pair<int, int>> held_out;
  for (int u = 0; u < n_users; ++u) corpus.add_user("u" + std::to_string(u));
  for (int i = 0; i < n_items; ++i) corpus.add_item({"obj", "room" + std::to_string(i), "rec"});
  for (int u = 0; u < n_users; ++u)
    for (int i = 0; i < n_items; ++i) {
      if (coef(rng) < 0.3)
        corpus.entries.push_back({u, i, a[u] * b[i], 1.0});
      else
        held_out.emplace_back(u, i);
    }

  TrainParams params;
  params.d = 4;
  params.lambda = 1e-4;
  params.learning_rate = 0.5;
  params.epochs = 3000;
  params.seed = 7;
  const FactorModel model = train(corpus, params);

  double se = 0.0;
  for (const auto& [u, i] : held_out) {
    const double err = a[u] * b[i] - predict_rating(model, u, i);
    se += err * err;
  }
  const double rmse = std::sqrt(se / held_out.size());
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "held-out RMSE " << rmse << " over " << held_out.size() << " entries, " << elapsed
         << " s";
  report("low-rank recovery (50x60, 30% observed, d=4, RMSE < 0.1, < 10 s)",
         rmse < 0.1 && elapsed < 10.0, detail.str());
}

// --------------------------------------------------------------------------
void criterion_ranking_oracle() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> users(1, 8), items(1, 500);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    const FactorModel m = random_factor_model(rng, users(rng), items(rng), 3);
    const std::string user = m.users[0];
    for (const int k : {1, 5, 10}) {
      for (int o = 0; o < 7; ++o) {
        const std::string cls = "obj" + std::to_string(o);
        bool exists = false;
        for (const auto& item : m.items) exists |= item.object_class == cls;
        if (!exists) continue;
        if (top_placements(m, user, cls, k) != oracles::top_k_by_scan(m, user, cls, k)) {
          ok = false;
          break;
        }
        const std::string room = "room" + std::to_string(trial % 5);
        const std::string rec = "rec" + std::to_string(trial % 13);
        if (is_misplaced(m, user, cls, room, rec, k) !=
            oracles::misplaced_by_scan(m, user, cls, room, rec, k)) {
          ok = false;
          break;
        }
      }
    }
  }
  report("ranking oracle (100 random corpora <= 500 items, k in {1,5,10})", ok);
}

// --------------------------------------------------------------------------
struct TableRow {
  const char* room;
  const char* first;
  const char* second;
};
struct TableObject {
  const char* object;
  TableRow rows[3];
};

const TableObject kTableU1[8] = {
    {"rubiks_cube",
     {{"office", "shelf", "table"},
      {"kitchen", "counter", "table"},
      {"livingroom", "drawer", "table"}}},
    {"mustard_bottle",
     {{"kitchen", "drawer", "counter"},
      {"livingroom", "table", "sofa"},
      {"office", "table", "drawer"}}},
    {"marker",
     {{"livingroom", "drawer", "shelf"},
      {"office", "table", "drawer"},
      {"kitchen", "drawer", "table"}}},
    {"cracker_box",
     {{"kitchen", "drawer", "table"},
      {"livingroom", "drawer", "table"},
      {"office", "drawer", "shelf"}}},
    {"bleach_cleanser",
     {{"livingroom", "drawer", "table"},
      {"office", "shelf", "table"},
      {"kitchen", "shelf", "drawer"}}},
    {"gelatin_box",
     {{"office", "table", "shelf"},
      {"kitchen", "drawer", "counter"},
      {"livingroom", "drawer", "table"}}},
    {"potted_meat_can",
     {{"kitchen", "counter", "shelf"},
      {"livingroom", "drawer", "table"},
      {"office", "drawer", "table"}}},
    {"mug",
     {{"kitchen", "counter", "sink"},
      {"livingroom", "shelf", "sofa"},
      {"office", "drawer", "table"}}},
};

const TableObject kTableU2[8] = {
    {"rubiks_cube",
     {{"livingroom", "drawer", "table"},
      {"office", "table", "drawer"},
      {"kitchen", "drawer", "table"}}},
    {"mustard_bottle",
     {{"kitchen", "shelf", "counter"},
      {"livingroom", "table", "drawer"},
      {"office", "drawer", "table"}}},
    {"marker",
     {{"office", "table", "drawer"},
      {"kitchen", "table", "drawer"},
      {"livingroom", "table", "shelf"}}},
    {"cracker_box",
     {{"office", "shelf", "drawer"},
      {"kitchen", "drawer", "table"},
      {"livingroom", "drawer", "sofa"}}},
    {"bleach_cleanser",
     {{"office", "shelf", "table"},
      {"kitchen", "drawer", "table"},
      {"livingroom", "table", "drawer"}}},
    {"gelatin_box",
     {{"livingroom", "table", "drawer"},
      {"office", "table", "shelf"},
      {"kitchen", "drawer", "counter"}}},
    {"potted_meat_can",
     {{"office", "drawer", "table"},
      {"kitchen", "counter", "shelf"},
      {"livingroom", "drawer", "table"}}},
    {"mug",
     {{"livingroom", "table", "shelf"},
      {"office", "drawer", "table"},
      {"kitchen", "sink", "drawer"}}},
};

void criterion_table_fidelity() {
  const FactorModel model = load_model(read_text_file(data_path("model.fm")));
  int mismatches = 0;
  auto check_user = [&](const char* user, const TableObject (&table)[8]) {
    for (const auto& entry : table) {
      const auto rooms = user_room_ranking(model, user, entry.object);
      for (int r = 0; r < 3; ++r)
        if (r >= static_cast<int>(rooms.size()) || rooms[r] != entry.rows[r].room) ++mismatches;
      for (const auto& row : entry.rows) {
        const auto candidates = receptacle_candidates(model, user, entry.object, row.room);
        if (candidates.size() < 2 || candidates[0] != row.first || candidates[1] != row.second)
          ++mismatches;
      }
    }
  };
  check_user("U1", kTableU1);
  check_user("U2", kTableU2);
  std::ostringstream detail;
  detail << mismatches << " mismatches over 8 objects x 2 users";
  report("preference-table fidelity (room order and receptacle pairs)", mismatches == 0,
         detail.str());
}

// --------------------------------------------------------------------------
void criterion_planner_optimality() {
  bool ok = true;
  int planned = 0;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(9000 + seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::ostringstream text;
    text << "width 32\nheight 32\nresolution 1\n";
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) text << (u(rng) < 0.2 ? '#' : '.');
      text << "\n";
    }
    const Costmap cm = inflate(load_map(text.str()), 0);
    std::uniform_int_distribution<int> pc(0, 31);
    Cell start{pc(rng), pc(rng)}, goal{pc(rng), pc(rng)};
    while (cm.lethal(start)) start = {pc(rng), pc(rng)};
    while (cm.lethal(goal)) goal = {pc(rng), pc(rng)};
    const auto oracle = oracles::dijkstra_cost(cm, start, goal);
    try {
      const Path path = plan_point_goal(cm, start, goal);
      if (!oracle.has_value() || std::fabs(path.total_cost - *oracle) > 1e-9 ||
          !oracles::path_is_safe(cm, path)) {
        ok = false;
        break;
      }
      ++planned;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoPathExists || oracle.has_value()) {
        ok = false;
        break;
      }
    }
  }
  std::ostringstream detail;
  detail << planned << "/50 solvable instances matched the oracle";
  report("planner optimality (50 random 32x32 grids vs exhaustive Dijkstra, lethal-free)", ok,
         detail.str());
}

// --------------------------------------------------------------------------
void criterion_bt_semantics() {
  std::mt19937_64 rng(404);
  bool ok = true;
  int cases = 0;
  for (int trial = 0; trial < 1200 && ok; ++trial) {
    oracles::LeafScripts scripts;
    const oracles::RefNode spec = oracles::random_tree(rng, scripts);
    oracles::RefRun ref(scripts);
    oracles::RealRun real(spec, scripts);
    Blackboard bb;
    for (int t = 0; t < 6; ++t) {
      if (real.root->tick(bb) != ref.tick(spec)) {
        ok = false;
        break;
      }
    }
    if (real.trace != ref.trace) ok = false;

    oracles::RealRun again(spec, scripts);
    Blackboard bb2;
    for (int t = 0; t < 6; ++t) (void)again.root->tick(bb2);
    if (again.trace != real.trace) ok = false;
    ++cases;
  }

  // Retry bound on a dedicated always-failing child.
  for (int budget = 1; budget <= 5 && ok; ++budget) {
    int calls = 0;
    auto leaf = bt::action("f", bt::make_behavior([&calls](Blackboard&) {
                             ++calls;
                             return bt::TickStatus::Failure;
                           }));
    auto tree = bt::retry(budget, std::move(leaf));
    Blackboard bb;
    if (tree->tick(bb) != bt::TickStatus::Failure || calls != budget) ok = false;
  }
  std::ostringstream detail;
  detail << cases << " randomized trees vs reference interpreter";
  report("behavior-tree semantics (short-circuit, retry bound, memory resume, determinism)", ok,
         detail.str());
}

// --------------------------------------------------------------------------
void criterion_long_horizon() {
  const auto t0 = Clock::now();
  EpisodeConfig config;
  config.scenario_path = scenario("long_horizon.scn");
  const EpisodeLog first = run_episode(config);
  const EpisodeLog second = run_episode(config);
  const double elapsed = seconds_since(t0);

  auto placed = [&](const std::string& cls, const std::string& room, const std::string& rec) {
    for (const auto& p : first.summary.placements)
      if (p.object_class == cls) return p.room == room && p.receptacle_class == rec;
    return false;
  };
  const bool identical = first.to_jsonl() == second.to_jsonl();
  const bool ok = first.summary.terminal_reason == "AllPlaced" &&
                  first.summary.objects_rearranged == 2 && placed("mug", "livingroom", "table") &&
                  placed("mustard_bottle", "kitchen", "counter") && identical && elapsed < 2.0;
  std::ostringstream detail;
  detail << "ticks " << first.summary.total_ticks << ", " << elapsed
         << " s for two runs, logs byte-identical: " << (identical ? "yes" : "no");
  report("long-horizon episode (two objects to their targets, AllPlaced, < 2 s, identical logs)",
         ok, detail.str());
}

// --------------------------------------------------------------------------
void criterion_drawer_episode() {
  const EpisodeLog log = run_episode(episode_config(scenario("drawer_place.scn")));
  std::vector<std::string> names;
  for (const auto& e : log.events)
    if (e.value("type", "") == "leaf" && e.value("kind", "") == "action")
      names.push_back(e.value("name", ""));
  const std::vector<std::string> expected = {"ApproachDrawer", "SetDownTemporary", "OpenDrawer",
                                             "RePickObject", "PlaceInside"};
  std::size_t cursor = 0;
  for (const auto& name : names)
    if (cursor < expected.size() && name == expected[cursor]) ++cursor;
  const bool order_ok = cursor == expected.size();

  bool placed_inside = false;
  for (const auto& p : log.summary.placements)
    if (p.object_class == "rubiks_cube")
      placed_inside = p.mode == "inside" && p.receptacle_class == "drawer";

  // Direct world check: place(inside) on the closed drawer fails.
  const ScenarioConfig sc = load_scenario(scenario("drawer_place.scn"));
  WorldState world = build_world(sc);
  const int drawer = resolve_receptacle_ref(world.map, "drawer@livingroom");
  world.robot.held = 0;
  world.objects[0].location = {Containment::Held, -1, {}};
  world.robot.pose = {world.map.receptacles[drawer].position.x - 1,
                      world.map.receptacles[drawer].position.y, Heading::E};
  const ActionOutcome outcome = place(world, drawer, PlaceMode::Inside);
  const bool closed_ok = !outcome.ok && outcome.reason == FailReason::ContainerClosed;

  report("drawer episode (set-down sequence in order; closed drawer rejects place-inside)",
         order_ok && placed_inside && closed_ok && log.summary.terminal_reason == "AllPlaced");
}

// --------------------------------------------------------------------------
void criterion_user_divergence() {
  EpisodeConfig config;
  config.scenario_path = scenario("user_divergence.scn");
  config.user = "U1";
  const EpisodeLog u1 = run_episode(config);
  config.user = "U2";
  const EpisodeLog u2 = run_episode(config);

  auto mug_at = [](const EpisodeLog& log, const std::string& room, const std::string& rec) {
    for (const auto& p : log.summary.placements)
      if (p.object_class == "mug") return p.room == room && p.receptacle_class == rec;
    return false;
  };
  report("user divergence (same scenario: U1 -> kitchen/counter, U2 -> livingroom/table)",
         mug_at(u1, "kitchen", "counter") && mug_at(u2, "livingroom", "table"));
}

// --------------------------------------------------------------------------
void criterion_retry_behavior() {
  const EpisodeLog once = run_episode(episode_config(scenario("retry_first_fail.scn")));
  int places_once = 0;
  for (const auto& e : once.events)
    if (e.value("type", "") == "action" && e.value("name", "") == "place") ++places_once;
  const bool first_ok =
      places_once == 2 && once.summary.terminal_reason == "AllPlaced" && once.exit_code() == 0;

  const EpisodeLog all = run_episode(episode_config(scenario("retry_all_fail.scn")));
  int places_all = 0;
  std::string candidates_repr;
  bool root_failed = false;
  for (const auto& e : all.events) {
    if (e.value("type", "") == "action" && e.value("name", "") == "place") ++places_all;
    if (e.value("type", "") == "bb" && e.value("key", "") == "candidates")
      candidates_repr = e.value("value", "");
    if (e.value("type", "") == "activation" && e.value("status", "") == "Failure")
      root_failed = true;
  }
  const int n_candidates =
      candidates_repr.empty()
          ? -1
          : static_cast<int>(std::count(candidates_repr.begin(), candidates_repr.end(), ',')) + 1;
  const bool all_ok = root_failed && places_all == n_candidates &&
                      all.summary.terminal_reason == "UnrecoverableFailure";
  std::ostringstream detail;
  detail << "first-fail: " << places_once << " place attempts; all-fail: " << places_all << " of "
         << n_candidates << " candidates";
  report("retry behavior (one injected failure -> 2 attempts; all failing -> root failure)",
         first_ok && all_ok, detail.str());
}

}  // namespace

int main() {
  criterion_gradient_correctness();
  criterion_low_rank_recovery();
  criterion_ranking_oracle();
  criterion_table_fidelity();
  criterion_planner_optimality();
  criterion_bt_semantics();
  criterion_long_horizon();
  criterion_drawer_episode();
  criterion_user_divergence();
  criterion_retry_behavior();
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
