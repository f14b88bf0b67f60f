#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "tidy/episode.hpp"

namespace {

tidy::Cell parse_cell(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    tidy::fail(tidy::ErrorCode::ConfigError, "expected X,Y but got '" + text + "'");
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    tidy::fail(tidy::ErrorCode::ConfigError, "expected X,Y but got '" + text + "'");
  }
}

int cmd_train(const std::string& corpus_path, const std::string& out_path,
              const tidy::TrainParams& params, double holdout) {
  using namespace tidy;
  const RatingsCorpus corpus = ingest_corpus(read_text_file(corpus_path));

  RatingsCorpus train_split = corpus;
  std::vector<RatingEntry> eval_entries;
  if (holdout > 0.0) {
    std::vector<std::size_t> order(corpus.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(params.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_eval = static_cast<std::size_t>(holdout * corpus.entries.size());
    std::vector<bool> held(corpus.entries.size(), false);
    for (std::size_t i = 0; i < n_eval; ++i) held[order[i]] = true;
    train_split.entries.clear();
    for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
      if (held[i])
        eval_entries.push_back(corpus.entries[i]);
      else
        train_split.entries.push_back(corpus.entries[i]);
    }
  }

  const FactorModel model = train(train_split, params);
  std::cout << "final loss: " << loss(model, train_split) << "\n";
  if (!eval_entries.empty()) {
    double se = 0.0;
    for (const auto& e : eval_entries) {
      const double err = e.rating - predict_rating(model, e.user, e.item);
      se += err * err;
    }
    std::cout << "holdout RMSE: " << std::sqrt(se / eval_entries.size()) << " ("
              << eval_entries.size() << " entries)\n";
  }
  if (!out_path.empty()) {
    write_text_file(out_path, save_model(model));
    std::cout << "model written to " << out_path << "\n";
  }
  return 0;
}

int cmd_check(const std::string& model_path, const std::string& user, const std::string& object,
              const std::string& room, const std::string& receptacle, int k) {
  using namespace tidy;
  const FactorModel model = load_model(read_text_file(model_path));
  const bool misplaced = is_misplaced(model, user, object, room, receptacle, k);
  std::cout << (misplaced ? "MISPLACED" : "OK") << "\n";
  std::cout << "top-" << k << " placements for " << user << " / " << object << ":\n";
  int rank = 1;
  for (const int item : top_placements(model, user, object, k)) {
    const PlacementItem& it = model.items[item];
    std::cout << "  " << rank++ << ". " << it.room << " " << it.receptacle_class << "\n";
  }
  return misplaced ? 0 : 0;
}

int cmd_plan(const std::string& map_path, const std::string& from, const std::string& to,
             bool carrot, int inflate_radius, bool show) {
  using namespace tidy;
  const SemanticMap map = load_map(read_text_file(map_path));
  const Costmap cm = inflate(map, inflate_radius);
  const Cell start = parse_cell(from);
  const Cell goal = parse_cell(to);
  const Path path = carrot ? carrot_plan(cm, start, goal) : plan_point_goal(cm, start, goal);
  for (const auto& pose : path.cells)
    std::cout << pose.x << "," << pose.y << " " << to_string(pose.heading) << "\n";
  std::cout << "cells: " << path.cells.size() << "  cost: " << path.total_cost << "\n";
  if (show) {
    std::vector<Cell> overlay;
    for (const auto& pose : path.cells) overlay.push_back(pose.cell());
    std::cout << render_map(map, overlay);
  }
  return 0;
}

int cmd_render(const std::string& map_path, const std::string& scenario_path,
               const std::string& log_path, const std::string& out_path) {
  using namespace tidy;
  std::string resolved_map = map_path;
  if (!scenario_path.empty()) resolved_map = load_scenario(scenario_path).map_path;
  if (resolved_map.empty())
    fail(ErrorCode::ConfigError, "render needs --map or --scenario");
  const SemanticMap map = load_map(read_text_file(resolved_map));
  std::vector<Cell> overlay;
  if (!log_path.empty()) overlay = trajectory_from_log(read_text_file(log_path));
  const std::string art = render_map(map, overlay);
  if (out_path.empty())
    std::cout << art;
  else
    write_text_file(out_path, art);
  return 0;
}

int cmd_run(const tidy::EpisodeConfig& config, const std::string& log_path,
            const std::string& log_level) {
  using namespace tidy;
  const EpisodeLog log = run_episode(config);
  if (!log_path.empty()) write_text_file(log_path, log.to_jsonl());
  if (log_level == "debug") std::cout << log.to_jsonl();
  if (log_level != "quiet") {
    std::cout << "terminal: " << log.summary.terminal_reason << "\n";
    std::cout << "objects rearranged: " << log.summary.objects_rearranged << "\n";
    std::cout << "actions: " << log.summary.action_successes << " succeeded, "
              << log.summary.action_failures << " failed\n";
    std::cout << "path cells: " << log.summary.total_path_cells
              << "  ticks: " << log.summary.total_ticks << "\n";
    for (const auto& p : log.summary.placements) {
      std::cout << "  " << p.object_class << ": " << p.mode;
      if (!p.room.empty()) std::cout << " " << p.receptacle_class << " @ " << p.room;
      std::cout << "\n";
    }
  }
  return log.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic household tidy-up simulation suite"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "fit a preference model from a ratings corpus");
  std::string corpus_path, model_out;
  tidy::TrainParams params;
  double holdout = 0.0;
  train_cmd->add_option("--corpus", corpus_path, "corpus CSV path")->required();
  train_cmd->add_option("--out", model_out, "model file to write");
  train_cmd->add_option("--d", params.d, "latent dimension");
  train_cmd->add_option("--lambda", params.lambda, "L2 regularization weight");
  train_cmd->add_option("--lr", params.learning_rate, "learning rate");
  train_cmd->add_option("--epochs", params.epochs, "training epochs");
  train_cmd->add_option("--seed", params.seed, "init seed");
  train_cmd->add_option("--init", params.init_scale, "uniform init half-width");
  train_cmd->add_option("--holdout", holdout, "fraction of entries held out for RMSE")
      ->check(CLI::Range(0.0, 0.9));

  // run
  auto* run_cmd = app.add_subcommand("run", "run a tidy episode from a scenario file");
  tidy::EpisodeConfig episode;
  std::string run_log_path;
  std::string run_log_level = "info";
  bool quiet = false;
  std::string run_user, run_model, run_corpus, run_room_choice;
  int run_k = -1;
  long run_max_ticks = -1;
  long long run_seed = -1;
  run_cmd->add_option("--scenario", episode.scenario_path, "scenario file")->required();
  run_cmd->add_option("--user", run_user, "override the sampled user identity");
  run_cmd->add_option("--k", run_k, "override top-k");
  run_cmd->add_option("--seed", run_seed, "override the seed");
  run_cmd->add_option("--max-ticks", run_max_ticks, "override the tick budget");
  run_cmd->add_option("--model", run_model, "override the model file");
  run_cmd->add_option("--corpus", run_corpus, "override the corpus file");
  run_cmd->add_option("--room-choice", run_room_choice, "kb or user");
  run_cmd->add_option("--log,--out", run_log_path, "write the episode log (JSON lines)");
  run_cmd->add_option("--log-level", run_log_level, "quiet, info, or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
  run_cmd->add_flag("--quiet", quiet, "shorthand for --log-level quiet");

  // check
  auto* check_cmd = app.add_subcommand("check", "check whether a placement is misplaced");
  std::string check_model, check_user, check_object, check_room, check_receptacle;
  int check_k = 10;
  check_cmd->add_option("--model", check_model)->required();
  check_cmd->add_option("--user", check_user)->required();
  check_cmd->add_option("--object", check_object)->required();
  check_cmd->add_option("--room", check_room)->required();
  check_cmd->add_option("--receptacle", check_receptacle)->required();
  check_cmd->add_option("--k", check_k, "top-k cutoff");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "plan a path on a map");
  std::string plan_map, plan_from, plan_to;
  bool plan_carrot = false, plan_show = false;
  int plan_inflate = 0;
  plan_cmd->add_option("--map", plan_map)->required();
  plan_cmd->add_option("--from", plan_from, "start cell X,Y")->required();
  plan_cmd->add_option("--to", plan_to, "goal cell X,Y")->required();
  plan_cmd->add_flag("--carrot", plan_carrot, "carrot approach toward a blocked goal");
  plan_cmd->add_option("--inflate", plan_inflate, "obstacle inflation radius in cells");
  plan_cmd->add_flag("--show", plan_show, "render the map with the path overlaid");

  // render
  auto* render_cmd = app.add_subcommand("render", "render a map, optionally with a trajectory");
  std::string render_map_path, render_scenario, render_log, render_out;
  render_cmd->add_option("--map", render_map_path);
  render_cmd->add_option("--scenario", render_scenario, "render this scenario's map");
  render_cmd->add_option("--log", render_log, "overlay the trajectory from an episode log");
  render_cmd->add_option("--out", render_out, "output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(corpus_path, model_out, params, holdout);
    if (*run_cmd) {
      if (!run_user.empty()) episode.user = run_user;
      if (run_k >= 0) episode.k = run_k;
      if (run_seed >= 0) episode.seed = static_cast<std::uint64_t>(run_seed);
      if (run_max_ticks >= 0) episode.max_ticks = run_max_ticks;
      if (!run_model.empty()) episode.model_path = run_model;
      if (!run_corpus.empty()) episode.corpus_path = run_corpus;
      if (!run_room_choice.empty()) episode.room_choice = run_room_choice;
      if (quiet) run_log_level = "quiet";
      return cmd_run(episode, run_log_path, run_log_level);
    }
    if (*check_cmd)
      return cmd_check(check_model, check_user, check_object, check_room, check_receptacle,
                       check_k);
    if (*plan_cmd)
      return cmd_plan(plan_map, plan_from, plan_to, plan_carrot, plan_inflate, plan_show);
    if (*render_cmd) return cmd_render(render_map_path, render_scenario, render_log, render_out);
  } catch (const tidy::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
