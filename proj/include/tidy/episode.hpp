#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tidy/scenario.hpp"

namespace tidy {

struct FinalPlacement {
  int object_id = 0;
  std::string object_class;
  std::string room;
  std::string receptacle_class;
  std::string mode;  // on | inside | held | dropped
};

struct EpisodeSummary {
  long objects_rearranged = 0;
  long action_successes = 0;
  long action_failures = 0;
  long total_path_cells = 0;
  long total_ticks = 0;
  std::string terminal_reason;  // AllPlaced | UnrecoverableFailure | TickBudgetExhausted
  std::vector<FinalPlacement> placements;
};

/// Ordered event records plus the terminal summary. Events are JSON objects
/// (one per line in the serialized form) and are tick-monotone.
struct EpisodeLog {
  std::vector<nlohmann::json> events;
  EpisodeSummary summary;

  std::string to_jsonl() const;
  int exit_code() const;  // 0 AllPlaced, 2 UnrecoverableFailure, 3 TickBudgetExhausted
};

/// Scenario path plus command-line overrides.
struct EpisodeConfig {
  std::string scenario_path;
  std::optional<std::string> user;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<long> max_ticks;
  std::optional<std::string> model_path;
  std::optional<std::string> corpus_path;
  std::optional<std::string> room_choice;
};

EpisodeLog run_episode(const EpisodeConfig& config);
EpisodeLog run_episode(const ScenarioConfig& scenario);

/// Robot trajectory recorded in a serialized episode log (move events).
std::vector<Cell> trajectory_from_log(const std::string& jsonl);

}  // namespace tidy
