#pragma once

#include "socnav/config.hpp"
#include "socnav/episode.hpp"
#include "socnav/metrics.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace socnav {

/// Library version string.
const char* engine_version();

struct RunOptions {
  /// Overrides the config's planner list when non-empty.
  std::vector<std::string> planners;
  std::optional<std::string> robot;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool record = false;
  /// Output root; the config's `output` when empty.
  std::filesystem::path out;
  /// Called on the writer thread after each episode row is flushed.
  std::function<void(const EpisodeResult&)> on_episode;
};

struct PlannerRun {
  std::string planner;
  std::filesystem::path metrics_csv;
  std::filesystem::path aggregate_csv;
  std::vector<EpisodeResult> results;
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::filesystem::path manifest;
  std::vector<PlannerRun> planners;
  std::vector<std::filesystem::path> files;
};

/// Applies overrides and fills a missing seed from entropy. Validates.
BenchmarkConfig resolve_run_config(BenchmarkConfig cfg, const RunOptions& opts);

/// Runs every stage for every planner. Per-episode failures are recorded
/// as failed rows; rows are flushed as soon as they are final.
RunReport run_benchmark(const BenchmarkConfig& cfg, const RunOptions& opts);

/// Runs a list of episodes of one stage on `jobs` threads; `sink` receives
/// results in episode order on the calling thread.
void run_episodes(const TaskGenerator& gen, const std::vector<int>& episodes,
                  const EpisodeSettings& settings, int jobs,
                  const std::function<void(EpisodeResult&&, EpisodeTrace*)>& sink);

/// Trace file name for an episode.
std::string trace_file_name(const std::string& stage, int episode);

}  // namespace socnav
