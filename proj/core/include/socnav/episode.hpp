#pragma once

#include "socnav/config.hpp"
#include "socnav/metrics.hpp"
#include "socnav/semantic_map.hpp"
#include "socnav/task_gen.hpp"
#include "socnav/trace.hpp"

#include <string>

namespace socnav {

struct EpisodeSettings {
  std::string planner = "neutral";
  RobotConfig robot;
  InterplannerParams interplanner;
  DwaParams dwa;
  MetricsParams metrics;
  std::string config_hash;
  /// Radius around the robot within which pedestrians reach the planner.
  double perception_radius = 5.0;
  ObservationModel observe;
};

/// Simulates one episode to termination and returns its full trace.
/// Pipeline per tick: social states, waypoints, plugin forces, semantic
/// layers, global plan (periodic), intermediate plan, DWA, integration,
/// collision monitoring.
EpisodeTrace run_episode(const EpisodeSetup& setup, const StageSpec& stage,
                         const EpisodeSettings& settings);

}  // namespace socnav
