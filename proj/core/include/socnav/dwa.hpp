#pragma once

#include "socnav/global_planner.hpp"
#include "socnav/interplanner.hpp"
#include "socnav/robot.hpp"

#include <vector>

namespace socnav {

struct DwaParams {
  double horizon = 1.5;
  double sim_step = 0.1;
  double control_period = 0.1;
  int linear_samples = 11;
  int angular_samples = 11;
  double path_weight = 2.0;
  double heading_weight = 1.0;
  double clearance_weight = 1.5;
  double speed_weight = 0.5;
  /// Cruise speed as a fraction of the platform maximum before overrides.
  double cruise_fraction = 0.6;
  /// Pedestrian clearance beyond this earns no extra score.
  double clearance_cap = 1.0;
  double path_cap = 1.0;
  double heading_gain = 2.0;  // holonomic yaw tracking

  void validate() const;
};

struct DwaScene {
  const DistanceMap* distance = nullptr;
  std::vector<DynamicObstacle> obstacles;
};

/// Reachable sampling ranges over the two controlled axes: (v, omega) for
/// differential, (vx, vy) for holonomic, (v, steering) for ackermann.
struct DynamicWindow {
  double a_lo = 0.0, a_hi = 0.0;
  double b_lo = 0.0, b_hi = 0.0;
};

DynamicWindow dynamic_window(const RobotState& robot, const RobotConfig& cfg,
                             const DwaParams& params, const ControllerOverrides& overrides);

/// Speed ceiling after the cruise fraction and overrides.
double effective_max_speed(const RobotConfig& cfg, const DwaParams& params,
                           const ControllerOverrides& overrides);

/// Command for window coordinates (a, b); holonomic yaw follows the path.
VelocityCommand command_at(const RobotState& robot, const RobotConfig& cfg,
                           const Path& path, const DwaParams& params, double a, double b);

/// Poses after each sim step (horizon / sim_step of them).
std::vector<Pose2> rollout(const RobotState& robot, const RobotConfig& cfg,
                           const VelocityCommand& cmd, const DwaParams& params);

struct DwaSample {
  VelocityCommand cmd;
  bool collides = false;
  double score = 0.0;
  double min_clearance = 0.0;
  /// Closest approach to a pedestrian body over the rollout.
  double social_clearance = 0.0;
};

DwaSample evaluate_sample(const RobotState& robot, const RobotConfig& cfg,
                          const VelocityCommand& cmd, const Path& path,
                          const DwaScene& scene, const DwaParams& params,
                          const ControllerOverrides& overrides);

struct DwaResult {
  VelocityCommand cmd;
  bool stopped = false;
  double score = 0.0;
  int best_a = -1;
  int best_b = -1;
};

/// Best collision-free sample of the dynamic window, or a stop command.
DwaResult dwa_control(const RobotState& robot, const RobotConfig& cfg, const Path& path,
                      const DwaScene& scene, const DwaParams& params,
                      const ControllerOverrides& overrides = {});

}  // namespace socnav
