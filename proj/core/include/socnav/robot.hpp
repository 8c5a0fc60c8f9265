#pragma once

#include "socnav/types.hpp"
#include "socnav/world.hpp"

#include <string>
#include <vector>

namespace socnav {

/// Limits and footprint of one platform.
struct RobotConfig {
  std::string name = "jackal";
  Kinematics kinematics = Kinematics::Differential;
  double footprint_radius = 0.3;
  double max_linear = 1.0;   // m/s, forward
  double min_linear = 0.0;   // m/s, negative allows reversing
  double max_lateral = 0.0;  // m/s, holonomic only
  double max_angular = 1.5;  // rad/s
  double max_linear_accel = 1.0;   // m/s^2
  double max_angular_accel = 3.0;  // rad/s^2
  double wheelbase = 0.0;          // ackermann
  double max_steering = 0.0;       // rad, ackermann
  double max_steering_rate = 0.0;  // rad/s, ackermann

  void validate() const;
};

/// Built-in platforms: "jackal" (differential), "holonomic", "cart"
/// (ackermann). Throws ConfigError for other names.
RobotConfig builtin_robot(const std::string& name);
std::vector<std::string> builtin_robot_names();

/// holonomic: (vx, vy, omega) in the body frame; differential: (vx, omega);
/// ackermann: (vx, steering).
struct VelocityCommand {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  double steering = 0.0;

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

/// Clamps every component to the config's limits.
VelocityCommand clamp_command(const VelocityCommand& cmd, const RobotConfig& cfg);

/// Integrates one step under a constant command (exact arcs for the
/// differential and bicycle models). Does not consult the map.
RobotState kinematics_step(const RobotState& robot, const VelocityCommand& cmd,
                           const RobotConfig& cfg, double dt);

}  // namespace socnav
