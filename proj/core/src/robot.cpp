#include "socnav/robot.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>

namespace socnav {

void RobotConfig::validate() const {
  auto fail = [&](const char* f, const char* m) { throw ConfigError("", 0, f, m); };
  if (!(footprint_radius > 0.0)) fail("footprint_radius", "must be > 0");
  if (!(max_linear > 0.0)) fail("max_linear", "must be > 0");
  if (!(min_linear <= 0.0)) fail("min_linear", "must be <= 0");
  if (!(max_lateral >= 0.0)) fail("max_lateral", "must be >= 0");
  if (!(max_angular >= 0.0)) fail("max_angular", "must be >= 0");
  if (!(max_linear_accel > 0.0)) fail("max_linear_accel", "must be > 0");
  if (!(max_angular_accel > 0.0)) fail("max_angular_accel", "must be > 0");
  if (kinematics == Kinematics::Ackermann) {
    if (!(wheelbase > 0.0)) fail("wheelbase", "must be > 0 for ackermann");
    if (!(max_steering > 0.0 && max_steering < kPi / 2)) {
      fail("max_steering", "must be in (0, pi/2) for ackermann");
    }
    if (!(max_steering_rate > 0.0)) fail("max_steering_rate", "must be > 0 for ackermann");
  }
}

RobotConfig builtin_robot(const std::string& name) {
  RobotConfig c;
  c.name = name;
  if (name == "jackal") {
    c.kinematics = Kinematics::Differential;
    c.footprint_radius = 0.3;
    c.max_linear = 1.0;
    c.min_linear = -0.2;
    c.max_angular = 1.5;
    c.max_linear_accel = 1.5;
    c.max_angular_accel = 4.0;
  } else if (name == "holonomic") {
    c.kinematics = Kinematics::Holonomic;
    c.footprint_radius = 0.35;
    c.max_linear = 1.0;
    c.min_linear = -0.5;
    c.max_lateral = 0.6;
    c.max_angular = 1.5;
    c.max_linear_accel = 1.5;
    c.max_angular_accel = 4.0;
  } else if (name == "cart") {
    c.kinematics = Kinematics::Ackermann;
    c.footprint_radius = 0.4;
    c.max_linear = 1.2;
    c.min_linear = -0.3;
    c.max_angular = 2.0;
    c.max_linear_accel = 1.2;
    c.max_angular_accel = 4.0;
    c.wheelbase = 0.5;
    c.max_steering = 0.6;
    c.max_steering_rate = 1.5;
  } else {
    throw ConfigError("", 0, "robot", "unknown robot '" + name + "'");
  }
  return c;
}

std::vector<std::string> builtin_robot_names() { return {"cart", "holonomic", "jackal"}; }

VelocityCommand clamp_command(const VelocityCommand& cmd, const RobotConfig& cfg) {
  VelocityCommand c = cmd;
  c.vx = std::clamp(c.vx, cfg.min_linear, cfg.max_linear);
  switch (cfg.kinematics) {
    case Kinematics::Holonomic:
      c.vy = std::clamp(c.vy, -cfg.max_lateral, cfg.max_lateral);
      c.omega = std::clamp(c.omega, -cfg.max_angular, cfg.max_angular);
      c.steering = 0.0;
      break;
    case Kinematics::Differential:
      c.vy = 0.0;
      c.omega = std::clamp(c.omega, -cfg.max_angular, cfg.max_angular);
      c.steering = 0.0;
      break;
    case Kinematics::Ackermann:
      c.vy = 0.0;
      c.steering = std::clamp(c.steering, -cfg.max_steering, cfg.max_steering);
      c.omega = 0.0;
      break;
  }
  return c;
}

namespace {

// Exact unicycle arc for constant (v, w).
void arc(Pose2& p, double v, double w, double dt) {
  if (std::abs(w) < 1e-9) {
    p.x += v * std::cos(p.theta) * dt;
    p.y += v * std::sin(p.theta) * dt;
    return;
  }
  const double th1 = p.theta + w * dt;
  p.x += v / w * (std::sin(th1) - std::sin(p.theta));
  p.y -= v / w * (std::cos(th1) - std::cos(p.theta));
  p.theta = th1;
}

}  // namespace

RobotState kinematics_step(const RobotState& robot, const VelocityCommand& cmd,
                           const RobotConfig& cfg, double dt) {
  RobotState r = robot;
  switch (cfg.kinematics) {
    case Kinematics::Holonomic: {
      const double mid = r.pose.theta + 0.5 * cmd.omega * dt;
      const double c = std::cos(mid), s = std::sin(mid);
      r.pose.x += (c * cmd.vx - s * cmd.vy) * dt;
      r.pose.y += (s * cmd.vx + c * cmd.vy) * dt;
      r.pose.theta += cmd.omega * dt;
      r.vx = cmd.vx;
      r.vy = cmd.vy;
      r.omega = cmd.omega;
      break;
    }
    case Kinematics::Differential:
      arc(r.pose, cmd.vx, cmd.omega, dt);
      r.vx = cmd.vx;
      r.vy = 0.0;
      r.omega = cmd.omega;
      break;
    case Kinematics::Ackermann: {
      const double w = cmd.vx * std::tan(cmd.steering) / cfg.wheelbase;
      arc(r.pose, cmd.vx, w, dt);
      r.vx = cmd.vx;
      r.vy = 0.0;
      r.omega = w;
      r.steering = cmd.steering;
      break;
    }
  }
  r.pose.theta = wrap_angle(r.pose.theta);
  return r;
}

}  // namespace socnav
