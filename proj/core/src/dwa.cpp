#include "socnav/dwa.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace socnav {

void DwaParams::validate() const {
  auto fail = [](const char* f, const char* m) { throw ConfigError("", 0, f, m); };
  if (!(horizon > 0.0)) fail("dwa.horizon", "must be > 0");
  if (!(sim_step > 0.0 && sim_step <= horizon)) fail("dwa.sim_step", "must be in (0, horizon]");
  if (!(control_period > 0.0)) fail("dwa.control_period", "must be > 0");
  if (linear_samples < 1) fail("dwa.linear_samples", "must be >= 1");
  if (angular_samples < 1) fail("dwa.angular_samples", "must be >= 1");
  if (path_weight < 0 || heading_weight < 0 || clearance_weight < 0 || speed_weight < 0) {
    fail("dwa.weights", "must be >= 0");
  }
  if (!(cruise_fraction > 0.0 && cruise_fraction <= 1.0)) fail("dwa.cruise_fraction", "must be in (0, 1]");
  if (!(clearance_cap > 0.0)) fail("dwa.clearance_cap", "must be > 0");
  if (!(path_cap > 0.0)) fail("dwa.path_cap", "must be > 0");
}

double effective_max_speed(const RobotConfig& cfg, const DwaParams& params,
                           const ControllerOverrides& overrides) {
  return std::min(cfg.max_linear, cfg.max_linear * params.cruise_fraction * overrides.speed_factor);
}

namespace {

void window_axis(double current, double lo_limit, double hi_limit, double rate, double T,
                 double& lo, double& hi) {
  lo = std::max(lo_limit, current - rate * T);
  hi = std::min(hi_limit, current + rate * T);
  if (lo > hi) {
    // Over the ceiling (e.g. after a speed override): brake as hard as allowed.
    if (current > hi_limit) {
      hi = lo = std::max(hi_limit, current - rate * T);
    } else {
      lo = hi = std::min(lo_limit, current + rate * T);
    }
  }
}

double polyline_distance(const Path& path, const Vec2& p) {
  if (path.poses.empty()) return 0.0;
  if (path.poses.size() == 1) return (path.poses[0].position() - p).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.poses.size(); ++i) {
    const Vec2 a = path.poses[i - 1].position(), b = path.poses[i].position();
    const Vec2 ab = b - a;
    const double l2 = ab.squaredNorm();
    const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

double sample_value(double lo, double hi, int n, int i) {
  if (n <= 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / (n - 1);
}

}  // namespace

DynamicWindow dynamic_window(const RobotState& robot, const RobotConfig& cfg,
                             const DwaParams& params, const ControllerOverrides& overrides) {
  DynamicWindow w;
  const double T = params.control_period;
  const double vmax = effective_max_speed(cfg, params, overrides);
  window_axis(robot.vx, cfg.min_linear, vmax, cfg.max_linear_accel, T, w.a_lo, w.a_hi);
  switch (cfg.kinematics) {
    case Kinematics::Differential:
      window_axis(robot.omega, -cfg.max_angular, cfg.max_angular, cfg.max_angular_accel, T,
                  w.b_lo, w.b_hi);
      break;
    case Kinematics::Holonomic: {
      const double lat = std::min(cfg.max_lateral, vmax);
      window_axis(robot.vy, -lat, lat, cfg.max_linear_accel, T, w.b_lo, w.b_hi);
      break;
    }
    case Kinematics::Ackermann:
      window_axis(robot.steering, -cfg.max_steering, cfg.max_steering, cfg.max_steering_rate, T,
                  w.b_lo, w.b_hi);
      break;
  }
  return w;
}

VelocityCommand command_at(const RobotState& robot, const RobotConfig& cfg, const Path& path,
                           const DwaParams& params, double a, double b) {
  VelocityCommand c;
  c.vx = a;
  switch (cfg.kinematics) {
    case Kinematics::Differential:
      c.omega = b;
      break;
    case Kinematics::Ackermann:
      c.steering = b;
      break;
    case Kinematics::Holonomic: {
      c.vy = b;
      double want = robot.pose.theta;
      if (!path.poses.empty()) {
        const Vec2 to = path.poses.back().position() - robot.pose.position();
        if (to.norm() > 1e-6) want = std::atan2(to.y(), to.x());
      }
      const double T = params.control_period;
      const double w = params.heading_gain * wrap_angle(want - robot.pose.theta);
      const double lo = std::max(-cfg.max_angular, robot.omega - cfg.max_angular_accel * T);
      const double hi = std::min(cfg.max_angular, robot.omega + cfg.max_angular_accel * T);
      c.omega = lo <= hi ? std::clamp(w, lo, hi) : std::clamp(w, -cfg.max_angular, cfg.max_angular);
      break;
    }
  }
  return c;
}

std::vector<Pose2> rollout(const RobotState& robot, const RobotConfig& cfg,
                           const VelocityCommand& cmd, const DwaParams& params) {
  const int steps = std::max(1, static_cast<int>(std::lround(params.horizon / params.sim_step)));
  std::vector<Pose2> out;
  out.reserve(static_cast<std::size_t>(steps));
  RobotState r = robot;
  for (int k = 0; k < steps; ++k) {
    r = kinematics_step(r, cmd, cfg, params.sim_step);
    out.push_back(r.pose);
  }
  return out;
}

DwaSample evaluate_sample(const RobotState& robot, const RobotConfig& cfg,
                          const VelocityCommand& cmd, const Path& path, const DwaScene& scene,
                          const DwaParams& params, const ControllerOverrides& overrides) {
  DwaSample s;
  s.cmd = cmd;
  const auto poses = rollout(robot, cfg, cmd, params);
  const double fp = cfg.footprint_radius;
  double clearance = std::numeric_limits<double>::infinity();
  double social = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poses.size(); ++k) {
    const Vec2 p = poses[k].position();
    const double t = static_cast<double>(k + 1) * params.sim_step;
    if (scene.distance) {
      const bool inside = p.x() >= 0.0 && p.y() >= 0.0 &&
                          p.x() < scene.distance->width() * scene.distance->resolution() &&
                          p.y() < scene.distance->height() * scene.distance->resolution();
      const double c = inside ? static_clearance(*scene.distance, p) - fp : -1.0;
      clearance = std::min(clearance, c);
    }
    for (const auto& o : scene.obstacles) {
      const Vec2 q = o.position + o.velocity * t;
      social = std::min(social, (p - q).norm() - fp - o.radius);
    }
  }
  clearance = std::min(clearance, social);
  s.min_clearance = clearance;
  s.social_clearance = social;
  s.collides = clearance < 0.0;
  if (s.collides) return s;

  const Pose2& end = poses.back();
  const double path_term =
      1.0 - std::min(polyline_distance(path, end.position()), params.path_cap) / params.path_cap;
  double heading_term = 1.0;
  if (!path.poses.empty()) {
    const Vec2 to = path.poses.back().position() - end.position();
    if (to.norm() > 1e-6) {
      heading_term = 1.0 - std::abs(wrap_angle(std::atan2(to.y(), to.x()) - end.theta)) / kPi;
    }
  }
  // Walls only constrain; the soft term keeps distance from pedestrians.
  const double clear_term = std::min(social, params.clearance_cap) / params.clearance_cap;
  const double vmax = effective_max_speed(cfg, params, overrides);
  const double speed_term = cmd.vx / vmax;
  s.score = params.path_weight * path_term + params.heading_weight * heading_term +
            params.clearance_weight * overrides.clearance_weight_factor * clear_term +
            params.speed_weight * speed_term;
  return s;
}

DwaResult dwa_control(const RobotState& robot, const RobotConfig& cfg, const Path& path,
                      const DwaScene& scene, const DwaParams& params,
                      const ControllerOverrides& overrides) {
  DwaResult best;
  best.stopped = true;
  best.score = -std::numeric_limits<double>::infinity();
  const DynamicWindow w = dynamic_window(robot, cfg, params, overrides);
  bool spaced = false;
  for (int i = 0; i < params.linear_samples; ++i) {
    const double a = sample_value(w.a_lo, w.a_hi, params.linear_samples, i);
    for (int j = 0; j < params.angular_samples; ++j) {
      const double b = sample_value(w.b_lo, w.b_hi, params.angular_samples, j);
      const VelocityCommand cmd = command_at(robot, cfg, path, params, a, b);
      const DwaSample s = evaluate_sample(robot, cfg, cmd, path, scene, params, overrides);
      if (s.collides) continue;
      const bool ok = s.social_clearance >= overrides.personal_space;
      if (spaced && !ok) continue;
      if (ok == spaced && !(s.score > best.score)) continue;
      spaced = ok;
      best.cmd = s.cmd;
      best.score = s.score;
      best.stopped = false;
      best.best_a = i;
      best.best_b = j;
    }
  }
  if (best.stopped) {
    best.cmd = VelocityCommand{};
    if (cfg.kinematics == Kinematics::Ackermann) best.cmd.steering = robot.steering;
    best.score = 0.0;
  }
  return best;
}

}  // namespace socnav
