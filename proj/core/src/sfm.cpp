#include "socnav/sfm.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>

namespace socnav {

namespace {

void require(bool ok, const char* field, const char* msg) {
  if (!ok) throw ConfigError("", 0, field, msg);
}

}  // namespace

void SfmParams::validate() const {
  require(relaxation_time > 0.0, "sfm.relaxation_time", "must be > 0");
  require(repulsion_strength >= 0.0, "sfm.repulsion_strength", "must be >= 0");
  require(repulsion_range > 0.0, "sfm.repulsion_range", "must be > 0");
  require(anisotropy >= 0.0, "sfm.anisotropy", "must be >= 0");
  require(cutoff > 0.0, "sfm.cutoff", "must be > 0");
  require(robot_body_repulsion >= 0.0, "sfm.robot_body_repulsion", "must be >= 0");
  require(border_strength >= 0.0, "sfm.border_strength", "must be >= 0");
  require(border_range > 0.0, "sfm.border_range", "must be > 0");
  require(group_gaze >= 0.0, "sfm.group_gaze", "must be >= 0");
  require(group_attraction >= 0.0, "sfm.group_attraction", "must be >= 0");
  require(group_repulsion >= 0.0, "sfm.group_repulsion", "must be >= 0");
  require(group_repulsion_range > 0.0, "sfm.group_repulsion_range", "must be > 0");
  require(vision_half_angle > 0.0 && vision_half_angle <= kPi,
          "sfm.vision_half_angle", "must be in (0, pi]");
  require(evacuation_factor >= 0.0, "sfm.evacuation_factor", "must be >= 0");
  require(bond_stiffness >= 0.0, "sfm.bond_stiffness", "must be >= 0");
  require(bond_rest_length >= 0.0, "sfm.bond_rest_length", "must be >= 0");
  require(spin_radius > 0.0, "sfm.spin_radius", "must be > 0");
  require(orca_horizon > 0.0, "sfm.orca_horizon", "must be > 0");
  require(max_speed > 0.0, "sfm.max_speed", "must be > 0");
}

Vec2 goal_force(const AgentState& agent, double relaxation_time) {
  const Vec2 to = agent.target() - agent.position;
  const Vec2 e = to.norm() > 1e-9 ? Vec2(to.normalized()) : Vec2::Zero();
  const double vd = agent.arrived && !agent.waypoint_override ? 0.0 : agent.desired_speed;
  return (vd * e - agent.velocity) / relaxation_time;
}

double anisotropy_weight(double cos_phi, double lambda) {
  return std::max(0.0, lambda + (1.0 - lambda) * 0.5 * (1.0 + cos_phi));
}

Vec2 repulsion_from(const Vec2& pos, const Vec2& vel, double radius,
                    const Vec2& source, double source_radius,
                    const SfmParams& params, double strength_scale) {
  Vec2 diff = pos - source;
  if (diff.x() == 0.0 && diff.y() == 0.0) diff = Vec2(1e-3, 0.0);
  const double dist = diff.norm();
  if (dist > params.cutoff) return Vec2::Zero();
  const Vec2 n = diff / dist;
  const double d = dist - (radius + source_radius);
  const double mag =
      strength_scale * params.repulsion_strength * std::exp(-d / params.repulsion_range);
  double w = 1.0;
  const double speed = vel.norm();
  if (speed > 1e-9) {
    const double cos_phi = (vel / speed).dot(-n);
    w = anisotropy_weight(cos_phi, params.anisotropy);
  }
  return mag * w * n;
}

Vec2 pedestrian_repulsion(const AgentState& i, const AgentState& j,
                          const SfmParams& params) {
  return repulsion_from(i.position, i.velocity, i.radius, j.position, j.radius,
                        params);
}

Vec2 border_force(double distance, const Vec2& gradient, const SfmParams& params) {
  if (!std::isfinite(distance)) return Vec2::Zero();
  return params.border_strength * std::exp(-distance / params.border_range) *
         gradient;
}

Vec2 border_repulsion(const AgentState& agent, const DistanceMap& dmap,
                      const SfmParams& params) {
  return border_force(dmap.interpolate(agent.position),
                      dmap.gradient(agent.position), params);
}

GroupForces group_forces(const AgentState& agent,
                         std::span<const AgentState> group,
                         const SfmParams& params) {
  GroupForces out;
  const std::size_t n = group.size();
  if (n <= 1) return out;
  Vec2 sum = Vec2::Zero();
  for (const auto& m : group) sum += m.position;
  const Vec2 centroid = sum / static_cast<double>(n);

  if (params.group_gaze != 0.0) {
    const double speed = agent.velocity.norm();
    const Vec2 others = (sum - agent.position) / static_cast<double>(n - 1);
    const Vec2 rel = others - agent.position;
    if (speed > 1e-9 && rel.norm() > 1e-9) {
      const double c = std::clamp((agent.velocity / speed).dot(rel.normalized()), -1.0, 1.0);
      const double alpha = std::max(0.0, std::acos(c) - params.vision_half_angle);
      out.gaze = -params.group_gaze * alpha * agent.velocity;
    }
  }
  if (params.group_attraction != 0.0) {
    const Vec2 to_c = centroid - agent.position;
    const double dist = to_c.norm();
    const double threshold = 0.5 * static_cast<double>(n - 1);
    if (dist > threshold) out.attraction = params.group_attraction * to_c / dist;
  }
  if (params.group_repulsion != 0.0) {
    Vec2 rep = Vec2::Zero();
    for (const auto& m : group) {
      if (m.id == agent.id) continue;
      Vec2 diff = agent.position - m.position;
      if (diff.norm() >= params.group_repulsion_range) continue;
      if (diff.x() == 0.0 && diff.y() == 0.0) diff = Vec2(1e-3, 0.0);
      rep += diff.normalized();
    }
    out.repulsion = params.group_repulsion * rep;
  }
  return out;
}

ForceBreakdown aggregate(ForceBreakdown c, int agent_id) {
  c.total = c.goal + c.ped_repulsion + c.border + c.group_gaze +
            c.group_attraction + c.group_repulsion + c.robot_repulsion +
            c.bonding;
  if (!is_finite(c.total)) throw NonFiniteForce(agent_id);
  return c;
}

}  // namespace socnav
