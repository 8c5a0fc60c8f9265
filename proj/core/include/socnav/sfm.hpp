#pragma once

#include "socnav/geometry.hpp"
#include "socnav/grid_map.hpp"
#include "socnav/world.hpp"

#include <span>
#include <utility>
#include <vector>

namespace socnav {

struct SfmParams {
  double relaxation_time = 0.5;  // tau
  // Pedestrian repulsion
  double repulsion_strength = 4.5;  // A
  double repulsion_range = 0.3;     // B
  double anisotropy = 2.0;          // lambda
  double cutoff = 5.0;
  /// Repulsion from robots relative to a pedestrian; RobotAvoidance uses 1.
  double robot_body_repulsion = 0.5;
  // Border repulsion
  double border_strength = 10.0;  // a_b
  double border_range = 0.2;      // b_b
  // Group terms
  double group_gaze = 4.0;        // beta1
  double group_attraction = 3.0;  // beta2
  double group_repulsion = 1.0;   // beta3
  double group_repulsion_range = 0.55;  // d0
  double vision_half_angle = kPi / 2.0;
  // Plugin constants
  double evacuation_factor = 3.0;
  Vec2 exit{0.0, 0.0};
  double bond_stiffness = 2.0;
  double bond_rest_length = 1.0;
  std::vector<std::pair<int, int>> bonds;  // empty: consecutive ids pair up
  double spin_radius = 2.0;
  double orca_horizon = 2.0;
  double max_speed = 2.0;

  /// Range checks; throws ConfigError naming the field.
  void validate() const;
};

/// Per-term forces for one agent. `total` is their sum.
struct ForceBreakdown {
  Vec2 goal = Vec2::Zero();
  Vec2 ped_repulsion = Vec2::Zero();
  Vec2 border = Vec2::Zero();
  Vec2 group_gaze = Vec2::Zero();
  Vec2 group_attraction = Vec2::Zero();
  Vec2 group_repulsion = Vec2::Zero();
  Vec2 robot_repulsion = Vec2::Zero();
  Vec2 bonding = Vec2::Zero();
  Vec2 total = Vec2::Zero();
};

struct GroupForces {
  Vec2 gaze = Vec2::Zero();
  Vec2 attraction = Vec2::Zero();
  Vec2 repulsion = Vec2::Zero();
};

/// (v_d e - v) / tau toward agent.target(); e is zero at the target and
/// v_d zero once a non-cyclic route is finished.
Vec2 goal_force(const AgentState& agent, double relaxation_time);

/// Anisotropy weight for the angle between i's motion and the direction
/// to j; clamped at zero.
double anisotropy_weight(double cos_phi, double lambda);

/// Exponential repulsion on a body at `pos` moving with `vel` from a source
/// disc, scaled by `strength_scale`. Zero beyond params.cutoff.
Vec2 repulsion_from(const Vec2& pos, const Vec2& vel, double radius,
                    const Vec2& source, double source_radius,
                    const SfmParams& params, double strength_scale = 1.0);

/// Force on i from j; directed from j to i.
Vec2 pedestrian_repulsion(const AgentState& i, const AgentState& j,
                          const SfmParams& params);

/// a_b exp(-d / b_b) along the distance gradient.
Vec2 border_force(double distance, const Vec2& gradient,
                  const SfmParams& params);
Vec2 border_repulsion(const AgentState& agent, const DistanceMap& dmap,
                      const SfmParams& params);

/// `group` holds every member including `agent` (matched by id).
GroupForces group_forces(const AgentState& agent,
                         std::span<const AgentState> group,
                         const SfmParams& params);

/// Fills `total`; throws NonFiniteForce(agent_id) on NaN or infinity.
ForceBreakdown aggregate(ForceBreakdown components, int agent_id);

}  // namespace socnav
