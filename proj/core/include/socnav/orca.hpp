#pragma once

#include "socnav/geometry.hpp"

#include <span>
#include <vector>

namespace socnav {

struct OrcaNeighbor {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.3;
  /// False for neighbors that will not react (robots, static bodies); the
  /// agent then takes full responsibility for avoiding them.
  bool reciprocal = true;
};

/// Half-plane of permitted velocities: left of `direction` through `point`.
struct OrcaLine {
  Vec2 point = Vec2::Zero();
  Vec2 direction = Vec2::UnitX();
};

struct OrcaAgent {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.3;
  Vec2 preferred = Vec2::Zero();
  double max_speed = 2.0;
};

/// One constraint per neighbor, in neighbor-id order.
std::vector<OrcaLine> orca_constraints(const OrcaAgent& agent,
                                       std::span<const OrcaNeighbor> neighbors,
                                       double horizon, double dt);

/// Velocity closest to agent.preferred within all half-planes and the
/// max-speed disc; when infeasible, minimizes the largest violation.
Vec2 orca_velocity(const OrcaAgent& agent,
                   std::span<const OrcaNeighbor> neighbors, double horizon,
                   double dt);

}  // namespace socnav
