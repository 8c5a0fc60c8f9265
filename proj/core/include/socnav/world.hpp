#pragma once

#include "socnav/geometry.hpp"
#include "socnav/grid_map.hpp"
#include "socnav/types.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socnav {

/// One pedestrian.
struct AgentState {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 spawn = Vec2::Zero();
  double radius = 0.3;
  /// Effective speed fed to the goal force this tick.
  double desired_speed = 1.3;
  /// Speed sampled when the agent last entered Walking/Running.
  double base_speed = 1.3;
  double heading = 0.0;

  std::vector<Vec2> waypoints;
  int waypoint_index = 0;
  bool cyclic = true;
  /// Final waypoint of a non-cyclic list reached; goal force only brakes.
  bool arrived = false;
  /// Set by social states that redirect the agent (robot standoff, group
  /// gathering). Takes precedence over the waypoint list.
  std::optional<Vec2> waypoint_override;

  std::optional<int> group_id;
  bool is_group_leader = false;

  SocialState social_state = SocialState::Walking;
  double state_elapsed = 0.0;
  double state_dwell = 0.0;
  /// Full repulsion from robots (RobotAvoidance).
  bool avoid_robot = false;

  PluginKind plugin = PluginKind::PySocial;
  std::string custom_plugin;

  std::optional<Vec2> current_waypoint() const {
    if (waypoints.empty()) return std::nullopt;
    return waypoints[static_cast<std::size_t>(waypoint_index)];
  }
  /// Point the goal force steers toward.
  Vec2 target() const {
    if (waypoint_override) return *waypoint_override;
    if (auto wp = current_waypoint()) return *wp;
    return position;
  }
};

struct RobotState {
  int id = 0;
  Pose2 pose;
  /// Body-frame linear velocity (vy is zero unless holonomic) and yaw rate.
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  double steering = 0.0;  // ackermann only
  Kinematics kinematics = Kinematics::Differential;
  double footprint_radius = 0.3;
  Vec2 goal = Vec2::Zero();

  /// World-frame linear velocity.
  Vec2 world_velocity() const {
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    return {c * vx - s * vy, s * vx + c * vy};
  }
};

struct StaticObstacle {
  enum class Shape { Circle, Rect };
  Shape shape = Shape::Circle;
  Vec2 center = Vec2::Zero();
  double radius = 0.3;        // circle
  Vec2 size = Vec2(0.5, 0.5);  // rect, axis-aligned

  /// Cells whose centers the footprint covers.
  void rasterize(GridMap& map, CellTag tag = CellTag::Obstacle) const;
  /// Conservative bounding radius.
  double bounding_radius() const {
    return shape == Shape::Circle ? radius : 0.5 * size.norm();
  }
};

struct WorldState {
  std::int64_t tick = 0;
  double dt = 0.1;
  std::vector<AgentState> agents;
  std::vector<RobotState> robots;
  std::shared_ptr<const GridMap> map;
  std::shared_ptr<const DistanceMap> distance;
  std::uint64_t rng_seed = 0;
  std::vector<StaticObstacle> static_obstacles;

  double time() const { return static_cast<double>(tick) * dt; }
};

struct StepParams {
  double max_speed = 2.0;
};

/// Semi-implicit Euler over all agents: v += f dt (clamped to max_speed),
/// x += v dt, moves clipped against occupied cells; advances the clock.
/// `forces` is indexed like world.agents. Throws NonFiniteForce.
void step_world(WorldState& world, std::span<const Vec2> forces,
                const StepParams& params = {});

/// Moves from `from` to `to` without ending in (or squeezing diagonally
/// through) an occupied cell. Blocked axes zero the matching velocity
/// component.
Vec2 clip_move(const GridMap& map, const Vec2& from, const Vec2& to,
               Vec2& velocity);

/// Advances the waypoint when within `tolerance`. Returns true if it moved.
bool advance_waypoint(AgentState& agent, double tolerance);

/// Copies each group leader's waypoint list and index onto its members.
/// Throws MissingLeader.
void sync_group_waypoints(std::span<AgentState> agents);

/// Picks one leader per group uniformly at random.
void assign_group_leaders(std::span<AgentState> agents, Rng& rng);

/// Hash of every agent and robot pose/velocity plus the clock.
std::uint64_t state_hash(const WorldState& world);

}  // namespace socnav
