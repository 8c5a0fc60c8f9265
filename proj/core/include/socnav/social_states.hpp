#pragma once

#include "socnav/geometry.hpp"
#include "socnav/types.hpp"
#include "socnav/world.hpp"

#include <optional>
#include <span>

namespace socnav {

struct SpeedRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct SocialStateParams {
  SpeedRange walking_speed{0.8, 2.0};
  double running_threshold = 1.8;
  double avoid_radius = 3.0;
  double interest_radius = 5.0;
  double interest_rate = 0.1;  // per second
  double approach_speed = 0.5;
  double approach_radius = 3.0;
  SpeedRange dwell{5.0, 20.0};
  double avoid_speed_factor = 0.5;
  double standoff = 1.0;
  double gather_radius = 0.6;
  /// Arrival slowdown time constant for redirected targets.
  double arrival_time = 2.0;

  void validate() const;
};

struct Perception {
  double nearest_robot_distance = std::numeric_limits<double>::infinity();
  double nearest_agent_distance = std::numeric_limits<double>::infinity();
  bool approaching_object = false;
  int group_members_in_range = 0;
  /// Position of the nearest robot, when any robot exists.
  std::optional<Vec2> nearest_robot;
};

Perception perceive(const AgentState& agent, std::span<const AgentState> agents,
                    std::span<const RobotState> robots,
                    const SocialStateParams& params);

/// Next state. Draws from `rng` only while a robot is within the interest
/// radius of a walking agent.
SocialState transition(SocialState state, const Perception& perception,
                       Rng& rng, double dwell_elapsed, double dwell,
                       double dt, const SocialStateParams& params);

/// Applies the state's effect on desired speed, target and robot
/// avoidance. `entered` marks the first tick in the state. Walking and
/// Running are resolved here from the sampled speed.
void apply_state(AgentState& agent, bool entered, const Perception& perception,
                 std::span<const AgentState> group, Rng& rng,
                 const SocialStateParams& params);

/// Runs perception, transition and apply_state for every agent.
void update_social_states(WorldState& world, Rng& rng,
                          const SocialStateParams& params);

/// True for Standing, Texting, PhoneTalking and GroupTalking.
bool is_stationary(SocialState s);

}  // namespace socnav
