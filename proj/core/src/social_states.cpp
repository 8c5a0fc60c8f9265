#include "socnav/social_states.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace socnav {

void SocialStateParams::validate() const {
  auto fail = [](const char* f, const char* m) { throw ConfigError("", 0, f, m); };
  if (!(walking_speed.lo >= 0.0 && walking_speed.hi >= walking_speed.lo)) {
    fail("social.walking_speed", "need 0 <= lo <= hi");
  }
  if (!(avoid_radius > 0.0)) fail("social.avoid_radius", "must be > 0");
  if (!(interest_radius > 0.0)) fail("social.interest_radius", "must be > 0");
  if (!(approach_radius > 0.0)) fail("social.approach_radius", "must be > 0");
  if (!(interest_rate >= 0.0)) fail("social.interest_rate", "must be >= 0");
  if (!(dwell.lo >= 0.0 && dwell.hi >= dwell.lo)) fail("social.dwell", "need 0 <= lo <= hi");
  if (!(avoid_speed_factor >= 0.0)) fail("social.avoid_speed_factor", "must be >= 0");
  if (!(standoff >= 0.0)) fail("social.standoff", "must be >= 0");
  if (!(gather_radius >= 0.0)) fail("social.gather_radius", "must be >= 0");
  if (!(arrival_time > 0.0)) fail("social.arrival_time", "must be > 0");
}

bool is_stationary(SocialState s) {
  return s == SocialState::Standing || s == SocialState::Texting ||
         s == SocialState::PhoneTalking || s == SocialState::GroupTalking;
}

Perception perceive(const AgentState& agent, std::span<const AgentState> agents,
                    std::span<const RobotState> robots,
                    const SocialStateParams& params) {
  Perception p;
  auto closing = [&](const Vec2& pos, const Vec2& vel) {
    const Vec2 rel = agent.position - pos;
    const double d = rel.norm();
    if (d < 1e-9 || d > params.approach_radius) return false;
    return (vel - agent.velocity).dot(rel / d) > params.approach_speed;
  };
  for (const auto& r : robots) {
    const double d = (r.pose.position() - agent.position).norm();
    if (d < p.nearest_robot_distance) {
      p.nearest_robot_distance = d;
      p.nearest_robot = r.pose.position();
    }
    if (closing(r.pose.position(), r.world_velocity())) p.approaching_object = true;
  }
  for (const auto& o : agents) {
    if (o.id == agent.id) continue;
    const double d = (o.position - agent.position).norm();
    p.nearest_agent_distance = std::min(p.nearest_agent_distance, d);
    if (closing(o.position, o.velocity)) p.approaching_object = true;
    if (agent.group_id && o.group_id == agent.group_id && d <= params.approach_radius) {
      ++p.group_members_in_range;
    }
  }
  return p;
}

SocialState transition(SocialState state, const Perception& perception,
                       Rng& rng, double dwell_elapsed, double dwell, double dt,
                       const SocialStateParams& params) {
  const double rd = perception.nearest_robot_distance;
  switch (state) {
    case SocialState::Standing:
      return perception.approaching_object ? SocialState::Walking : state;
    case SocialState::Walking:
    case SocialState::Running:
      if (rd < params.interest_radius &&
          rng.bernoulli(1.0 - std::exp(-params.interest_rate * dt))) {
        return SocialState::InterestedInRobot;
      }
      if (rd < params.avoid_radius) return SocialState::RobotAvoidance;
      return state;
    case SocialState::RobotAvoidance:
      return rd >= params.avoid_radius ? SocialState::Walking : state;
    case SocialState::InterestedInRobot:
      return rd > params.interest_radius || dwell_elapsed > dwell ? SocialState::Walking
                                                                  : state;
    case SocialState::Texting:
    case SocialState::PhoneTalking:
    case SocialState::GroupTalking:
      return dwell_elapsed > dwell ? SocialState::Walking : state;
  }
  return state;
}

namespace {

double arrival_speed(double base, double distance, const SocialStateParams& p) {
  return std::min(base, std::max(0.0, distance) / p.arrival_time);
}

}  // namespace

void apply_state(AgentState& agent, bool entered, const Perception& perception,
                 std::span<const AgentState> group, Rng& rng,
                 const SocialStateParams& params) {
  if (entered) {
    agent.state_elapsed = 0.0;
    agent.state_dwell = 0.0;
  }
  agent.avoid_robot = false;
  agent.waypoint_override.reset();
  switch (agent.social_state) {
    case SocialState::Standing:
      agent.desired_speed = 0.0;
      break;
    case SocialState::Texting:
    case SocialState::PhoneTalking:
      if (entered) agent.state_dwell = rng.uniform(params.dwell.lo, params.dwell.hi);
      agent.desired_speed = 0.0;
      break;
    case SocialState::GroupTalking: {
      if (entered) agent.state_dwell = rng.uniform(params.dwell.lo, params.dwell.hi);
      Vec2 c = agent.position;
      if (!group.empty()) {
        c = Vec2::Zero();
        for (const auto& m : group) c += m.position;
        c /= static_cast<double>(group.size());
      }
      agent.waypoint_override = c;
      const double d = (c - agent.position).norm();
      agent.desired_speed = arrival_speed(agent.base_speed, d - params.gather_radius, params);
      break;
    }
    case SocialState::Walking:
    case SocialState::Running:
      if (entered) {
        agent.base_speed = rng.uniform(params.walking_speed.lo, params.walking_speed.hi);
        agent.social_state = agent.base_speed >= params.running_threshold
                                 ? SocialState::Running
                                 : SocialState::Walking;
      }
      agent.desired_speed = agent.base_speed;
      break;
    case SocialState::RobotAvoidance:
      agent.desired_speed = params.avoid_speed_factor * agent.base_speed;
      agent.avoid_robot = true;
      break;
    case SocialState::InterestedInRobot:
      if (entered) agent.state_dwell = rng.uniform(params.dwell.lo, params.dwell.hi);
      if (perception.nearest_robot) {
        const Vec2 to = *perception.nearest_robot - agent.position;
        const double d = to.norm();
        const Vec2 spot = d > 1e-9 ? Vec2(*perception.nearest_robot - params.standoff * to / d)
                                   : agent.position;
        agent.waypoint_override = spot;
        agent.desired_speed =
            arrival_speed(agent.base_speed, (spot - agent.position).norm(), params);
      } else {
        agent.desired_speed = 0.0;
      }
      break;
  }
}

void update_social_states(WorldState& world, Rng& rng,
                          const SocialStateParams& params) {
  // Perceive on the tick's snapshot so update order does not matter.
  const std::vector<AgentState> snapshot = world.agents;
  std::map<int, std::vector<AgentState>> groups;
  for (const auto& a : snapshot) {
    if (a.group_id) groups[*a.group_id].push_back(a);
  }
  static const std::vector<AgentState> kNoGroup;
  for (auto& a : world.agents) {
    const Perception p = perceive(a, snapshot, world.robots, params);
    const SocialState prev = a.social_state;
    const SocialState next =
        transition(prev, p, rng, a.state_elapsed, a.state_dwell, world.dt, params);
    const bool walking_family = [](SocialState s) {
      return s == SocialState::Walking || s == SocialState::Running;
    }(next);
    const bool was_walking =
        prev == SocialState::Walking || prev == SocialState::Running;
    // Leaving avoidance or interest resumes the previous walk speed.
    const bool resumes = prev == SocialState::RobotAvoidance ||
                         prev == SocialState::InterestedInRobot;
    const bool entered = next != prev && !(walking_family && (was_walking || resumes));
    a.social_state = next;
    if (next != prev) a.state_elapsed = 0.0;
    const auto& group = a.group_id ? groups[*a.group_id] : kNoGroup;
    apply_state(a, entered, p, group, rng, params);
    a.state_elapsed += world.dt;
  }
}

}  // namespace socnav
