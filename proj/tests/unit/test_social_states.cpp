#include <socnav/plugins.hpp>
#include <socnav/social_states.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace socnav;

namespace {

AgentState agent(int id, Vec2 pos, Vec2 vel = Vec2::Zero()) {
  AgentState a;
  a.id = id;
  a.position = pos;
  a.spawn = pos;
  a.velocity = vel;
  return a;
}

RobotState robot_at(Vec2 p) {
  RobotState r;
  r.pose = {p.x(), p.y(), 0.0};
  return r;
}

}  // namespace

TEST(Transition, StandingMovesWhenApproached) {
  SocialStateParams params;
  Rng rng(1);
  Perception p;
  p.approaching_object = true;
  EXPECT_EQ(transition(SocialState::Standing, p, rng, 0, 0, 0.1, params), SocialState::Walking);
  p.approaching_object = false;
  EXPECT_EQ(transition(SocialState::Standing, p, rng, 0, 0, 0.1, params), SocialState::Standing);
}

TEST(Transition, FarRobotNoTrigger) {
  SocialStateParams params;
  Rng rng(1);
  Perception p;
  p.nearest_robot_distance = 100.0;
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(transition(SocialState::Walking, p, rng, 0, 0, 0.1, params), SocialState::Walking);
  }
}

TEST(Transition, DwellExpiry) {
  SocialStateParams params;
  Rng rng(1);
  Perception p;
  for (auto s : {SocialState::Texting, SocialState::PhoneTalking, SocialState::GroupTalking}) {
    EXPECT_EQ(transition(s, p, rng, 7.1, 7.0, 0.1, params), SocialState::Walking);
    EXPECT_EQ(transition(s, p, rng, 6.9, 7.0, 0.1, params), s);
  }
}

TEST(Transition, AvoidanceInsideRadius) {
  SocialStateParams params;
  params.interest_rate = 0.0;
  Rng rng(1);
  Perception p;
  p.nearest_robot_distance = 2.5;
  EXPECT_EQ(transition(SocialState::Walking, p, rng, 0, 0, 0.1, params),
            SocialState::RobotAvoidance);
  p.nearest_robot_distance = 3.5;
  EXPECT_EQ(transition(SocialState::RobotAvoidance, p, rng, 0, 0, 0.1, params),
            SocialState::Walking);
}

TEST(Transition, InterestRatePerSecond) {
  SocialStateParams params;
  Rng rng(77);
  Perception p;
  p.nearest_robot_distance = 4.0;
  const int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    hits += transition(SocialState::Walking, p, rng, 0, 0, 0.1, params) ==
            SocialState::InterestedInRobot;
  }
  const double expected = 1.0 - std::exp(-params.interest_rate * 0.1);
  const double sigma = std::sqrt(expected * (1 - expected) / n);
  EXPECT_NEAR(static_cast<double>(hits) / n, expected, 5 * sigma);
}

TEST(Transition, InterestEndsOnDwellOrDistance) {
  SocialStateParams params;
  Rng rng(1);
  Perception p;
  p.nearest_robot_distance = 2.0;
  EXPECT_EQ(transition(SocialState::InterestedInRobot, p, rng, 1.0, 10.0, 0.1, params),
            SocialState::InterestedInRobot);
  EXPECT_EQ(transition(SocialState::InterestedInRobot, p, rng, 11.0, 10.0, 0.1, params),
            SocialState::Walking);
  p.nearest_robot_distance = 6.0;
  EXPECT_EQ(transition(SocialState::InterestedInRobot, p, rng, 1.0, 10.0, 0.1, params),
            SocialState::Walking);
}

TEST(Transition, ClosedOverRandomInputs_Property) {
  SocialStateParams params;
  Rng rng(4);
  for (int i = 0; i < 100000; ++i) {
    Perception p;
    p.nearest_robot_distance = rng.uniform(0, 10);
    p.approaching_object = rng.bernoulli(0.5);
    const auto s = static_cast<SocialState>(rng.uniform_int(0, kSocialStateCount - 1));
    const auto next = transition(s, p, rng, rng.uniform(0, 30), rng.uniform(5, 20), 0.1, params);
    ASSERT_LT(static_cast<int>(next), kSocialStateCount);
  }
}

TEST(ApplyState, StationaryStatesZeroDesiredSpeed) {
  SocialStateParams params;
  Rng rng(1);
  for (auto s : {SocialState::Standing, SocialState::Texting, SocialState::PhoneTalking}) {
    AgentState a = agent(0, {0, 0}, {1.0, 0.0});
    a.waypoints = {{10, 0}};
    a.social_state = s;
    apply_state(a, true, Perception{}, {}, rng, params);
    EXPECT_EQ(a.desired_speed, 0.0);
    const Vec2 f = goal_force(a, 0.5);
    EXPECT_EQ(f, -a.velocity / 0.5);
  }
}

TEST(ApplyState, DwellSampledInRange) {
  SocialStateParams params;
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    AgentState a = agent(0, {0, 0});
    a.social_state = SocialState::Texting;
    apply_state(a, true, Perception{}, {}, rng, params);
    ASSERT_GE(a.state_dwell, params.dwell.lo);
    ASSERT_LE(a.state_dwell, params.dwell.hi);
  }
}

TEST(ApplyState, InterestedStandoff) {
  SocialStateParams params;
  Rng rng(1);
  AgentState a = agent(0, {0, 0});
  a.social_state = SocialState::InterestedInRobot;
  const std::vector<RobotState> robots{robot_at({5, 0})};
  const Perception p = perceive(a, {}, robots, params);
  apply_state(a, true, p, {}, rng, params);
  ASSERT_TRUE(a.waypoint_override);
  EXPECT_NEAR(a.waypoint_override->x(), 4.0, 1e-12);
  EXPECT_NEAR(a.waypoint_override->y(), 0.0, 1e-12);
  EXPECT_EQ(a.target(), *a.waypoint_override);
}

TEST(ApplyState, AvoidanceHalvesSpeed) {
  SocialStateParams params;
  Rng rng(1);
  AgentState walk = agent(0, {0, 0});
  walk.base_speed = 1.4;
  walk.social_state = SocialState::Walking;
  AgentState avoid = walk;
  avoid.social_state = SocialState::RobotAvoidance;
  const std::vector<RobotState> robots{robot_at({2, 0})};
  const Perception p = perceive(walk, {}, robots, params);
  apply_state(walk, false, p, {}, rng, params);
  apply_state(avoid, false, p, {}, rng, params);
  EXPECT_DOUBLE_EQ(avoid.desired_speed, 0.5 * walk.desired_speed);
  EXPECT_TRUE(avoid.avoid_robot);
  EXPECT_FALSE(walk.avoid_robot);
}

TEST(ApplyState, AvoidanceRepelsRobotFully) {
  WorldState w;
  AgentState a = agent(0, {0, 0});
  w.agents = {a};
  w.robots = {robot_at({1.2, 0})};
  PluginContext ctx;
  const auto base = plugin_step(capture_frame(w, 5.0), PluginKind::PySocial, ctx);
  w.agents[0].avoid_robot = true;
  const auto avoid = plugin_step(capture_frame(w, 5.0), PluginKind::PySocial, ctx);
  const double full = repulsion_from(a.position, a.velocity, a.radius, {1.2, 0}, 0.3,
                                     ctx.params).norm();
  EXPECT_NEAR(avoid[0].forces.robot_repulsion.norm(), full, 1e-12);
  EXPECT_NEAR(base[0].forces.robot_repulsion.norm(), ctx.params.robot_body_repulsion * full,
              1e-12);
}

TEST(ApplyState, WalkingSpeedFromRange) {
  SocialStateParams params;
  Rng rng(12);
  int running = 0;
  for (int i = 0; i < 2000; ++i) {
    AgentState a = agent(0, {0, 0});
    a.social_state = SocialState::Walking;
    apply_state(a, true, Perception{}, {}, rng, params);
    ASSERT_GE(a.base_speed, params.walking_speed.lo);
    ASSERT_LE(a.base_speed, params.walking_speed.hi);
    ASSERT_EQ(a.social_state == SocialState::Running, a.base_speed >= params.running_threshold);
    running += a.social_state == SocialState::Running;
  }
  EXPECT_GT(running, 0);
}

TEST(ApplyState, GroupTalkingGathersAtCentroid) {
  SocialStateParams params;
  Rng rng(1);
  std::vector<AgentState> g{agent(0, {0, 0}), agent(1, {2, 0}), agent(2, {1, 3})};
  for (auto& a : g) a.group_id = 1;
  AgentState a = g[0];
  a.social_state = SocialState::GroupTalking;
  apply_state(a, true, Perception{}, g, rng, params);
  ASSERT_TRUE(a.waypoint_override);
  EXPECT_NEAR((*a.waypoint_override - Vec2(1, 1)).norm(), 0.0, 1e-12);
}

TEST(SocialStates, StationaryComesToRest_Property) {
  // Empty map, one agent walking at 1.3 m/s switches to each stationary state.
  for (auto s : {SocialState::Standing, SocialState::Texting, SocialState::PhoneTalking}) {
    WorldState w;
    w.dt = 0.1;
    AgentState a = agent(0, {10, 10}, {1.3, 0});
    a.waypoints = {{30, 10}};
    a.social_state = s;
    w.agents = {a};
    Rng rng(3);
    SocialStateParams params;
    PluginContext ctx;
    apply_state(w.agents[0], true, Perception{}, {}, rng, params);
    const int ticks = static_cast<int>(std::round(3 * ctx.params.relaxation_time / w.dt));
    for (int k = 0; k < ticks; ++k) {
      update_social_states(w, rng, params);
      const auto out = plugin_step(capture_frame(w, 5.0), PluginKind::PySocial, ctx);
      const Vec2 f = out[0].forces.total;
      step_world(w, std::span<const Vec2>(&f, 1));
    }
    EXPECT_EQ(w.agents[0].social_state, s);
    EXPECT_LT(w.agents[0].velocity.norm(), 0.05) << state_name(s);
  }
}

TEST(SocialStates, InterestedApproachIsMonotone_Property) {
  WorldState w;
  w.dt = 0.1;
  AgentState a = agent(0, {4, 10});
  a.base_speed = 1.2;
  a.social_state = SocialState::InterestedInRobot;
  w.agents = {a};
  w.robots = {robot_at({12, 10})};
  Rng rng(1);
  SocialStateParams params;
  PluginContext ctx;
  double prev = (w.agents[0].position - Vec2(12, 10)).norm();
  bool entered = true;
  bool approaching = true;
  for (int k = 0; k < 200; ++k) {
    AgentState& ag = w.agents[0];
    const Perception p = perceive(ag, w.agents, w.robots, params);
    apply_state(ag, entered, p, {}, rng, params);
    entered = false;
    const auto out = plugin_step(capture_frame(w, 5.0), PluginKind::PySocial, ctx);
    const Vec2 f = out[0].forces.total;
    step_world(w, std::span<const Vec2>(&f, 1));
    const double d = (w.agents[0].position - Vec2(12, 10)).norm();
    // Robot repulsion balances the approach a little short of the standoff,
    // and the agent settles there with some wobble.
    approaching &= prev > params.standoff + 0.3;
    if (approaching) {
      ASSERT_LE(d, prev + 1e-9) << "tick " << k;
    }
    prev = d;
  }
  EXPECT_LT(prev, params.standoff + 0.3);
  EXPECT_GT(prev, 0.6);
}

TEST(Perceive, DistancesAndClosingSpeed) {
  SocialStateParams params;
  AgentState a = agent(0, {0, 0});
  std::vector<AgentState> others{a, agent(1, {2, 0}, {-1.0, 0})};
  const std::vector<RobotState> robots{robot_at({0, 4})};
  const Perception p = perceive(a, others, robots, params);
  EXPECT_DOUBLE_EQ(p.nearest_agent_distance, 2.0);
  EXPECT_DOUBLE_EQ(p.nearest_robot_distance, 4.0);
  EXPECT_TRUE(p.approaching_object);
  others[1].velocity = Vec2(0.2, 0);
  EXPECT_FALSE(perceive(a, others, robots, params).approaching_object);
}
