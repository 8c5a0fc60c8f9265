#include <socnav/errors.hpp>
#include <socnav/plugins.hpp>
#include <socnav/world.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

using namespace socnav;

namespace {

AgentState walker(int id, Vec2 pos, std::vector<Vec2> wps = {}) {
  AgentState a;
  a.id = id;
  a.position = pos;
  a.spawn = pos;
  a.waypoints = std::move(wps);
  return a;
}

WorldState empty_world(double dt = 0.1) {
  WorldState w;
  w.dt = dt;
  return w;
}

}  // namespace

TEST(StepWorld, AtRestAtGoalStaysPut) {
  WorldState w = empty_world();
  w.agents.push_back(walker(0, {3.0, 4.0}, {{3.0, 4.0}}));
  for (int i = 0; i < 50; ++i) {
    const Vec2 f = goal_force(w.agents[0], 0.5);
    step_world(w, std::span<const Vec2>(&f, 1));
  }
  EXPECT_EQ(w.agents[0].position, Vec2(3.0, 4.0));
  EXPECT_EQ(w.agents[0].velocity, Vec2::Zero());
}

TEST(StepWorld, GoalRelaxationMatchesClosedForm) {
  WorldState w = empty_world(0.01);
  AgentState a = walker(0, {0.0, 0.0}, {{100.0, 0.0}});
  a.desired_speed = 1.3;
  w.agents.push_back(a);
  for (int i = 0; i < 100; ++i) {
    const Vec2 f = goal_force(w.agents[0], 0.5);
    step_world(w, std::span<const Vec2>(&f, 1));
  }
  const double expected = 1.3 * (1.0 - std::exp(-1.0 / 0.5));
  EXPECT_NEAR(expected, 1.124, 1e-3);
  EXPECT_NEAR(w.agents[0].velocity.norm() / expected, 1.0, 1e-2);
}

TEST(StepWorld, RelaxationWithinTolerance_Property) {
  // Every sample point along the curve, not just t = 1 s.
  WorldState w = empty_world(0.01);
  AgentState a = walker(0, {0.0, 0.0}, {{500.0, 0.0}});
  a.desired_speed = 1.3;
  w.agents.push_back(a);
  for (int i = 1; i <= 300; ++i) {
    const Vec2 f = goal_force(w.agents[0], 0.5);
    step_world(w, std::span<const Vec2>(&f, 1));
    if (i % 10 == 0) {
      const double t = i * 0.01;
      const double expected = 1.3 * (1.0 - std::exp(-t / 0.5));
      EXPECT_LT(std::abs(w.agents[0].velocity.x() - expected) / expected, 1e-2) << "t=" << t;
    }
  }
}

TEST(StepWorld, SpeedClampPreservesDirection) {
  WorldState w = empty_world(0.1);
  w.agents.push_back(walker(0, {10.0, 10.0}));
  // 3 m/s along (3,4)/5 after one step.
  const Vec2 f = Vec2(1.8, 2.4) / 0.1;
  step_world(w, std::span<const Vec2>(&f, 1));
  EXPECT_DOUBLE_EQ(w.agents[0].velocity.norm(), 2.0);
  EXPECT_NEAR(w.agents[0].velocity.x(), 1.2, 1e-12);
  EXPECT_NEAR(w.agents[0].velocity.y(), 1.6, 1e-12);
}

TEST(StepWorld, NonFiniteForceThrows) {
  WorldState w = empty_world();
  w.agents.push_back(walker(7, {1.0, 1.0}));
  const Vec2 f(std::numeric_limits<double>::quiet_NaN(), 0.0);
  try {
    step_world(w, std::span<const Vec2>(&f, 1));
    FAIL() << "expected NonFiniteForce";
  } catch (const NonFiniteForce& e) {
    EXPECT_EQ(e.agent_id, 7);
  }
  const Vec2 g(0.0, std::numeric_limits<double>::infinity());
  EXPECT_THROW(step_world(w, std::span<const Vec2>(&g, 1)), NonFiniteForce);
}

TEST(StepWorld, ClockAdvancesInMultiplesOfDt) {
  WorldState w = empty_world(0.1);
  for (int i = 0; i < 7; ++i) step_world(w, {});
  EXPECT_EQ(w.tick, 7);
  EXPECT_DOUBLE_EQ(w.time(), 7 * 0.1);
}

TEST(StepWorld, ZeroForceMotionIsLinear_Property) {
  WorldState w = empty_world(0.1);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    AgentState a = walker(i, {rng.uniform(0, 10), rng.uniform(0, 10)});
    a.velocity = Vec2(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4));
    w.agents.push_back(a);
  }
  const auto initial = w.agents;
  const std::vector<Vec2> zero(w.agents.size(), Vec2::Zero());
  for (int k = 1; k <= 200; ++k) {
    step_world(w, zero);
    for (std::size_t i = 0; i < w.agents.size(); ++i) {
      EXPECT_EQ(w.agents[i].velocity, initial[i].velocity);
      const Vec2 expect = initial[i].position + k * 0.1 * initial[i].velocity;
      EXPECT_NEAR((w.agents[i].position - expect).norm(), 0.0, 1e-9);
    }
  }
}

TEST(StepWorld, WallNonPenetration_Property) {
  auto map = std::make_shared<GridMap>(40, 40, 0.25);
  map->fill({0, 0, 39, 0}, CellTag::Wall);
  map->fill({0, 39, 39, 39}, CellTag::Wall);
  map->fill({0, 0, 0, 39}, CellTag::Wall);
  map->fill({39, 0, 39, 39}, CellTag::Wall);
  map->fill({18, 5, 21, 34}, CellTag::Wall);
  WorldState w = empty_world(0.1);
  w.map = map;
  Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    Vec2 p;
    do {
      p = Vec2(rng.uniform(0.3, 9.7), rng.uniform(0.3, 9.7));
    } while (map->occupied_at(p));
    w.agents.push_back(walker(i, p));
  }
  std::vector<Vec2> forces(w.agents.size());
  for (int k = 0; k < 400; ++k) {
    for (auto& f : forces) f = Vec2(rng.uniform(-30, 30), rng.uniform(-30, 30));
    step_world(w, forces);
    for (const auto& a : w.agents) {
      ASSERT_FALSE(map->occupied_at(a.position)) << "tick " << k << " agent " << a.id;
      ASSERT_LE(a.velocity.norm(), 2.0 + 1e-12);
    }
  }
}

TEST(StepWorld, DeterministicHash) {
  auto run = [] {
    WorldState w = empty_world(0.1);
    Rng rng(42);
    for (int i = 0; i < 12; ++i) {
      w.agents.push_back(walker(i, {rng.uniform(0, 20), rng.uniform(0, 20)},
                                {{rng.uniform(0, 20), rng.uniform(0, 20)},
                                 {rng.uniform(0, 20), rng.uniform(0, 20)}}));
    }
    PluginContext ctx;
    std::vector<std::uint64_t> hashes;
    for (int k = 0; k < 100; ++k) {
      const auto frame = capture_frame(w, ctx.params.cutoff);
      const auto out = plugin_step(frame, PluginKind::PySocial, ctx);
      std::vector<Vec2> f;
      for (const auto& o : out) f.push_back(o.forces.total);
      step_world(w, f);
      for (auto& a : w.agents) advance_waypoint(a, 1.0);
      hashes.push_back(state_hash(w));
    }
    return hashes;
  };
  EXPECT_EQ(run(), run());
}

TEST(AdvanceWaypoint, WithinToleranceAdvances) {
  AgentState a = walker(0, {0.1, 0.0}, {{0.0, 0.0}, {5.0, 0.0}});
  EXPECT_TRUE(advance_waypoint(a, 0.5));
  EXPECT_EQ(a.waypoint_index, 1);
}

TEST(AdvanceWaypoint, OutsideToleranceUnchanged) {
  AgentState a = walker(0, {0.6, 0.0}, {{0.0, 0.0}, {5.0, 0.0}});
  EXPECT_FALSE(advance_waypoint(a, 0.5));
  EXPECT_EQ(a.waypoint_index, 0);
}

TEST(AdvanceWaypoint, CyclicWraps) {
  AgentState a = walker(0, {5.0, 0.1}, {{0.0, 0.0}, {5.0, 0.0}});
  a.waypoint_index = 1;
  EXPECT_TRUE(advance_waypoint(a, 0.5));
  EXPECT_EQ(a.waypoint_index, 0);
}

TEST(AdvanceWaypoint, NonCyclicLastMarksArrived) {
  AgentState a = walker(0, {5.0, 0.0}, {{0.0, 0.0}, {5.0, 0.0}});
  a.cyclic = false;
  a.waypoint_index = 1;
  advance_waypoint(a, 0.5);
  EXPECT_EQ(a.waypoint_index, 1);
  EXPECT_TRUE(a.arrived);
}

TEST(AdvanceWaypoint, EmptyIsNoop) {
  AgentState a = walker(0, {0.0, 0.0});
  EXPECT_FALSE(advance_waypoint(a, 1.0));
  EXPECT_EQ(a.waypoint_index, 0);
}

TEST(AdvanceWaypoint, NoRetargetWithinCycle) {
  // Three waypoints spread out: sitting on the reached waypoint must not
  // bounce the index back.
  AgentState a = walker(0, {0.0, 0.0}, {{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}});
  advance_waypoint(a, 1.0);
  for (int i = 0; i < 10; ++i) advance_waypoint(a, 1.0);
  EXPECT_EQ(a.waypoint_index, 1);
}

TEST(SyncGroupWaypoints, MemberTakesLeaderWaypoint) {
  const Vec2 A(1.0, 1.0), B(9.0, 9.0);
  AgentState l = walker(0, {0, 0}, {A});
  l.group_id = 1;
  l.is_group_leader = true;
  AgentState m = walker(1, {0, 0}, {B});
  m.group_id = 1;
  std::vector<AgentState> v{l, m};
  sync_group_waypoints(v);
  EXPECT_EQ(*v[1].current_waypoint(), A);
  EXPECT_EQ(*v[0].current_waypoint(), A);
}

TEST(SyncGroupWaypoints, UngroupedUnchangedAndGroupsIndependent) {
  std::vector<AgentState> v;
  for (int g = 0; g < 2; ++g) {
    AgentState l = walker(2 * g, {0, 0}, {Vec2(g, g)});
    l.group_id = g;
    l.is_group_leader = true;
    AgentState m = walker(2 * g + 1, {0, 0}, {Vec2(50, 50)});
    m.group_id = g;
    v.push_back(l);
    v.push_back(m);
  }
  v.push_back(walker(9, {0, 0}, {Vec2(7, 7)}));
  sync_group_waypoints(v);
  EXPECT_EQ(*v[1].current_waypoint(), Vec2(0, 0));
  EXPECT_EQ(*v[3].current_waypoint(), Vec2(1, 1));
  EXPECT_EQ(*v[4].current_waypoint(), Vec2(7, 7));
}

TEST(SyncGroupWaypoints, MissingLeaderThrows) {
  AgentState m = walker(1, {0, 0}, {Vec2(1, 1)});
  m.group_id = 4;
  std::vector<AgentState> v{m};
  try {
    sync_group_waypoints(v);
    FAIL();
  } catch (const MissingLeader& e) {
    EXPECT_EQ(e.group_id, 4);
  }
}

TEST(AssignGroupLeaders, ExactlyOnePerGroup_Property) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    std::vector<AgentState> v;
    for (int i = 0; i < 12; ++i) {
      AgentState a = walker(i, {0, 0});
      if (i % 4 != 3) a.group_id = i % 3;
      v.push_back(a);
    }
    assign_group_leaders(v, rng);
    std::map<int, int> leaders;
    for (const auto& a : v) {
      if (!a.group_id) {
        EXPECT_FALSE(a.is_group_leader);
        continue;
      }
      leaders[*a.group_id] += a.is_group_leader ? 1 : 0;
    }
    for (const auto& [g, n] : leaders) EXPECT_EQ(n, 1) << "group " << g;
  }
}
