#include <socnav/dwa.hpp>
#include <socnav/errors.hpp>
#include <socnav/global_planner.hpp>
#include <socnav/interplanner.hpp>
#include <socnav/robot.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <queue>

using namespace socnav;

namespace {

PlanningGrid open_grid(int w, int h, double res = 0.25) {
  return PlanningGrid(w, h, res, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 0));
}

// Plain Dijkstra with the same move set and corner rule.
std::int64_t dijkstra(const PlanningGrid& g, CellIndex s, CellIndex t) {
  const int w = g.width(), h = g.height();
  std::vector<std::int64_t> dist(static_cast<std::size_t>(w) * h,
                                 std::numeric_limits<std::int64_t>::max());
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s.y * w + s.x] = 0;
  pq.push({0, s.y * w + s.x});
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    if (d != dist[i]) continue;
    const int x = i % w, y = i / w;
    if (x == t.x && y == t.y) return d;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        const int nx = x + dx, ny = y + dy;
        if (g.blocked(nx, ny)) continue;
        if (dx && dy && (g.blocked(x + dx, y) || g.blocked(x, y + dy))) continue;
        const std::int64_t nd = d + (dx && dy ? kDiagonalCost : kStraightCost);
        if (nd < dist[ny * w + nx]) {
          dist[ny * w + nx] = nd;
          pq.push({nd, ny * w + nx});
        }
      }
    }
  }
  return -1;
}

Path straight_path(Vec2 a, Vec2 b, double spacing = 0.25) {
  return resample({a, b}, spacing, PathSource::Global);
}

GridMap walled_room(int w, int h, double res) {
  GridMap m(w, h, res);
  for (int x = 0; x < w; ++x) {
    m.set(x, 0, CellTag::Wall);
    m.set(x, h - 1, CellTag::Wall);
  }
  for (int y = 0; y < h; ++y) {
    m.set(0, y, CellTag::Wall);
    m.set(w - 1, y, CellTag::Wall);
  }
  return m;
}

RobotState robot_at(Pose2 p, double vx = 0.0) {
  RobotState r;
  r.pose = p;
  r.vx = vx;
  return r;
}

}  // namespace

TEST(GlobalPlanner, StraightLineInOpenGrid) {
  const auto g = open_grid(40, 40);
  const Path p = plan_global(g, {1.0, 1.0}, {8.0, 1.0});
  ASSERT_FALSE(p.empty());
  EXPECT_EQ(p.poses.front().position(), Vec2(1.0, 1.0));
  EXPECT_EQ(p.poses.back().position(), Vec2(8.0, 1.0));
  EXPECT_NEAR(p.length(), 7.0, 1e-9);
  for (const auto& q : p.poses) EXPECT_NEAR(q.y, 1.0, 1e-9);
}

TEST(GlobalPlanner, EnclosedGoalThrowsNoPath) {
  std::vector<std::uint8_t> b(30 * 30, 0);
  for (int i = 10; i <= 20; ++i) {
    b[10 * 30 + i] = b[20 * 30 + i] = b[i * 30 + 10] = b[i * 30 + 20] = 1;
  }
  const PlanningGrid g(30, 30, 0.25, b);
  EXPECT_THROW(astar(g, {2, 2}, {15, 15}), NoPath);
  EXPECT_THROW(plan_global(g, {0.5, 0.5}, {3.9, 3.9}), NoPath);
}

TEST(GlobalPlanner, AstarMatchesDijkstra_Property) {
  Rng rng(21);
  int solved = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<std::uint8_t> b(400);
    for (auto& c : b) c = rng.bernoulli(0.3);
    b[0] = 0;
    b[399] = 0;
    const PlanningGrid g(20, 20, 0.25, b);
    const std::int64_t want = dijkstra(g, {0, 0}, {19, 19});
    if (want < 0) {
      EXPECT_THROW(astar(g, {0, 0}, {19, 19}), NoPath);
      continue;
    }
    const GridPath got = astar(g, {0, 0}, {19, 19});
    EXPECT_EQ(got.cost, want) << "map " << k;
    ASSERT_FALSE(got.cells.empty());
    EXPECT_EQ(got.cells.front(), (CellIndex{0, 0}));
    EXPECT_EQ(got.cells.back(), (CellIndex{19, 19}));
    for (const auto& c : got.cells) EXPECT_FALSE(g.blocked(c.x, c.y));
    ++solved;
  }
  EXPECT_GT(solved, 20);
}

TEST(Interplanner, SubsampleStartsNearRobotAndCuts) {
  const Path global = straight_path({0, 0}, {10, 0});
  const Path local = subsample(global, {3.1, 0.2, 0.0}, 3.0);
  ASSERT_FALSE(local.empty());
  EXPECT_EQ(local.source, PathSource::Intermediate);
  EXPECT_NEAR(local.poses.front().x, 3.0, 1e-9);
  EXPECT_NEAR(local.poses.back().x, 6.0, 1e-9);
}

TEST(Interplanner, NoTriggerNoOverrides) {
  const Path global = straight_path({0, 0}, {10, 0});
  LocalContext ctx;
  ctx.robot = {1, 0, 0};
  ctx.obstacles = {{{9, 0}, Vec2::Zero(), 0.3}};
  InterplannerParams params;
  for (auto m : {BehaviorMode::Neutral, BehaviorMode::Aggressive, BehaviorMode::Polite,
                 BehaviorMode::Sideways}) {
    const auto r = intermediate_plan(global, ctx, m, params);
    EXPECT_FALSE(r.triggered);
    EXPECT_EQ(r.overrides, ControllerOverrides{});
    EXPECT_EQ(r.path.poses.size(), subsample(global, ctx.robot, params.window).poses.size());
  }
}

TEST(Interplanner, PoliteSlowsDownNearPedestrian) {
  const Path global = straight_path({0, 0}, {10, 0});
  LocalContext ctx;
  ctx.robot = {1, 0, 0};
  ctx.obstacles = {{{2.5, 0}, Vec2::Zero(), 0.3}};
  InterplannerParams params;
  const auto r = intermediate_plan(global, ctx, BehaviorMode::Polite, params);
  EXPECT_TRUE(r.triggered);
  EXPECT_DOUBLE_EQ(r.overrides.speed_factor, 0.5);
  EXPECT_DOUBLE_EQ(r.overrides.clearance_weight_factor, params.polite_clearance_weight);
  const auto a = intermediate_plan(global, ctx, BehaviorMode::Aggressive, params);
  EXPECT_DOUBLE_EQ(a.overrides.speed_factor, params.aggressive_speed);
  const auto n = intermediate_plan(global, ctx, BehaviorMode::Neutral, params);
  EXPECT_TRUE(n.triggered);
  EXPECT_EQ(n.overrides, ControllerOverrides{});
}

TEST(Interplanner, TriggerBoundary) {
  const Path global = straight_path({0, 0}, {10, 0});
  InterplannerParams params;
  LocalContext ctx;
  ctx.robot = {0, 0, 0};
  const double eps = 1e-9;
  ctx.obstacles = {{{params.trigger_distance - eps, 0}, Vec2::Zero(), 0.3}};
  EXPECT_TRUE(intermediate_plan(global, ctx, BehaviorMode::Polite, params).triggered);
  ctx.obstacles = {{{params.trigger_distance + eps, 0}, Vec2::Zero(), 0.3}};
  EXPECT_FALSE(intermediate_plan(global, ctx, BehaviorMode::Polite, params).triggered);
}

TEST(Interplanner, SidewaysOffsetsInOpenSpace) {
  const Path global = straight_path({0, 5}, {10, 5});
  const GridMap map = walled_room(40, 40, 0.25);
  const DistanceMap dmap = distance_transform(map);
  const PlanningGrid g = PlanningGrid::inflate(map, dmap, 0.3);
  LocalContext ctx;
  ctx.grid = &g;
  ctx.distance = &dmap;
  ctx.robot = {1, 5, 0};
  ctx.obstacles = {{{3.0, 5.0}, {-1.0, 0.0}, 0.3}};
  const auto r = intermediate_plan(global, ctx, BehaviorMode::Sideways, InterplannerParams{});
  EXPECT_TRUE(r.triggered);
  EXPECT_FALSE(r.fallback);
  double max_off = 0.0;
  for (const auto& p : r.path.poses) max_off = std::max(max_off, std::abs(p.y - 5.0));
  EXPECT_NEAR(max_off, InterplannerParams{}.sideways_offset, 1e-6);
}

TEST(Interplanner, SidewaysFallsBackInNarrowCorridor) {
  // 1 m wide corridor along x: no room for a 0.8 m offset.
  GridMap map(80, 40, 0.25);
  for (int x = 0; x < 80; ++x) {
    for (int y = 0; y < 40; ++y) {
      if (y < 18 || y > 21) map.set(x, y, CellTag::Wall);
    }
  }
  const DistanceMap dmap = distance_transform(map);
  const PlanningGrid g = PlanningGrid::inflate(map, dmap, 0.2);
  const Path global = straight_path({1, 5}, {18, 5});
  LocalContext ctx;
  ctx.grid = &g;
  ctx.distance = &dmap;
  ctx.footprint_radius = 0.2;
  ctx.robot = {2, 5, 0};
  ctx.obstacles = {{{4.0, 5.0}, {-1.0, 0.0}, 0.3}};
  const auto r = intermediate_plan(global, ctx, BehaviorMode::Sideways, InterplannerParams{});
  EXPECT_TRUE(r.triggered);
  EXPECT_TRUE(r.fallback);
  EXPECT_EQ(r.overrides, ControllerOverrides{});
  const Path neutral = subsample(global, ctx.robot, InterplannerParams{}.window);
  ASSERT_EQ(r.path.poses.size(), neutral.poses.size());
  for (std::size_t i = 0; i < neutral.poses.size(); ++i) {
    EXPECT_EQ(r.path.poses[i].position(), neutral.poses[i].position());
  }
}

TEST(Interplanner, RegistryHasBuiltins) {
  const auto& reg = InterplannerRegistry::global();
  for (const char* n : {"neutral", "aggressive", "polite", "sideways"}) {
    EXPECT_TRUE(reg.contains(n)) << n;
    EXPECT_EQ(reg.get(n)->name(), n);
  }
  EXPECT_THROW(reg.get("reckless"), ConfigError);
}

TEST(Dwa, OpenSpaceDrivesForward) {
  const GridMap map = walled_room(80, 80, 0.25);
  const DistanceMap dmap = distance_transform(map);
  const RobotConfig cfg = builtin_robot("jackal");
  const Path path = straight_path({5, 10}, {15, 10});
  DwaScene scene{&dmap, {}};
  RobotState r = robot_at({5, 10, 0}, 0.5);
  const auto res = dwa_control(r, cfg, path, scene, DwaParams{});
  EXPECT_FALSE(res.stopped);
  EXPECT_GT(res.cmd.vx, 0.0);
  EXPECT_LT(std::abs(res.cmd.omega), 0.1);
}

TEST(Dwa, StopsBeforeWallAhead) {
  const GridMap map = walled_room(40, 40, 0.1);
  const DistanceMap dmap = distance_transform(map);
  const RobotConfig cfg = builtin_robot("jackal");
  // Wall face at x = 3.9; body edge 0.2 m short of it, moving at full speed.
  const double x = 3.9 - 0.2 - cfg.footprint_radius;
  const Path path = straight_path({x, 2}, {3.8, 2});
  DwaScene scene{&dmap, {}};
  const auto res = dwa_control(robot_at({x, 2, 0}, cfg.max_linear), cfg, path, scene, DwaParams{});
  EXPECT_TRUE(res.stopped);
  EXPECT_EQ(res.cmd, VelocityCommand{});
}

TEST(Dwa, ChoosesBestSampleOfWindow) {
  const GridMap map = walled_room(80, 80, 0.25);
  const DistanceMap dmap = distance_transform(map);
  const RobotConfig cfg = builtin_robot("jackal");
  const Path path = resample({{5, 10}, {8, 11}, {12, 14}}, 0.25, PathSource::Global);
  DwaScene scene{&dmap, {{{7, 10.5}, {-0.5, 0}, 0.3}, {{9, 12}, {0, -0.3}, 0.3}}};
  const DwaParams params;
  Rng rng(4);
  int moving = 0;
  for (int k = 0; k < 20; ++k) {
    RobotState r = robot_at({5, 10, rng.uniform(-0.5, 1.0)}, rng.uniform(0, 1));
    r.omega = rng.uniform(-1, 1);
    const auto res = dwa_control(r, cfg, path, scene, params);
    const DynamicWindow w = dynamic_window(r, cfg, params, {});
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < params.linear_samples; ++i) {
      for (int j = 0; j < params.angular_samples; ++j) {
        const double a = params.linear_samples > 1
                             ? w.a_lo + (w.a_hi - w.a_lo) * i / (params.linear_samples - 1)
                             : w.a_lo;
        const double b = params.angular_samples > 1
                             ? w.b_lo + (w.b_hi - w.b_lo) * j / (params.angular_samples - 1)
                             : w.b_lo;
        const auto s = evaluate_sample(r, cfg, command_at(r, cfg, path, params, a, b), path,
                                       scene, params, {});
        if (!s.collides) best = std::max(best, s.score);
      }
    }
    if (res.stopped) {
      EXPECT_EQ(best, -std::numeric_limits<double>::infinity());
      continue;
    }
    ++moving;
    EXPECT_NEAR(res.score, best, 1e-12);
    // A 4x finer grid can only do as well or slightly better.
    double fine = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const double a = w.a_lo + (w.a_hi - w.a_lo) * i / 40.0;
        const double b = w.b_lo + (w.b_hi - w.b_lo) * j / 40.0;
        const auto s = evaluate_sample(r, cfg, command_at(r, cfg, path, params, a, b), path,
                                       scene, params, {});
        if (!s.collides) fine = std::max(fine, s.score);
      }
    }
    EXPECT_GE(fine + 1e-12, res.score);
    EXPECT_LT(fine - res.score, 0.1);
  }
  EXPECT_GT(moving, 10);
}

TEST(Dwa, NeverEmitsCollidingCommand_Property) {
  const RobotConfig cfg = builtin_robot("jackal");
  const DwaParams params;
  Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    GridMap map = walled_room(60, 60, 0.25);
    for (int n = 0; n < 30; ++n) map.set(rng.uniform_int(1, 58), rng.uniform_int(1, 58), CellTag::Obstacle);
    const DistanceMap dmap = distance_transform(map);
    const Vec2 p(rng.uniform(2, 13), rng.uniform(2, 13));
    if (static_clearance(dmap, p) < cfg.footprint_radius + 0.05) continue;
    DwaScene scene{&dmap, {}};
    for (int n = 0; n < 4; ++n) {
      const Vec2 q(p.x() + rng.uniform(-3, 3), p.y() + rng.uniform(-3, 3));
      if ((q - p).norm() < 1.0) continue;
      scene.obstacles.push_back({q, {rng.uniform(-1, 1), rng.uniform(-1, 1)}, 0.3});
    }
    RobotState r = robot_at({p.x(), p.y(), rng.uniform(-kPi, kPi)}, rng.uniform(0, 1));
    const Path path = straight_path(p, Vec2(rng.uniform(2, 13), rng.uniform(2, 13)));
    const auto res = dwa_control(r, cfg, path, scene, params);
    if (res.stopped) continue;
    const auto s = evaluate_sample(r, cfg, res.cmd, path, scene, params, {});
    EXPECT_FALSE(s.collides) << "case " << k;
    EXPECT_GE(s.min_clearance, 0.0);
  }
}

TEST(Kinematics, DifferentialStraightStep) {
  const RobotConfig cfg = builtin_robot("jackal");
  const RobotState r = kinematics_step(robot_at({0, 0, 0}), {1.0, 0, 0, 0}, cfg, 0.1);
  EXPECT_NEAR(r.pose.x, 0.1, 1e-12);
  EXPECT_NEAR(r.pose.y, 0.0, 1e-12);
}

TEST(Kinematics, DifferentialRotatesInPlace) {
  RobotConfig cfg = builtin_robot("jackal");
  cfg.max_angular = 4.0;
  const RobotState r = kinematics_step(robot_at({1, 2, 0}), {0, 0, kPi, 0}, cfg, 1.0);
  EXPECT_NEAR(std::abs(r.pose.theta), kPi, 1e-12);
  EXPECT_NEAR(r.pose.x, 1.0, 1e-12);
  EXPECT_NEAR(r.pose.y, 2.0, 1e-12);
}

TEST(Kinematics, DifferentialArcIsExact) {
  const RobotConfig cfg = builtin_robot("jackal");
  RobotState r = robot_at({0, 0, 0});
  for (int k = 0; k < 100; ++k) r = kinematics_step(r, {1.0, 0, 0.5, 0}, cfg, 0.01);
  // R = 2 about (0, 2).
  EXPECT_NEAR((r.pose.position() - Vec2(0, 2)).norm(), 2.0, 1e-9);
  EXPECT_NEAR(r.pose.theta, 0.5, 1e-9);
}

TEST(Kinematics, AckermannTurningRadius) {
  const RobotConfig cfg = builtin_robot("cart");
  const double delta = 0.4;
  const double R = cfg.wheelbase / std::tan(delta);
  RobotState r = robot_at({0, 0, 0});
  r.kinematics = Kinematics::Ackermann;
  double max_err = 0.0;
  for (int k = 0; k < 500; ++k) {
    r = kinematics_step(r, {0.8, 0, 0, delta}, cfg, 0.01);
    max_err = std::max(max_err, std::abs((r.pose.position() - Vec2(0, R)).norm() - R));
  }
  EXPECT_LT(max_err, 0.01 * R);
}

TEST(Kinematics, HolonomicLateral) {
  const RobotConfig cfg = builtin_robot("holonomic");
  const RobotState r = kinematics_step(robot_at({0, 0, kPi / 2}), {0, 0.5, 0, 0}, cfg, 1.0);
  EXPECT_NEAR(r.pose.x, -0.5, 1e-12);
  EXPECT_NEAR(r.pose.y, 0.0, 1e-12);
}

TEST(Kinematics, ClampCommand) {
  const RobotConfig cfg = builtin_robot("jackal");
  const auto c = clamp_command({5.0, 1.0, -9.0, 0.3}, cfg);
  EXPECT_EQ(c.vx, cfg.max_linear);
  EXPECT_EQ(c.vy, 0.0);
  EXPECT_EQ(c.omega, -cfg.max_angular);
  const auto back = clamp_command({-5.0, 0, 0, 0}, cfg);
  EXPECT_EQ(back.vx, cfg.min_linear);
  const RobotConfig cart = builtin_robot("cart");
  EXPECT_EQ(clamp_command({0.5, 0, 0, 2.0}, cart).steering, cart.max_steering);
}

TEST(Kinematics, DynamicWindowRespectsAcceleration) {
  const RobotConfig cfg = builtin_robot("jackal");
  DwaParams params;
  RobotState r = robot_at({0, 0, 0}, 0.5);
  const auto w = dynamic_window(r, cfg, params, {});
  EXPECT_NEAR(w.a_hi, std::min(effective_max_speed(cfg, params, {}), 0.5 + cfg.max_linear_accel * 0.1), 1e-12);
  EXPECT_NEAR(w.a_lo, 0.5 - cfg.max_linear_accel * 0.1, 1e-12);
  ControllerOverrides slow;
  slow.speed_factor = 0.5;
  EXPECT_NEAR(effective_max_speed(cfg, params, slow), 0.5 * effective_max_speed(cfg, params, {}), 1e-12);
}
