#include "socnav/episode.hpp"

#include "socnav/dwa.hpp"
#include "socnav/errors.hpp"
#include "socnav/global_planner.hpp"
#include "socnav/interplanner.hpp"
#include "socnav/plugins.hpp"
#include "socnav/social_states.hpp"

#include <cmath>
#include <map>

namespace socnav {

namespace {

constexpr std::uint64_t kSimStream = 0x73696d;

struct PluginBinding {
  std::shared_ptr<const ForcePlugin> plugin;
  WaypointPolicy policy;
};

std::vector<AgentSample> sample_agents(const WorldState& w) {
  std::vector<AgentSample> out;
  out.reserve(w.agents.size());
  for (const auto& a : w.agents) {
    out.push_back({a.id, a.position.x(), a.position.y(), a.velocity.x(), a.velocity.y(),
                   a.heading, a.social_state});
  }
  return out;
}

}  // namespace

EpisodeTrace run_episode(const EpisodeSetup& setup, const StageSpec& stage,
                         const EpisodeSettings& settings) {
  const RobotConfig& cfg = settings.robot;
  const auto behavior = InterplannerRegistry::global().get(settings.planner);

  EpisodeTrace trace;
  TraceHeader& h = trace.header;
  h.stage = setup.stage;
  h.planner = settings.planner;
  h.robot = cfg.name;
  h.episode = setup.episode;
  h.seed = setup.seed;
  h.dt = stage.limits.dt;
  h.start = setup.start.position();
  h.goal = setup.goal;
  h.goal_tolerance = stage.limits.goal_tolerance;
  h.footprint_radius = cfg.footprint_radius;
  h.pedestrian_radius = stage.pedestrian_radius;
  h.timeout = stage.limits.timeout;
  h.config_hash = settings.config_hash;

  WorldState world = setup.world;
  world.dt = stage.limits.dt;
  Rng rng(mix_seed(setup.seed ^ mix_seed(kSimStream)));

  std::map<std::string, PluginBinding> plugins;
  for (const auto& a : world.agents) {
    const std::string name = agent_plugin_name(a);
    if (plugins.count(name)) continue;
    auto p = PluginRegistry::global().get(name);
    plugins[name] = {p, p->waypoint_policy()};
  }
  bool sync_groups = false;
  for (const auto& a : world.agents) {
    if (a.group_id && plugins[agent_plugin_name(a)].policy.sync_groups) sync_groups = true;
  }

  const PlanningGrid grid = PlanningGrid::inflate(*world.map, *world.distance, cfg.footprint_radius);
  SemanticCostmap semantics(*world.map);
  PluginContext ctx{stage.sfm, world.dt};
  StepParams step{stage.sfm.max_speed};
  CollisionMonitor monitor(stage.limits.collision_rearm);

  Path global;
  double last_plan = -std::numeric_limits<double>::infinity();
  const auto max_ticks = static_cast<std::int64_t>(std::llround(stage.limits.timeout / world.dt));
  std::vector<Vec2> forces(world.agents.size(), Vec2::Zero());

  for (std::int64_t k = 0;; ++k) {
    if (k >= max_ticks) {
      trace.end = EndReason::Timeout;
      break;
    }
    const double t = world.time();
    RobotState& robot = world.robots.front();
    const bool at_goal = (robot.pose.position() - setup.goal).norm() < stage.limits.goal_tolerance;

    update_social_states(world, rng, stage.social);
    for (auto& a : world.agents) {
      advance_waypoint(a, plugins[agent_plugin_name(a)].policy.tolerance);
    }
    if (sync_groups) sync_group_waypoints(world.agents);
    if (!world.agents.empty()) {
      const AgentsDataframe frame = capture_frame(world, stage.sfm.cutoff);
      for (const auto& [name, binding] : plugins) {
        const auto out = binding.plugin->compute(frame, ctx);
        for (std::size_t i = 0; i < world.agents.size(); ++i) {
          if (agent_plugin_name(world.agents[i]) == name) forces[i] = out[i].forces.total;
        }
      }
    }
    semantics.set_time(t);
    for (auto& f : publish_semantics(world, settings.observe)) semantics.update_layer(std::move(f));

    VelocityCommand cmd;
    std::uint8_t flags = 0;
    if (!at_goal) {
      if (global.empty() || t - last_plan >= stage.limits.replan_period - 1e-9) {
        try {
          global = plan_global(grid, robot.pose.position(), setup.goal);
        } catch (const NoPath&) {
          global = {};
        }
        last_plan = t;
      }
      if (global.empty()) {
        cmd.steering = robot.steering;
        flags |= kFlagStopped;
      } else {
        LocalContext local;
        local.grid = &grid;
        local.distance = world.distance.get();
        local.semantics = &semantics;
        local.obstacles = dynamic_obstacles(semantics, robot.pose.position(),
                                            settings.perception_radius, stage.pedestrian_radius);
        local.robot = robot.pose;
        local.footprint_radius = cfg.footprint_radius;
        const IntermediateResult inter = behavior->plan(global, local, settings.interplanner);
        if (inter.triggered) flags |= kFlagTriggered;
        if (inter.fallback) flags |= kFlagFallback;
        DwaScene scene{world.distance.get(), local.obstacles};
        const DwaResult res = dwa_control(robot, cfg, inter.path, scene, settings.dwa, inter.overrides);
        cmd = res.cmd;
        if (res.stopped) flags |= kFlagStopped;
      }
    }

    TraceTick tick;
    tick.time = t;
    tick.robot = robot.pose;
    tick.robot_vx = robot.vx;
    tick.robot_vy = robot.vy;
    tick.robot_omega = robot.omega;
    tick.command = cmd;
    tick.flags = flags;
    tick.agents = sample_agents(world);
    trace.ticks.push_back(std::move(tick));
    if (at_goal) {
      trace.end = EndReason::GoalReached;
      break;
    }

    step_world(world, forces, step);
    RobotState next = kinematics_step(robot, cmd, cfg, world.dt);
    Vec2 v = next.world_velocity();
    const Vec2 target = next.pose.position();
    const Vec2 moved = clip_move(*world.map, robot.pose.position(), target, v);
    if ((moved - target).norm() > 1e-12) {
      next.vx = 0.0;
      next.vy = 0.0;
    }
    next.pose.x = moved.x();
    next.pose.y = moved.y();
    robot = next;

    std::vector<CollisionMonitor::Contact> contacts;
    if (static_clearance(*world.distance, robot.pose.position()) < cfg.footprint_radius) {
      contacts.push_back({CollisionKind::Static, -1});
    }
    for (const auto& a : world.agents) {
      if ((a.position - robot.pose.position()).norm() < cfg.footprint_radius + a.radius) {
        contacts.push_back({CollisionKind::Pedestrian, a.id});
      }
    }
    for (const auto& e : monitor.update(world.time(), contacts)) trace.collisions.push_back(e);
    if (static_cast<int>(trace.collisions.size()) >= stage.limits.max_collisions) {
      trace.end = EndReason::CollisionAbort;
      break;
    }
  }
  return trace;
}

}  // namespace socnav
