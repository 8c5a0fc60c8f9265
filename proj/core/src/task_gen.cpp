#include "socnav/task_gen.hpp"

#include "socnav/errors.hpp"
#include "socnav/map_io.hpp"
#include "socnav/social_states.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace socnav {

namespace {

constexpr std::uint64_t kObstacleStream = 0x6f6273;
constexpr std::uint64_t kRobotStream = 0x726f62;
constexpr std::uint64_t kStateStream = 0x737474;

constexpr double kAutoZoneRadius = 1.0;
constexpr double kMinWaypointSpacing = 2.0;
constexpr double kMaxWaypointStep = 8.0;
constexpr double kGroupSpawnRadius = 1.5;
constexpr double kPedRobotClearance = 1.0;
constexpr int kStaticRetries = 20;

Rng stream(std::uint64_t seed, std::uint64_t tag) { return Rng(mix_seed(seed ^ mix_seed(tag))); }

bool in_zones(std::span<const Zone> zones, const Vec2& p, double margin) {
  return std::any_of(zones.begin(), zones.end(),
                     [&](const Zone& z) { return z.contains(p, margin); });
}

std::vector<CellIndex> free_cells(const PlanningGrid& g) {
  std::vector<CellIndex> out;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (!g.blocked(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

const CellIndex& pick(const std::vector<CellIndex>& cells, Rng& rng) {
  return cells[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cells.size()) - 1))];
}

int draw(const IntRange& r, Rng& rng) { return static_cast<int>(rng.uniform_int(r.lo, r.hi)); }

PluginKind bind_plugin(AgentState& a, const std::string& name) {
  if (auto k = plugin_from_name(name)) {
    a.plugin = *k;
    a.custom_plugin.clear();
  } else {
    a.plugin = PluginKind::Custom;
    a.custom_plugin = name;
  }
  return a.plugin;
}

struct Grids {
  std::shared_ptr<GridMap> map;
  std::shared_ptr<DistanceMap> distance;
};

Grids with_statics(const GridMap& base, const std::vector<StaticObstacle>& statics) {
  auto map = std::make_shared<GridMap>(base);
  for (const auto& s : statics) s.rasterize(*map);
  auto dmap = std::make_shared<DistanceMap>(distance_transform(*map));
  return {map, dmap};
}

bool reachable(const PlanningGrid& g, const Vec2& a, const Vec2& b) {
  const auto ca = g.cell_of(a), cb = g.cell_of(b);
  if (g.blocked(ca.x, ca.y) || g.blocked(cb.x, cb.y)) return false;
  std::vector<int> labels;
  label_components(g.width(), g.height(), [&](int x, int y) { return !g.blocked(x, y); }, labels);
  return labels[static_cast<std::size_t>(ca.y) * g.width() + ca.x] ==
         labels[static_cast<std::size_t>(cb.y) * g.width() + cb.x];
}

std::vector<StaticObstacle> place_statics(const ObstacleMode& mode, const GridMap& map,
                                          std::span<const Zone> forbidden, Rng& rng) {
  std::vector<StaticObstacle> shapes;
  const int n = draw(mode.static_obstacles, rng);
  for (int i = 0; i < n; ++i) {
    StaticObstacle s;
    s.radius = rng.uniform(mode.static_radius.lo, mode.static_radius.hi);
    shapes.push_back(s);
  }
  for (const auto& m : mode.models) {
    const int count = draw(m.count, rng);
    for (int i = 0; i < count; ++i) shapes.push_back(m.footprint);
  }

  PlanningGrid free_grid = PlanningGrid::inflate(map, distance_transform(map), 0.0);
  const auto cells = free_cells(free_grid);
  std::vector<StaticObstacle> out;
  for (auto shape : shapes) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttemptsPerObstacle && !cells.empty(); ++attempt) {
      const auto& c = pick(cells, rng);
      shape.center = map.cell_center(c.x, c.y);
      const double r = shape.bounding_radius();
      if (in_zones(forbidden, shape.center, r)) continue;
      const bool overlaps = std::any_of(out.begin(), out.end(), [&](const StaticObstacle& o) {
        return (o.center - shape.center).norm() < o.bounding_radius() + r;
      });
      if (overlaps) continue;
      out.push_back(shape);
      placed = true;
      break;
    }
    if (!placed) {
      throw PlacementExhausted("static obstacle " + std::to_string(out.size()),
                               mode.models.empty() ? "obstacles.static" : "obstacles.models");
    }
  }
  return out;
}

// Waypoints w1..wk in line of sight of each other, cyclically, and of the spawn.
std::vector<Vec2> waypoint_chain(const Vec2& spawn, int k, const PlanningGrid& g,
                                 std::span<const Zone> forbidden, double radius, Rng& rng) {
  auto candidate = [&](const Vec2& from, Vec2& out) {
    const double a = rng.uniform(-kPi, kPi);
    const double d = rng.uniform(kMinWaypointSpacing, kMaxWaypointStep);
    const Vec2 p = from + d * Vec2(std::cos(a), std::sin(a));
    const auto c = g.cell_of(p);
    if (g.blocked(c.x, c.y)) return false;
    out = g.cell_center(c);
    if ((out - from).norm() < kMinWaypointSpacing) return false;
    if (in_zones(forbidden, out, radius)) return false;
    return g.line_free(from, out);
  };
  for (int chain = 0; chain < kPlacementAttemptsPerObstacle; ++chain) {
    std::vector<Vec2> wps;
    Vec2 prev = spawn;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) {
      ok = false;
      for (int attempt = 0; attempt < kPlacementAttemptsPerObstacle; ++attempt) {
        Vec2 p;
        if (!candidate(prev, p)) continue;
        if (i == k - 1 && k > 2 && !g.line_free(p, wps.front())) continue;
        wps.push_back(p);
        prev = p;
        ok = true;
        break;
      }
    }
    if (ok) return wps;
  }
  throw PlacementExhausted("pedestrian waypoints", "obstacles.waypoints");
}

SocialState draw_state(const ObstacleMode& mode, bool grouped, Rng& rng) {
  if (mode.initial_states.empty()) return SocialState::Walking;
  double total = 0.0;
  for (const auto& [s, w] : mode.initial_states) total += w;
  double u = rng.uniform() * total;
  SocialState pick_state = mode.initial_states.back().first;
  for (const auto& [s, w] : mode.initial_states) {
    if (u < w) {
      pick_state = s;
      break;
    }
    u -= w;
  }
  if (pick_state == SocialState::GroupTalking && !grouped) return SocialState::Walking;
  return pick_state;
}

// Resolves the initial social state of every agent and picks group leaders.
void settle_agents(WorldState& world, Rng& rng, const SocialStateParams& social,
                   const std::vector<std::optional<double>>& speeds) {
  assign_group_leaders(world.agents, rng);
  const std::vector<AgentState> snapshot = world.agents;
  std::map<int, std::vector<AgentState>> groups;
  for (const auto& a : snapshot) {
    if (a.group_id) groups[*a.group_id].push_back(a);
  }
  static const std::vector<AgentState> kNone;
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    auto& a = world.agents[i];
    const Perception p = perceive(a, snapshot, world.robots, social);
    const auto& group = a.group_id ? groups[*a.group_id] : kNone;
    apply_state(a, true, p, group, rng, social);
    if (i < speeds.size() && speeds[i]) {
      a.base_speed = *speeds[i];
      if (a.social_state == SocialState::Walking || a.social_state == SocialState::Running) {
        a.social_state = a.base_speed >= social.running_threshold ? SocialState::Running
                                                                  : SocialState::Walking;
        a.desired_speed = a.base_speed;
      }
    }
  }
  if (!groups.empty()) sync_group_waypoints(world.agents);
}

}  // namespace

Placement spawn_random_obstacles(const ObstacleMode& mode, const GridMap& map,
                                 std::span<const Zone> forbidden, double pedestrian_radius,
                                 const SocialStateParams& social, Rng& rng) {
  (void)social;
  Placement out;
  out.statics = place_statics(mode, map, forbidden, rng);
  const int n = draw(mode.pedestrians, rng);
  if (n == 0) return out;

  const Grids grids = with_statics(map, out.statics);
  const PlanningGrid ped_grid = PlanningGrid::inflate(*grids.map, *grids.distance, pedestrian_radius);
  const auto cells = free_cells(ped_grid);
  auto clear_of_agents = [&](const Vec2& p) {
    return std::none_of(out.agents.begin(), out.agents.end(), [&](const AgentState& a) {
      return (a.position - p).norm() < 2.0 * pedestrian_radius;
    });
  };

  int next_group = 0;
  while (static_cast<int>(out.agents.size()) < n) {
    const int remaining = n - static_cast<int>(out.agents.size());
    int size = 1;
    if (remaining >= 2 && mode.group_probability > 0.0 && rng.bernoulli(mode.group_probability)) {
      size = std::min(remaining, draw(mode.group_size, rng));
    }
    AgentState lead;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttemptsPerObstacle && !cells.empty(); ++attempt) {
      const auto& c = pick(cells, rng);
      const Vec2 p = ped_grid.cell_center(c);
      if (in_zones(forbidden, p, pedestrian_radius) || !clear_of_agents(p)) continue;
      lead.position = lead.spawn = p;
      placed = true;
      break;
    }
    if (!placed) throw PlacementExhausted("pedestrian " + std::to_string(out.agents.size()), "obstacles.pedestrians");
    lead.id = static_cast<int>(out.agents.size());
    lead.radius = pedestrian_radius;
    lead.cyclic = true;
    bind_plugin(lead, mode.plugin);
    lead.waypoints = waypoint_chain(lead.spawn, draw(mode.waypoints, rng), ped_grid, forbidden,
                                    pedestrian_radius, rng);
    if (size > 1) lead.group_id = next_group++;
    lead.social_state = draw_state(mode, size > 1, rng);
    out.agents.push_back(lead);

    for (int m = 1; m < size; ++m) {
      AgentState member = lead;
      member.id = static_cast<int>(out.agents.size());
      bool ok = false;
      for (int attempt = 0; attempt < kPlacementAttemptsPerObstacle; ++attempt) {
        const double a = rng.uniform(-kPi, kPi);
        const double d = kGroupSpawnRadius * std::sqrt(rng.uniform());
        const auto c = ped_grid.cell_of(lead.spawn + d * Vec2(std::cos(a), std::sin(a)));
        if (ped_grid.blocked(c.x, c.y)) continue;
        const Vec2 p = ped_grid.cell_center(c);
        if (in_zones(forbidden, p, pedestrian_radius) || !clear_of_agents(p)) continue;
        if (!ped_grid.line_free(lead.spawn, p)) continue;
        member.position = member.spawn = p;
        ok = true;
        break;
      }
      if (!ok) throw PlacementExhausted("group member of pedestrian " + std::to_string(lead.id), "obstacles.group_size");
      member.social_state = draw_state(mode, true, rng);
      out.agents.push_back(member);
    }
  }
  return out;
}

GridMap build_map(const MapSpec& spec, std::uint64_t seed) {
  if (spec.source == MapSpec::Source::File) return load_map(spec.file);
  return std::move(generate_map(spec.generator, spec.size, seed).grid);
}

std::uint64_t placement_hash(const std::vector<StaticObstacle>& statics,
                             std::span<const AgentState> agents) {
  Hasher h;
  for (const auto& s : statics) {
    h.add(static_cast<std::int64_t>(s.shape));
    h.add(s.center.x());
    h.add(s.center.y());
    h.add(s.radius);
    h.add(s.size.x());
    h.add(s.size.y());
  }
  for (const auto& a : agents) {
    h.add(static_cast<std::int64_t>(a.id));
    h.add(a.spawn.x());
    h.add(a.spawn.y());
    h.add(static_cast<std::int64_t>(a.group_id.value_or(-1)));
    for (const auto& w : a.waypoints) {
      h.add(w.x());
      h.add(w.y());
    }
  }
  return h.value();
}

TaskGenerator::TaskGenerator(StageSpec stage, std::uint64_t seed_base, RobotConfig robot)
    : stage_(std::move(stage)), seed_base_(seed_base), robot_(std::move(robot)) {
  if (!stage_.dynamic_map) {
    try {
      static_map_ = std::make_shared<const GridMap>(
          build_map(stage_.map, stage_.map.seed.value_or(seed_base_)));
    } catch (const std::exception&) {
      // Left empty; every reset reports the failure for its own episode.
    }
  }
}

std::shared_ptr<const GridMap> TaskGenerator::map_for(int episode_index) const {
  if (!stage_.dynamic_map) {
    if (static_map_) return static_map_;
    return std::make_shared<const GridMap>(build_map(stage_.map, stage_.map.seed.value_or(seed_base_)));
  }
  return std::make_shared<const GridMap>(
      build_map(stage_.map, stage_.map.seed.value_or(seed_base_) + static_cast<std::uint64_t>(episode_index)));
}

TaskGenerator::Task TaskGenerator::robot_task(int episode_index, const GridMap& map,
                                              const Task* previous,
                                              std::span<const Vec2> avoid) const {
  const auto& mode = stage_.robot;
  if (mode.kind == RobotModeKind::Waypoints) {
    const auto n = mode.waypoints.size();
    const Vec2 a = mode.waypoints[static_cast<std::size_t>(episode_index) % n];
    const Vec2 b = mode.waypoints[static_cast<std::size_t>(episode_index + 1) % n];
    if (map.occupied_at(a) || map.occupied_at(b)) {
      throw SpawnCollision("robot waypoint lies in an occupied cell");
    }
    const Vec2 d = b - a;
    return {{a.x(), a.y(), std::atan2(d.y(), d.x())}, b};
  }
  Rng rng = stream(episode_seed(episode_index), kRobotStream);
  const DistanceMap dmap = distance_transform(map);
  const PlanningGrid g = PlanningGrid::inflate(map, dmap, robot_.footprint_radius + 0.1);
  std::vector<int> labels;
  label_components(g.width(), g.height(), [&](int x, int y) { return !g.blocked(x, y); }, labels);
  std::vector<CellIndex> cells;
  for (const auto& c : free_cells(g)) {
    const Vec2 p = g.cell_center(c);
    if (in_zones(stage_.forbidden, p, robot_.footprint_radius)) continue;
    const bool crowded = std::any_of(avoid.begin(), avoid.end(), [&](const Vec2& q) {
      return (q - p).norm() < kPedRobotClearance;
    });
    if (!crowded) cells.push_back(c);
  }
  if (cells.empty()) throw UnreachableGoal("no free cell for the robot");
  const std::int64_t budget = 10 * kPlacementAttemptsPerObstacle;
  for (std::int64_t attempt = 0; attempt < budget; ++attempt) {
    CellIndex cs;
    Vec2 start;
    if (previous) {
      start = previous->goal;
      cs = g.cell_of(start);
    } else {
      cs = pick(cells, rng);
      start = g.cell_center(cs);
    }
    const CellIndex cg = pick(cells, rng);
    const Vec2 goal = g.cell_center(cg);
    if ((goal - start).norm() < mode.min_goal_distance) continue;
    if (g.blocked(cs.x, cs.y)) continue;
    const auto w = static_cast<std::size_t>(g.width());
    if (labels[cs.y * w + cs.x] != labels[cg.y * w + cg.x]) continue;
    const Vec2 d = goal - start;
    return {{start.x(), start.y(), std::atan2(d.y(), d.x())}, goal};
  }
  throw UnreachableGoal("no reachable start/goal pair at least " +
                        std::to_string(mode.min_goal_distance) + " m apart");
}

EpisodeSetup TaskGenerator::reset(int episode_index) const {
  EpisodeSetup s;
  s.stage = stage_.name;
  s.episode = episode_index;
  s.seed = episode_seed(episode_index);
  const auto base = map_for(episode_index);
  s.base_map = base;
  s.forbidden = stage_.forbidden;

  const ObstacleMode& mode = stage_.obstacles;
  const bool explore = stage_.robot.kind == RobotModeKind::Explore;
  std::vector<StaticObstacle> statics;
  std::vector<AgentState> agents;
  std::vector<std::optional<double>> speeds;
  Task task;

  if (mode.kind == ObstacleModeKind::Scenario) {
    const ScenarioSpec& sc = *mode.scenario;
    statics = sc.obstacles;
    s.forbidden.insert(s.forbidden.end(), sc.forbidden.begin(), sc.forbidden.end());
    const Grids grids = with_statics(*base, statics);
    if (stage_.robot.kind == RobotModeKind::Scenario) {
      task = {sc.robot_start, sc.robot_goal};
      if (grids.map->occupied_at(task.start.position()) || grids.map->occupied_at(task.goal)) {
        throw SpawnCollision("scenario robot start or goal lies in an occupied cell");
      }
    } else {
      task = robot_task(episode_index, *grids.map, nullptr, {});
    }
    std::vector<PedestrianSpec> peds = sc.pedestrians;
    std::sort(peds.begin(), peds.end(), [](const PedestrianSpec& x, const PedestrianSpec& y) { return x.id < y.id; });
    for (const auto& p : peds) {
      if (grids.map->occupied_at(p.spawn) || !grids.map->contains(p.spawn)) {
        throw SpawnCollision("pedestrian " + std::to_string(p.id) + " spawns in an occupied cell");
      }
      if (in_zones(s.forbidden, p.spawn, 0.0)) {
        throw SpawnCollision("pedestrian " + std::to_string(p.id) + " spawns in a forbidden zone");
      }
      AgentState a;
      a.id = p.id;
      a.position = a.spawn = p.spawn;
      a.radius = stage_.pedestrian_radius;
      a.waypoints = p.waypoints;
      a.cyclic = p.cyclic;
      a.group_id = p.group;
      a.social_state = p.state;
      bind_plugin(a, p.plugin);
      agents.push_back(std::move(a));
      speeds.push_back(p.speed);
    }
  } else if (explore) {
    // Obstacles come from the stage seed so every reset sees the same set.
    Rng rng = stream(seed_base_, kObstacleStream);
    Placement p = spawn_random_obstacles(mode, *base, s.forbidden, stage_.pedestrian_radius, stage_.social, rng);
    statics = std::move(p.statics);
    agents = std::move(p.agents);
    const Grids grids = with_statics(*base, statics);
    std::vector<Vec2> spawns;
    for (const auto& a : agents) spawns.push_back(a.spawn);
    std::optional<Task> prev;
    for (int e = 0; e <= episode_index; ++e) {
      prev = robot_task(e, *grids.map, prev ? &*prev : nullptr, spawns);
    }
    task = *prev;
  } else {
    task = robot_task(episode_index, *base, nullptr, {});
    Zone zs, zg;
    zs.center = task.start.position();
    zg.center = task.goal;
    zs.radius = zg.radius = kAutoZoneRadius;
    std::vector<Zone> zones = s.forbidden;
    zones.push_back(zs);
    zones.push_back(zg);
    Rng rng = stream(s.seed, kObstacleStream);
    bool ok = false;
    for (int attempt = 0; attempt < kStaticRetries && !ok; ++attempt) {
      Placement p = spawn_random_obstacles(mode, *base, zones, stage_.pedestrian_radius, stage_.social, rng);
      const Grids grids = with_statics(*base, p.statics);
      const PlanningGrid g = PlanningGrid::inflate(*grids.map, *grids.distance, robot_.footprint_radius);
      if (!reachable(g, task.start.position(), task.goal)) continue;
      statics = std::move(p.statics);
      agents = std::move(p.agents);
      ok = true;
    }
    if (!ok) throw UnreachableGoal("static obstacles disconnect start and goal");
  }

  const Grids grids = with_statics(*base, statics);
  WorldState& w = s.world;
  w.dt = stage_.limits.dt;
  w.map = grids.map;
  w.distance = grids.distance;
  w.rng_seed = s.seed;
  w.static_obstacles = statics;
  w.agents = std::move(agents);
  RobotState r;
  r.id = 0;
  r.pose = task.start;
  r.kinematics = robot_.kinematics;
  r.footprint_radius = robot_.footprint_radius;
  r.goal = task.goal;
  w.robots.push_back(r);
  s.start = task.start;
  s.goal = task.goal;
  s.obstacle_hash = placement_hash(statics, w.agents);

  Rng state_rng = stream(s.seed, kStateStream);
  if (explore) state_rng = stream(seed_base_, kStateStream);
  settle_agents(w, state_rng, stage_.social, speeds);
  return s;
}

}  // namespace socnav
