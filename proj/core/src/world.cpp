#include "socnav/world.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace socnav {

void StaticObstacle::rasterize(GridMap& map, CellTag tag) const {
  const double res = map.resolution();
  const double ext = bounding_radius();
  const auto lo = map.cell_of(center - Vec2(ext, ext));
  const auto hi = map.cell_of(center + Vec2(ext, ext));
  for (int y = std::max(lo.y, 0); y <= std::min(hi.y, map.height() - 1); ++y) {
    for (int x = std::max(lo.x, 0); x <= std::min(hi.x, map.width() - 1); ++x) {
      const Vec2 c((x + 0.5) * res, (y + 0.5) * res);
      bool inside = false;
      if (shape == Shape::Circle) {
        inside = (c - center).norm() <= radius;
      } else {
        const Vec2 d = (c - center).cwiseAbs();
        inside = d.x() <= 0.5 * size.x() && d.y() <= 0.5 * size.y();
      }
      if (inside) map.set(x, y, tag);
    }
  }
}

namespace {

bool cell_free(const GridMap& map, int x, int y) { return !map.occupied(x, y); }

Vec2 clip_substep(const GridMap& map, const Vec2& from, const Vec2& to,
                  Vec2& velocity) {
  const auto cf = map.cell_of(from);
  const auto ct = map.cell_of(to);
  if (!cell_free(map, cf.x, cf.y)) {
    // Already inside an obstacle: let it leave, never go deeper.
    return cell_free(map, ct.x, ct.y) ? to : from;
  }
  if (cell_free(map, ct.x, ct.y)) {
    const bool diagonal = ct.x != cf.x && ct.y != cf.y;
    if (!diagonal || cell_free(map, ct.x, cf.y) || cell_free(map, cf.x, ct.y)) {
      return to;
    }
  }
  const Vec2 slide_x(to.x(), from.y());
  const auto sx = map.cell_of(slide_x);
  if (cell_free(map, sx.x, sx.y)) {
    velocity.y() = 0.0;
    return slide_x;
  }
  const Vec2 slide_y(from.x(), to.y());
  const auto sy = map.cell_of(slide_y);
  if (cell_free(map, sy.x, sy.y)) {
    velocity.x() = 0.0;
    return slide_y;
  }
  velocity.setZero();
  return from;
}

}  // namespace

Vec2 clip_move(const GridMap& map, const Vec2& from, const Vec2& to,
               Vec2& velocity) {
  const double eps = 1e-9;
  Vec2 target(std::clamp(to.x(), eps, map.width_m() - eps),
              std::clamp(to.y(), eps, map.height_m() - eps));
  const double step = 0.5 * map.resolution();
  const int n = std::max(1, static_cast<int>(std::ceil((target - from).norm() / step)));
  Vec2 p = from;
  const Vec2 delta = (target - from) / n;
  for (int i = 0; i < n; ++i) {
    const Vec2 next = clip_substep(map, p, p + delta, velocity);
    if (next == p) break;
    p = next;
  }
  return p;
}

void step_world(WorldState& world, std::span<const Vec2> forces,
                const StepParams& params) {
  if (!(world.dt > 0.0)) throw Error("step_world: dt must be positive");
  if (forces.size() != world.agents.size()) {
    throw Error("step_world: one force per agent required");
  }
  for (std::size_t i = 0; i < forces.size(); ++i) {
    if (!is_finite(forces[i])) throw NonFiniteForce(world.agents[i].id);
  }
  const double dt = world.dt;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    AgentState& a = world.agents[i];
    Vec2 v = a.velocity + forces[i] * dt;
    const double speed = v.norm();
    if (speed > params.max_speed) v *= params.max_speed / speed;
    const Vec2 to = a.position + v * dt;
    if (world.map) {
      a.position = clip_move(*world.map, a.position, to, v);
    } else {
      a.position = to;
    }
    a.velocity = v;
    if (v.squaredNorm() > 1e-12) a.heading = std::atan2(v.y(), v.x());
  }
  ++world.tick;
}

bool advance_waypoint(AgentState& agent, double tolerance) {
  if (agent.waypoints.empty() || agent.arrived) return false;
  const Vec2 wp = agent.waypoints[static_cast<std::size_t>(agent.waypoint_index)];
  if ((agent.position - wp).norm() >= tolerance) return false;
  const int n = static_cast<int>(agent.waypoints.size());
  if (agent.waypoint_index + 1 < n) {
    ++agent.waypoint_index;
  } else if (agent.cyclic && n > 1) {
    agent.waypoint_index = 0;
  } else {
    agent.arrived = true;
    return false;
  }
  return true;
}

void sync_group_waypoints(std::span<AgentState> agents) {
  std::map<int, const AgentState*> leaders;
  for (const auto& a : agents) {
    if (!a.group_id) continue;
    leaders.try_emplace(*a.group_id, nullptr);
    if (a.is_group_leader) {
      auto& slot = leaders[*a.group_id];
      if (slot != nullptr) {
        throw Error("group " + std::to_string(*a.group_id) +
                    " has more than one leader");
      }
      slot = &a;
    }
  }
  for (const auto& [gid, leader] : leaders) {
    if (leader == nullptr) throw MissingLeader(gid);
  }
  // Copy out first so members never observe a half-updated leader.
  struct Route {
    std::vector<Vec2> waypoints;
    int index;
    bool cyclic;
    bool arrived;
  };
  std::map<int, Route> routes;
  for (const auto& [gid, leader] : leaders) {
    routes[gid] = {leader->waypoints, leader->waypoint_index, leader->cyclic,
                   leader->arrived};
  }
  for (auto& a : agents) {
    if (!a.group_id || a.is_group_leader) continue;
    const Route& r = routes.at(*a.group_id);
    a.waypoints = r.waypoints;
    a.waypoint_index = r.index;
    a.cyclic = r.cyclic;
    a.arrived = r.arrived;
  }
}

void assign_group_leaders(std::span<AgentState> agents, Rng& rng) {
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    agents[i].is_group_leader = false;
    if (agents[i].group_id) members[*agents[i].group_id].push_back(i);
  }
  for (auto& [gid, idx] : members) {
    const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(idx.size()) - 1);
    agents[idx[static_cast<std::size_t>(pick)]].is_group_leader = true;
  }
}

std::uint64_t state_hash(const WorldState& world) {
  Hasher h;
  h.add(world.tick);
  for (const auto& a : world.agents) {
    h.add(static_cast<std::int64_t>(a.id));
    h.add(a.position.x());
    h.add(a.position.y());
    h.add(a.velocity.x());
    h.add(a.velocity.y());
    h.add(static_cast<std::int64_t>(a.social_state));
  }
  for (const auto& r : world.robots) {
    h.add(r.pose.x);
    h.add(r.pose.y);
    h.add(r.pose.theta);
    h.add(r.vx);
    h.add(r.vy);
    h.add(r.omega);
  }
  return h.value();
}

}  // namespace socnav
