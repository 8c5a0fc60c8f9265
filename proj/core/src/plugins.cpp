#include "socnav/plugins.hpp"

#include "socnav/errors.hpp"
#include "socnav/orca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

namespace socnav {

int AgentsDataframe::index_of(int id) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

AgentsDataframe capture_frame(const WorldState& world, double cutoff) {
  AgentsDataframe f;
  f.timestamp = world.time();
  f.agents = world.agents;
  for (const auto& r : world.robots) {
    f.robots.push_back({r.id, r.pose.position(), r.world_velocity(), r.footprint_radius});
  }
  const std::size_t n = f.agents.size();
  f.neighbors.assign(n, {});
  f.border_distance.assign(n, std::numeric_limits<double>::infinity());
  f.border_gradient.assign(n, Vec2::Zero());

  auto key = [cutoff](const Vec2& p) {
    return std::pair<std::int64_t, std::int64_t>{
        static_cast<std::int64_t>(std::floor(p.x() / cutoff)),
        static_cast<std::int64_t>(std::floor(p.y() / cutoff))};
  };
  struct PairHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      return std::hash<std::int64_t>()(k.first * 73856093LL ^ k.second * 19349663LL);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<int>, PairHash> buckets;
  for (std::size_t i = 0; i < n; ++i) {
    buckets[key(f.agents[i].position)].push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [bx, by] = key(f.agents[i].position);
    auto& out = f.neighbors[i];
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        auto it = buckets.find({bx + dx, by + dy});
        if (it == buckets.end()) continue;
        for (int j : it->second) {
          if (j == static_cast<int>(i)) continue;
          const double d = (f.agents[i].position - f.agents[j].position).norm();
          if (d <= cutoff) out.push_back({j, d});
        }
      }
    }
    std::sort(out.begin(), out.end(), [&](const Neighbor& a, const Neighbor& b) {
      return f.agents[a.index].id < f.agents[b.index].id;
    });
    if (world.distance) {
      f.border_distance[i] = world.distance->interpolate(f.agents[i].position);
      f.border_gradient[i] = world.distance->gradient(f.agents[i].position);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (f.agents[i].group_id) f.groups[*f.agents[i].group_id].push_back(static_cast<int>(i));
  }
  for (auto& [gid, members] : f.groups) {
    std::sort(members.begin(), members.end(), [&](int a, int b) {
      return f.agents[a].id < f.agents[b].id;
    });
  }
  return f;
}

Vec2 effective_target(const AgentState& agent, const SfmParams& params) {
  if (agent.plugin == PluginKind::Evacuation || agent.plugin == PluginKind::Bonding) {
    return params.exit;
  }
  return agent.target();
}

namespace {

Vec2 sum_repulsion(const AgentsDataframe& f, std::size_t i, const SfmParams& p,
                   double scale) {
  Vec2 sum = Vec2::Zero();
  const AgentState& a = f.agents[i];
  for (const auto& nb : f.neighbors[i]) {
    const AgentState& b = f.agents[static_cast<std::size_t>(nb.index)];
    sum += repulsion_from(a.position, a.velocity, a.radius, b.position, b.radius, p, scale);
  }
  return sum;
}

Vec2 robot_repulsion(const AgentsDataframe& f, std::size_t i, const SfmParams& p) {
  const AgentState& a = f.agents[i];
  Vec2 sum = Vec2::Zero();
  const double scale = a.avoid_robot ? 1.0 : p.robot_body_repulsion;
  for (const auto& r : f.robots) {
    sum += repulsion_from(a.position, a.velocity, a.radius, r.position, r.radius, p, scale);
  }
  return sum;
}

ForceBreakdown social_terms(const AgentsDataframe& f, std::size_t i,
                            const SfmParams& p, double repulsion_scale) {
  ForceBreakdown b;
  b.goal = goal_force(f.agents[i], p.relaxation_time);
  b.ped_repulsion = sum_repulsion(f, i, p, repulsion_scale);
  b.border = border_force(f.border_distance[i], f.border_gradient[i], p);
  b.robot_repulsion = robot_repulsion(f, i, p);
  return b;
}

class PassthroughPlugin : public ForcePlugin {
 public:
  std::string name() const override { return "passthrough"; }
  WaypointPolicy waypoint_policy() const override { return {0.5, false}; }
  std::vector<AgentForce> compute(const AgentsDataframe& f,
                                  const PluginContext& ctx) const override {
    std::vector<AgentForce> out;
    out.reserve(f.agents.size());
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      out.push_back({f.agents[i].id, aggregate(social_terms(f, i, ctx.params, 1.0), f.agents[i].id)});
    }
    return out;
  }
};

class PySocialPlugin : public ForcePlugin {
 public:
  std::string name() const override { return "pysocial"; }
  WaypointPolicy waypoint_policy() const override { return {1.0, true}; }
  std::vector<AgentForce> compute(const AgentsDataframe& f,
                                  const PluginContext& ctx) const override {
    std::vector<AgentForce> out;
    out.reserve(f.agents.size());
    std::vector<AgentState> members;
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      ForceBreakdown b = social_terms(f, i, ctx.params, 1.0);
      const AgentState& a = f.agents[i];
      if (a.group_id) {
        members.clear();
        for (int m : f.groups.at(*a.group_id)) members.push_back(f.agents[static_cast<std::size_t>(m)]);
        const GroupForces g = group_forces(a, members, ctx.params);
        b.group_gaze = g.gaze;
        b.group_attraction = g.attraction;
        b.group_repulsion = g.repulsion;
      }
      out.push_back({a.id, aggregate(b, a.id)});
    }
    return out;
  }
};

class EvacuationPlugin : public ForcePlugin {
 public:
  explicit EvacuationPlugin(bool bonding) : bonding_(bonding) {}
  std::string name() const override { return bonding_ ? "bonding" : "evacuation"; }
  std::vector<AgentForce> compute(const AgentsDataframe& f,
                                  const PluginContext& ctx) const override {
    const SfmParams& p = ctx.params;
    std::map<int, int> partner;
    if (bonding_) partner = partners(f, p);
    std::vector<AgentForce> out;
    out.reserve(f.agents.size());
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      AgentState a = f.agents[i];
      a.waypoint_override = p.exit;
      a.arrived = false;
      ForceBreakdown b;
      b.goal = goal_force(a, p.relaxation_time);
      b.ped_repulsion = sum_repulsion(f, i, p, p.evacuation_factor);
      b.border = border_force(f.border_distance[i], f.border_gradient[i], p);
      b.robot_repulsion = robot_repulsion(f, i, p);
      if (auto it = partner.find(a.id); it != partner.end()) {
        const int j = f.index_of(it->second);
        if (j >= 0) {
          const Vec2 d = f.agents[static_cast<std::size_t>(j)].position - a.position;
          const double len = d.norm();
          if (len > 1e-9) b.bonding = p.bond_stiffness * (len - p.bond_rest_length) * d / len;
        }
      }
      out.push_back({a.id, aggregate(b, a.id)});
    }
    return out;
  }

 private:
  static std::map<int, int> partners(const AgentsDataframe& f, const SfmParams& p) {
    std::map<int, int> m;
    if (!p.bonds.empty()) {
      for (const auto& [a, b] : p.bonds) {
        m[a] = b;
        m[b] = a;
      }
      return m;
    }
    std::vector<int> ids;
    for (const auto& a : f.agents) {
      if (a.plugin == PluginKind::Bonding) ids.push_back(a.id);
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t k = 0; k + 1 < ids.size(); k += 2) {
      m[ids[k]] = ids[k + 1];
      m[ids[k + 1]] = ids[k];
    }
    return m;
  }

  bool bonding_;
};

class SpinnyPlugin : public ForcePlugin {
 public:
  std::string name() const override { return "spinny"; }
  std::vector<AgentForce> compute(const AgentsDataframe& f,
                                  const PluginContext& ctx) const override {
    const SfmParams& p = ctx.params;
    const double radial_gain = 1.0;
    std::vector<AgentForce> out;
    out.reserve(f.agents.size());
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      const AgentState& a = f.agents[i];
      const Vec2 r = a.position - a.spawn;
      const double rho = r.norm();
      const Vec2 u = rho > 1e-9 ? Vec2(r / rho) : Vec2(1.0, 0.0);
      const Vec2 t = perp(u);
      const double vd = a.desired_speed;
      const Vec2 want = vd * t + radial_gain * (p.spin_radius - rho) * u;
      ForceBreakdown b;
      b.goal = (want - a.velocity) / p.relaxation_time -
               (vd * vd / std::max(rho, p.spin_radius)) * u;
      b.border = border_force(f.border_distance[i], f.border_gradient[i], p);
      out.push_back({a.id, aggregate(b, a.id)});
    }
    return out;
  }
};

class OrcaPlugin : public ForcePlugin {
 public:
  std::string name() const override { return "orca"; }
  std::vector<AgentForce> compute(const AgentsDataframe& f,
                                  const PluginContext& ctx) const override {
    const SfmParams& p = ctx.params;
    std::vector<AgentForce> out;
    out.reserve(f.agents.size());
    std::vector<OrcaNeighbor> nbs;
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      const AgentState& a = f.agents[i];
      nbs.clear();
      for (const auto& nb : f.neighbors[i]) {
        const AgentState& b = f.agents[static_cast<std::size_t>(nb.index)];
        nbs.push_back({b.id, b.position, b.velocity, b.radius, true});
      }
      // Robots sort after every pedestrian and do not reciprocate.
      for (const auto& r : f.robots) {
        if ((r.position - a.position).norm() > p.cutoff) continue;
        nbs.push_back({1'000'000 + r.id, r.position, r.velocity, r.radius, false});
      }
      OrcaAgent oa;
      oa.position = a.position;
      oa.velocity = a.velocity;
      oa.radius = a.radius;
      oa.max_speed = p.max_speed;
      const Vec2 to = a.target() - a.position;
      const double vd = a.arrived && !a.waypoint_override ? 0.0 : a.desired_speed;
      oa.preferred = to.norm() > 1e-9 ? Vec2(vd * to.normalized()) : Vec2::Zero();
      const Vec2 v = orca_velocity(oa, nbs, p.orca_horizon, ctx.dt);
      ForceBreakdown b;
      b.goal = (v - a.velocity) / ctx.dt;
      b.border = border_force(f.border_distance[i], f.border_gradient[i], p);
      out.push_back({a.id, aggregate(b, a.id)});
    }
    return out;
  }
};

}  // namespace

PluginRegistry::PluginRegistry() {
  for (std::shared_ptr<const ForcePlugin> p :
       {std::shared_ptr<const ForcePlugin>(std::make_shared<PassthroughPlugin>()),
        std::shared_ptr<const ForcePlugin>(std::make_shared<SpinnyPlugin>()),
        std::shared_ptr<const ForcePlugin>(std::make_shared<PySocialPlugin>()),
        std::shared_ptr<const ForcePlugin>(std::make_shared<EvacuationPlugin>(false)),
        std::shared_ptr<const ForcePlugin>(std::make_shared<EvacuationPlugin>(true)),
        std::shared_ptr<const ForcePlugin>(std::make_shared<OrcaPlugin>())}) {
    plugins_[p->name()] = p;
  }
}

PluginRegistry& PluginRegistry::global() {
  static PluginRegistry registry;
  return registry;
}

void PluginRegistry::add(std::shared_ptr<const ForcePlugin> plugin) {
  std::unique_lock lock(mutex_);
  plugins_[plugin->name()] = std::move(plugin);
}

std::shared_ptr<const ForcePlugin> PluginRegistry::get(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = plugins_.find(name);
  if (it == plugins_.end()) throw UnknownPlugin(std::string(name));
  return it->second;
}

bool PluginRegistry::contains(std::string_view name) const {
  std::shared_lock lock(mutex_);
  return plugins_.find(name) != plugins_.end();
}

std::vector<std::string> PluginRegistry::names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [k, v] : plugins_) out.push_back(k);
  return out;
}

std::string agent_plugin_name(const AgentState& agent) {
  if (agent.plugin == PluginKind::Custom) return agent.custom_plugin;
  return std::string(plugin_name(agent.plugin));
}

std::vector<AgentForce> plugin_step(const AgentsDataframe& frame, PluginKind kind,
                                    const PluginContext& ctx) {
  return plugin_step(frame, plugin_name(kind), ctx);
}

std::vector<AgentForce> plugin_step(const AgentsDataframe& frame,
                                    std::string_view name,
                                    const PluginContext& ctx) {
  return PluginRegistry::global().get(name)->compute(frame, ctx);
}

}  // namespace socnav
