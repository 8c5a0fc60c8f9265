#pragma once

#include "socnav/sfm.hpp"
#include "socnav/world.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace socnav {

struct RobotSnapshot {
  int id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.3;
};

struct Neighbor {
  int index = 0;  // into AgentsDataframe::agents
  double distance = 0.0;
};

/// Snapshot handed to force plugins once per tick.
struct AgentsDataframe {
  double timestamp = 0.0;
  std::vector<AgentState> agents;
  std::vector<RobotSnapshot> robots;
  /// Per agent: others within the cutoff, ordered by id.
  std::vector<std::vector<Neighbor>> neighbors;
  std::vector<double> border_distance;
  std::vector<Vec2> border_gradient;
  /// Group id to member indices, ordered by id.
  std::map<int, std::vector<int>> groups;

  int index_of(int id) const;
};

/// Captures the world with a uniform grid hash of cell size `cutoff`.
AgentsDataframe capture_frame(const WorldState& world, double cutoff);

struct PluginContext {
  SfmParams params;
  double dt = 0.1;
};

struct AgentForce {
  int id = 0;
  ForceBreakdown forces;
};

/// How the world loop advances waypoints for agents bound to a plugin.
struct WaypointPolicy {
  double tolerance = 1.0;
  bool sync_groups = false;
};

class ForcePlugin {
 public:
  virtual ~ForcePlugin() = default;
  virtual std::string name() const = 0;
  virtual WaypointPolicy waypoint_policy() const { return {}; }
  /// One entry per frame agent, in frame order.
  virtual std::vector<AgentForce> compute(const AgentsDataframe& frame,
                                          const PluginContext& ctx) const = 0;
};

/// Name-keyed plugin table. Built-ins are always present.
class PluginRegistry {
 public:
  static PluginRegistry& global();

  /// Replaces any plugin of the same name.
  void add(std::shared_ptr<const ForcePlugin> plugin);
  /// Throws UnknownPlugin.
  std::shared_ptr<const ForcePlugin> get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  PluginRegistry();
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const ForcePlugin>, std::less<>> plugins_;
};

/// Registry name for an agent's binding.
std::string agent_plugin_name(const AgentState& agent);

std::vector<AgentForce> plugin_step(const AgentsDataframe& frame,
                                    PluginKind kind, const PluginContext& ctx);
std::vector<AgentForce> plugin_step(const AgentsDataframe& frame,
                                    std::string_view name,
                                    const PluginContext& ctx);

/// Target an agent steers to under its plugin (the shared exit for
/// evacuation and bonding).
Vec2 effective_target(const AgentState& agent, const SfmParams& params);

}  // namespace socnav
