#pragma once

#include "socnav/global_planner.hpp"
#include "socnav/semantic_map.hpp"

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace socnav {

enum class BehaviorMode : std::uint8_t { Neutral, Aggressive, Polite, Sideways };

std::string_view behavior_name(BehaviorMode m);
std::optional<BehaviorMode> behavior_from_name(std::string_view name);

struct DynamicObstacle {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.3;
};

/// Multipliers applied by the local controller.
struct ControllerOverrides {
  double speed_factor = 1.0;
  double clearance_weight_factor = 1.0;
  /// Body-to-body gap from pedestrians kept whenever some sample allows it.
  double personal_space = 0.0;

  friend bool operator==(const ControllerOverrides&, const ControllerOverrides&) = default;
};

struct InterplannerParams {
  double trigger_distance = 3.0;
  double window = 3.0;  // local path length, meters
  double aggressive_speed = 1.5;
  double aggressive_clearance_weight = 0.5;
  double polite_speed = 0.5;
  double polite_clearance_weight = 2.0;
  double polite_clearance = 1.0;  // lateral, body to body
  double polite_personal_space = 0.3;
  double sideways_offset = 0.8;
  double sideways_ramp = 1.0;

  void validate() const;
};

struct LocalContext {
  const PlanningGrid* grid = nullptr;
  const DistanceMap* distance = nullptr;
  const SemanticCostmap* semantics = nullptr;
  std::vector<DynamicObstacle> obstacles;
  Pose2 robot;
  double footprint_radius = 0.3;
};

struct IntermediateResult {
  Path path;
  ControllerOverrides overrides;
  bool triggered = false;
  /// The mode's geometry was infeasible; neutral output was used.
  bool fallback = false;
};

/// Pluggable intermediate stage: (global path, local map, semantics,
/// dynamic obstacles) to (path, overrides).
class IntermediatePlanner {
 public:
  virtual ~IntermediatePlanner() = default;
  virtual std::string name() const = 0;
  virtual IntermediateResult plan(const Path& global, const LocalContext& ctx,
                                  const InterplannerParams& params) const = 0;
};

class InterplannerRegistry {
 public:
  static InterplannerRegistry& global();
  void add(std::shared_ptr<const IntermediatePlanner> planner);
  /// Throws ConfigError for an unknown name.
  std::shared_ptr<const IntermediatePlanner> get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  InterplannerRegistry();
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const IntermediatePlanner>, std::less<>> planners_;
};

/// The global path from the pose nearest the robot onward, cut at
/// `window` meters.
Path subsample(const Path& global, const Pose2& robot, double window);

/// Distance from the robot to the nearest dynamic obstacle center.
double nearest_obstacle_distance(const LocalContext& ctx);

IntermediateResult intermediate_plan(const Path& global, const LocalContext& ctx,
                                     BehaviorMode mode, const InterplannerParams& params);

/// Pedestrians (position and velocity) within `radius` of `center`, read
/// from the semantic layers.
std::vector<DynamicObstacle> dynamic_obstacles(const SemanticCostmap& semantics,
                                               const Vec2& center, double radius,
                                               double obstacle_radius = 0.3);

}  // namespace socnav
