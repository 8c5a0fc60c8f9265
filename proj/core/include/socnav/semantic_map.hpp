#pragma once

#include "socnav/geometry.hpp"
#include "socnav/grid_map.hpp"
#include "socnav/world.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace socnav {

struct SemanticDatum {
  Vec2 location = Vec2::Zero();
  float evidence = 0.0f;

  friend bool operator==(const SemanticDatum& a, const SemanticDatum& b) {
    return a.location == b.location && a.evidence == b.evidence;
  }
};

struct SemanticFrame {
  double timestamp = 0.0;
  std::string label;
  std::vector<SemanticDatum> data;
};

namespace layers {
inline constexpr const char* kType = "ped_type";
inline constexpr const char* kState = "ped_state";
inline constexpr const char* kVelocityX = "ped_velocity_x";
inline constexpr const char* kVelocityY = "ped_velocity_y";
inline constexpr const char* kObservedProb = "ped_observed_prob";
}  // namespace layers

/// Evidence value of the type layer for pedestrians.
inline constexpr float kPedestrianType = 1.0f;

/// Observation-probability source; the default reports 1.0 for everyone.
using ObservationModel = std::function<float(const AgentState&)>;

/// Emits the five pedestrian layers for the current tick.
std::vector<SemanticFrame> publish_semantics(const WorldState& world,
                                             const ObservationModel& observe = {});

/// Base occupancy costmap plus timestamped semantic layers.
class SemanticCostmap {
 public:
  static constexpr std::uint8_t kFree = 0;
  static constexpr std::uint8_t kLethal = 254;

  explicit SemanticCostmap(const GridMap& map, double ttl = 1.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  std::uint8_t cost(int x, int y) const {
    return cost_[static_cast<std::size_t>(y) * width_ + x];
  }
  double ttl() const { return ttl_; }

  /// Clock used for staleness.
  void set_time(double now) { now_ = now; }
  double time() const { return now_; }

  /// Replaces the layer; throws StaleFrame on a timestamp regression.
  void update_layer(SemanticFrame frame);

  bool available(const std::string& label) const;
  std::optional<double> timestamp(const std::string& label) const;

  /// Closed-ball query; empty when the layer is absent or stale. Results
  /// are ordered by (x, y, evidence).
  std::vector<SemanticDatum> query(const std::string& label, const Vec2& position,
                                   double radius) const;

 private:
  struct Layer {
    SemanticFrame frame;
    double deadline = 0.0;
    std::map<std::pair<int, int>, std::vector<std::size_t>> buckets;
  };

  std::pair<int, int> bucket(const Vec2& p) const;

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.25;
  double ttl_ = 1.0;
  double now_ = 0.0;
  std::vector<std::uint8_t> cost_;
  std::map<std::string, Layer> layers_;
};

}  // namespace socnav
