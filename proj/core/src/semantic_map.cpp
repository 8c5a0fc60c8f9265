#include "socnav/semantic_map.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <cmath>

namespace socnav {

std::vector<SemanticFrame> publish_semantics(const WorldState& world,
                                             const ObservationModel& observe) {
  const double t = world.time();
  std::vector<SemanticFrame> frames = {
      {t, layers::kType, {}},      {t, layers::kState, {}},
      {t, layers::kVelocityX, {}}, {t, layers::kVelocityY, {}},
      {t, layers::kObservedProb, {}},
  };
  for (auto& f : frames) f.data.reserve(world.agents.size());
  for (const auto& a : world.agents) {
    const Vec2 p = a.position;
    frames[0].data.push_back({p, kPedestrianType});
    frames[1].data.push_back({p, static_cast<float>(static_cast<int>(a.social_state))});
    frames[2].data.push_back({p, static_cast<float>(a.velocity.x())});
    frames[3].data.push_back({p, static_cast<float>(a.velocity.y())});
    frames[4].data.push_back({p, observe ? observe(a) : 1.0f});
  }
  return frames;
}

SemanticCostmap::SemanticCostmap(const GridMap& map, double ttl)
    : width_(map.width()),
      height_(map.height()),
      resolution_(map.resolution()),
      ttl_(ttl) {
  cost_.resize(static_cast<std::size_t>(width_) * height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      cost_[static_cast<std::size_t>(y) * width_ + x] =
          map.occupied(x, y) ? kLethal : kFree;
    }
  }
}

std::pair<int, int> SemanticCostmap::bucket(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x() / resolution_)),
          static_cast<int>(std::floor(p.y() / resolution_))};
}

void SemanticCostmap::update_layer(SemanticFrame frame) {
  if (frame.label.empty()) throw Error("semantic frame without a label");
  auto it = layers_.find(frame.label);
  if (it != layers_.end() && frame.timestamp < it->second.frame.timestamp) {
    throw StaleFrame("layer '" + frame.label + "': timestamp " +
                     std::to_string(frame.timestamp) + " older than " +
                     std::to_string(it->second.frame.timestamp));
  }
  Layer layer;
  layer.deadline = frame.timestamp + ttl_;
  for (std::size_t i = 0; i < frame.data.size(); ++i) {
    layer.buckets[bucket(frame.data[i].location)].push_back(i);
  }
  layer.frame = std::move(frame);
  const std::string label = layer.frame.label;
  layers_[label] = std::move(layer);
}

bool SemanticCostmap::available(const std::string& label) const {
  auto it = layers_.find(label);
  return it != layers_.end() && now_ <= it->second.deadline;
}

std::optional<double> SemanticCostmap::timestamp(const std::string& label) const {
  auto it = layers_.find(label);
  if (it == layers_.end()) return std::nullopt;
  return it->second.frame.timestamp;
}

std::vector<SemanticDatum> SemanticCostmap::query(const std::string& label,
                                                  const Vec2& position,
                                                  double radius) const {
  std::vector<SemanticDatum> out;
  if (!available(label)) return out;
  const Layer& layer = layers_.at(label);
  const auto lo = bucket(position - Vec2(radius, radius));
  const auto hi = bucket(position + Vec2(radius, radius));
  const double r2 = radius * radius;
  if (static_cast<double>(hi.first - lo.first + 1) * (hi.second - lo.second + 1) >
      static_cast<double>(layer.buckets.size())) {
    for (const auto& d : layer.frame.data) {
      if ((d.location - position).squaredNorm() <= r2) out.push_back(d);
    }
  } else {
    for (int by = lo.second; by <= hi.second; ++by) {
      for (int bx = lo.first; bx <= hi.first; ++bx) {
        auto it = layer.buckets.find({bx, by});
        if (it == layer.buckets.end()) continue;
        for (std::size_t i : it->second) {
          const auto& d = layer.frame.data[i];
          if ((d.location - position).squaredNorm() <= r2) out.push_back(d);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SemanticDatum& a, const SemanticDatum& b) {
    if (a.location.x() != b.location.x()) return a.location.x() < b.location.x();
    if (a.location.y() != b.location.y()) return a.location.y() < b.location.y();
    return a.evidence < b.evidence;
  });
  return out;
}

}  // namespace socnav
