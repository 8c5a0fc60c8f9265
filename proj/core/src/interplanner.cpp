#include "socnav/interplanner.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>

namespace socnav {

namespace {

constexpr std::array<std::string_view, 4> kModeNames = {"neutral", "aggressive", "polite",
                                                        "sideways"};

bool point_ok(const LocalContext& ctx, const Vec2& p) {
  if (ctx.grid) {
    const auto c = ctx.grid->cell_of(p);
    if (ctx.grid->blocked(c.x, c.y)) return false;
  }
  if (ctx.distance && static_clearance(*ctx.distance, p) < ctx.footprint_radius) return false;
  return true;
}

Path with_headings(std::vector<Vec2> pts, PathSource source) {
  Path out;
  out.source = source;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double th = 0.0;
    if (i + 1 < pts.size()) {
      th = std::atan2(pts[i + 1].y() - pts[i].y(), pts[i + 1].x() - pts[i].x());
    } else if (i > 0) {
      th = std::atan2(pts[i].y() - pts[i - 1].y(), pts[i].x() - pts[i - 1].x());
    }
    out.poses.push_back({pts[i].x(), pts[i].y(), th});
  }
  return out;
}

std::vector<Vec2> positions(const Path& p) {
  std::vector<Vec2> out;
  out.reserve(p.poses.size());
  for (const auto& q : p.poses) out.push_back(q.position());
  return out;
}

// Pushes local points sideways, off the path normal, away from nearby
// pedestrians. A pedestrian dead ahead is passed on the right. Shorter pushes
// are tried where the full one would leave free space.
Path polite_path(const Path& local, const LocalContext& ctx, const InterplannerParams& params) {
  std::vector<Vec2> pts = positions(local);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Vec2 t(std::cos(local.poses[i].theta), std::sin(local.poses[i].theta));
    const Vec2 n = perp(t);
    double shift = 0.0;
    for (const auto& o : ctx.obstacles) {
      const double want = params.polite_clearance + o.radius + ctx.footprint_radius;
      const Vec2 d = pts[i] - o.position;
      if (std::abs(d.dot(t)) >= want) continue;
      const double lateral = d.dot(n);
      if (std::abs(lateral) >= want) continue;
      const double side = std::abs(lateral) > 1e-3 ? (lateral > 0.0 ? 1.0 : -1.0) : -1.0;
      const double need = side * (want - std::abs(lateral));
      if (std::abs(need) > std::abs(shift)) shift = need;
    }
    if (shift == 0.0) continue;
    for (double scale : {1.0, 0.75, 0.5, 0.25}) {
      const Vec2 cand = pts[i] + scale * shift * n;
      if (point_ok(ctx, cand)) {
        pts[i] = cand;
        break;
      }
    }
  }
  return with_headings(std::move(pts), PathSource::Intermediate);
}

std::optional<Path> sideways_path(const Path& local, const LocalContext& ctx,
                                  const InterplannerParams& params) {
  if (local.poses.size() < 2 || ctx.obstacles.empty()) return std::nullopt;
  const Vec2 robot = ctx.robot.position();
  const DynamicObstacle* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : ctx.obstacles) {
    const double d = (o.position - robot).norm();
    if (d < best) {
      best = d;
      nearest = &o;
    }
  }
  const std::vector<Vec2> pts = positions(local);
  const Vec2 heading = unit_or_zero(pts[1] - pts[0]);
  if (heading.isZero()) return std::nullopt;
  const Vec2 lateral = perp(heading);
  double side = 0.0;
  if (nearest->velocity.norm() > 0.05) {
    side = nearest->velocity.dot(lateral) > 0.0 ? -1.0 : 1.0;
  } else {
    side = (nearest->position - robot).dot(lateral) > 0.0 ? -1.0 : 1.0;
  }
  // Along-track position of the pedestrian; the offset is held until past it.
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
  const double ped_s = std::clamp((nearest->position - pts[0]).dot(heading), 0.0, s.back());
  const double hold_end = ped_s + params.sideways_ramp;
  std::vector<Vec2> out = pts;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double f = std::min(1.0, s[i] / params.sideways_ramp);
    if (s[i] > hold_end) f = std::max(0.0, 1.0 - (s[i] - hold_end) / params.sideways_ramp);
    if (f <= 0.0) continue;
    const Vec2 seg = i + 1 < pts.size() ? Vec2(pts[i + 1] - pts[i]) : Vec2(pts[i] - pts[i - 1]);
    const Vec2 n = perp(unit_or_zero(seg));
    out[i] = pts[i] + side * f * params.sideways_offset * n;
    if (!point_ok(ctx, out[i])) return std::nullopt;
  }
  return with_headings(std::move(out), PathSource::Intermediate);
}

class ModePlanner : public IntermediatePlanner {
 public:
  explicit ModePlanner(BehaviorMode m) : mode_(m) {}
  std::string name() const override { return std::string(behavior_name(mode_)); }
  IntermediateResult plan(const Path& global, const LocalContext& ctx,
                          const InterplannerParams& params) const override {
    return intermediate_plan(global, ctx, mode_, params);
  }

 private:
  BehaviorMode mode_;
};

}  // namespace

std::string_view behavior_name(BehaviorMode m) { return kModeNames[static_cast<std::size_t>(m)]; }

std::optional<BehaviorMode> behavior_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i) {
    if (kModeNames[i] == name) return static_cast<BehaviorMode>(i);
  }
  return std::nullopt;
}

void InterplannerParams::validate() const {
  auto fail = [](const char* f, const char* m) { throw ConfigError("", 0, f, m); };
  if (!(trigger_distance > 0.0)) fail("interplanner.trigger_distance", "must be > 0");
  if (!(window > 0.0)) fail("interplanner.window", "must be > 0");
  if (!(aggressive_speed > 0.0)) fail("interplanner.aggressive_speed", "must be > 0");
  if (!(aggressive_clearance_weight >= 0.0)) {
    fail("interplanner.aggressive_clearance_weight", "must be >= 0");
  }
  if (!(polite_speed > 0.0)) fail("interplanner.polite_speed", "must be > 0");
  if (!(polite_clearance_weight >= 0.0)) fail("interplanner.polite_clearance_weight", "must be >= 0");
  if (!(polite_clearance >= 0.0)) fail("interplanner.polite_clearance", "must be >= 0");
  if (!(polite_personal_space >= 0.0)) {
    fail("interplanner.polite_personal_space", "must be >= 0");
  }
  if (!(sideways_offset >= 0.0)) fail("interplanner.sideways_offset", "must be >= 0");
  if (!(sideways_ramp > 0.0)) fail("interplanner.sideways_ramp", "must be > 0");
}

Path subsample(const Path& global, const Pose2& robot, double window) {
  Path out;
  out.source = PathSource::Intermediate;
  if (global.empty()) return out;
  const Vec2 r = robot.position();
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < global.poses.size(); ++i) {
    const double d = (global.poses[i].position() - r).squaredNorm();
    if (d < best) {
      best = d;
      start = i;
    }
  }
  double s = 0.0;
  out.poses.push_back(global.poses[start]);
  for (std::size_t i = start + 1; i < global.poses.size(); ++i) {
    s += (global.poses[i].position() - global.poses[i - 1].position()).norm();
    if (s > window) break;
    out.poses.push_back(global.poses[i]);
  }
  return out;
}

double nearest_obstacle_distance(const LocalContext& ctx) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : ctx.obstacles) {
    best = std::min(best, (o.position - ctx.robot.position()).norm());
  }
  return best;
}

IntermediateResult intermediate_plan(const Path& global, const LocalContext& ctx,
                                     BehaviorMode mode, const InterplannerParams& params) {
  IntermediateResult r;
  r.path = subsample(global, ctx.robot, params.window);
  r.triggered = nearest_obstacle_distance(ctx) < params.trigger_distance;
  if (!r.triggered || mode == BehaviorMode::Neutral) return r;
  switch (mode) {
    case BehaviorMode::Aggressive:
      r.overrides.speed_factor = params.aggressive_speed;
      r.overrides.clearance_weight_factor = params.aggressive_clearance_weight;
      break;
    case BehaviorMode::Polite:
      r.overrides.speed_factor = params.polite_speed;
      r.overrides.clearance_weight_factor = params.polite_clearance_weight;
      r.overrides.personal_space = params.polite_personal_space;
      r.path = polite_path(r.path, ctx, params);
      break;
    case BehaviorMode::Sideways:
      if (auto p = sideways_path(r.path, ctx, params)) {
        r.path = std::move(*p);
      } else {
        r.fallback = true;
      }
      break;
    case BehaviorMode::Neutral:
      break;
  }
  return r;
}

std::vector<DynamicObstacle> dynamic_obstacles(const SemanticCostmap& semantics,
                                               const Vec2& center, double radius,
                                               double obstacle_radius) {
  std::vector<DynamicObstacle> out;
  const auto type = semantics.query(layers::kType, center, radius);
  const auto vx = semantics.query(layers::kVelocityX, center, radius);
  const auto vy = semantics.query(layers::kVelocityY, center, radius);
  const bool velocities = vx.size() == type.size() && vy.size() == type.size();
  for (std::size_t i = 0; i < type.size(); ++i) {
    DynamicObstacle o;
    o.position = type[i].location;
    o.radius = obstacle_radius;
    if (velocities && vx[i].location == o.position && vy[i].location == o.position) {
      o.velocity = Vec2(vx[i].evidence, vy[i].evidence);
    }
    out.push_back(o);
  }
  return out;
}

InterplannerRegistry::InterplannerRegistry() {
  for (auto m : {BehaviorMode::Neutral, BehaviorMode::Aggressive, BehaviorMode::Polite,
                 BehaviorMode::Sideways}) {
    auto p = std::make_shared<ModePlanner>(m);
    planners_[p->name()] = p;
  }
}

InterplannerRegistry& InterplannerRegistry::global() {
  static InterplannerRegistry registry;
  return registry;
}

void InterplannerRegistry::add(std::shared_ptr<const IntermediatePlanner> planner) {
  std::unique_lock lock(mutex_);
  planners_[planner->name()] = std::move(planner);
}

std::shared_ptr<const IntermediatePlanner> InterplannerRegistry::get(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = planners_.find(name);
  if (it == planners_.end()) {
    throw ConfigError("", 0, "planner", "unknown planner '" + std::string(name) + "'");
  }
  return it->second;
}

bool InterplannerRegistry::contains(std::string_view name) const {
  std::shared_lock lock(mutex_);
  return planners_.find(name) != planners_.end();
}

std::vector<std::string> InterplannerRegistry::names() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [k, v] : planners_) out.push_back(k);
  return out;
}

}  // namespace socnav
