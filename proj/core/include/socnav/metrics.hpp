#pragma once

#include "socnav/trace.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socnav {

struct FacingCone {
  double half_angle = 25.0 * kPi / 180.0;
  double range = 5.0;
};

struct MetricsParams {
  FacingCone cone;
  double private_zone = 0.5;
  double curvature_spacing = 0.1;
  int success_max_collisions = 1;  // success needs collisions <= this

  void validate() const;
};

struct MetricsRecord {
  bool success = false;
  int collisions = 0;
  std::optional<double> time_to_goal;
  double path_length = 0.0;
  double velocity_avg = 0.0;
  double acceleration_avg = 0.0;
  double jerk = 0.0;
  std::optional<double> curvature_avg;
  std::optional<double> curvature_max;
  std::optional<double> curvature_min;
  std::optional<double> curvature_normalized;
  std::optional<double> angle_over_length;
  std::optional<double> roughness;
  double time_in_private_zone = 0.0;
  double time_facing_peds = 0.0;
  double time_seen_by_peds = 0.0;
  bool timeout = false;
  double duration = 0.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// 4 * area / (|ab| |bc| |ca|); zero for collinear or repeated points.
double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c);

/// Points of `path` kept at roughly `spacing` arc length apart.
std::vector<Vec2> arc_subsample(std::span<const Vec2> path, double spacing);

struct SocialTimes {
  double private_zone = 0.0;
  double facing = 0.0;
  double seen = 0.0;
};

SocialTimes social_metrics(const EpisodeTrace& trace, const MetricsParams& params);

MetricsRecord compute_episode_metrics(const EpisodeTrace& trace, const Vec2& goal,
                                      const MetricsParams& params);

/// One CSV row's labels plus its metrics.
struct EpisodeResult {
  std::string stage;
  std::int64_t episode = 0;
  std::uint64_t seed = 0;
  std::string planner;
  std::string robot;
  bool failed = false;
  std::string error;
  MetricsRecord metrics;
  std::uint64_t trajectory_hash = 0;
};

/// Numeric metric columns in CSV order.
const std::vector<std::string>& metric_names();
/// Value of a named metric; nullopt when absent.
std::optional<double> metric_value(const MetricsRecord& m, const std::string& name);

std::string csv_header();
std::string csv_row(const EpisodeResult& r);
/// Parses rows written by csv_row (header line required).
std::vector<EpisodeResult> read_metrics_csv(const std::string& text);

struct MetricSummary {
  std::string metric;
  std::size_t n = 0;  // records with a value
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

struct GroupSummary {
  std::string key;
  std::size_t episodes = 0;
  double success_rate = 0.0;  // percent
  double timeout_rate = 0.0;  // percent
  std::vector<MetricSummary> metrics;
};

using GroupKey = std::function<std::string(const EpisodeResult&)>;

/// Groups in order of first appearance; failed episodes count toward the
/// rates but never toward the metric statistics.
std::vector<GroupSummary> aggregate(std::span<const EpisodeResult> records, const GroupKey& key);

/// Group key used by the aggregate CSV.
std::string aggregate_csv_key(const EpisodeResult& r);
std::string aggregate_csv_header();
std::vector<std::string> aggregate_csv_rows(const std::vector<GroupSummary>& groups);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace socnav
