#include "socnav/metrics.hpp"

#include "socnav/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace socnav {

void MetricsParams::validate() const {
  auto fail = [](const char* f, const char* m) { throw ConfigError("", 0, f, m); };
  if (!(cone.half_angle > 0.0 && cone.half_angle <= kPi)) {
    fail("metrics.facing_angle", "must be in (0, 180] degrees");
  }
  if (!(cone.range > 0.0)) fail("metrics.facing_range", "must be > 0");
  if (!(private_zone >= 0.0)) fail("metrics.private_zone", "must be >= 0");
  if (!(curvature_spacing > 0.0)) fail("metrics.curvature_spacing", "must be > 0");
  if (success_max_collisions < 0) fail("metrics.success_max_collisions", "must be >= 0");
}

double menger_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
  const double denom = ab * bc * ca;
  if (denom <= 0.0) return 0.0;
  const double twice_area = std::abs(cross2(b - a, c - a));
  return 2.0 * twice_area / denom;
}

std::vector<Vec2> arc_subsample(std::span<const Vec2> path, double spacing) {
  std::vector<Vec2> out;
  if (path.empty()) return out;
  out.push_back(path.front());
  // Steps that equal the spacing must not flip on rounding.
  const double reach = spacing * (1.0 - 1e-9);
  double acc = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    acc += (path[i] - path[i - 1]).norm();
    if (acc >= reach) {
      out.push_back(path[i]);
      acc = 0.0;
    }
  }
  return out;
}

namespace {

bool in_cone(const Vec2& origin, double heading, const Vec2& target, const FacingCone& cone) {
  const Vec2 d = target - origin;
  const double dist = d.norm();
  if (dist > cone.range) return false;
  if (dist < 1e-12) return true;
  return std::abs(wrap_angle(std::atan2(d.y(), d.x()) - heading)) <= cone.half_angle;
}

}  // namespace

SocialTimes social_metrics(const EpisodeTrace& trace, const MetricsParams& params) {
  SocialTimes out;
  const double dt = trace.header.dt;
  const double zone = params.private_zone + trace.header.footprint_radius;
  std::int64_t zone_ticks = 0, facing_ticks = 0, seen_ticks = 0;
  for (const auto& t : trace.ticks) {
    const Vec2 r = t.robot.position();
    bool zone_hit = false, facing = false, seen = false;
    for (const auto& a : t.agents) {
      const Vec2 p(a.x, a.y);
      if ((p - r).norm() < zone) zone_hit = true;
      if (in_cone(r, t.robot.theta, p, params.cone)) facing = true;
      const double look = std::hypot(a.vx, a.vy) > 1e-6 ? std::atan2(a.vy, a.vx) : a.heading;
      if (in_cone(p, look, r, params.cone)) seen = true;
    }
    zone_ticks += zone_hit;
    facing_ticks += facing;
    seen_ticks += seen;
  }
  out.private_zone = static_cast<double>(zone_ticks) * dt;
  out.facing = static_cast<double>(facing_ticks) * dt;
  out.seen = static_cast<double>(seen_ticks) * dt;
  return out;
}

MetricsRecord compute_episode_metrics(const EpisodeTrace& trace, const Vec2& goal,
                                      const MetricsParams& params) {
  MetricsRecord m;
  const double dt = trace.header.dt;
  const std::size_t n = trace.ticks.size();
  m.duration = static_cast<double>(n) * dt;
  m.collisions = static_cast<int>(trace.collisions.size());
  m.timeout = trace.end == EndReason::Timeout;

  std::vector<Vec2> pos;
  pos.reserve(n);
  for (const auto& t : trace.ticks) pos.push_back(t.robot.position());

  for (std::size_t k = 0; k < n; ++k) {
    if ((pos[k] - goal).norm() < trace.header.goal_tolerance) {
      m.time_to_goal = trace.ticks[k].time;
      break;
    }
  }
  m.success = m.time_to_goal.has_value() && m.collisions <= params.success_max_collisions;

  for (std::size_t k = 1; k < n; ++k) m.path_length += (pos[k] - pos[k - 1]).norm();

  std::vector<Vec2> vel, acc, jerk;
  for (std::size_t k = 1; k < n; ++k) vel.push_back((pos[k] - pos[k - 1]) / dt);
  for (std::size_t k = 1; k < vel.size(); ++k) acc.push_back((vel[k] - vel[k - 1]) / dt);
  for (std::size_t k = 1; k < acc.size(); ++k) jerk.push_back((acc[k] - acc[k - 1]) / dt);
  auto mean_norm = [](const std::vector<Vec2>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const auto& x : v) s += x.norm();
    return s / static_cast<double>(v.size());
  };
  m.velocity_avg = mean_norm(vel);
  m.acceleration_avg = mean_norm(acc);
  m.jerk = mean_norm(jerk);

  const auto pts = arc_subsample(pos, params.curvature_spacing);
  if (pts.size() >= 3) {
    std::vector<double> k;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      k.push_back(menger_curvature(pts[i - 1], pts[i], pts[i + 1]));
    }
    double sum = 0.0;
    for (double x : k) sum += x;
    const double mean = sum / static_cast<double>(k.size());
    double var = 0.0;
    for (double x : k) var += (x - mean) * (x - mean);
    m.curvature_avg = mean;
    m.curvature_max = *std::max_element(k.begin(), k.end());
    m.curvature_min = *std::min_element(k.begin(), k.end());
    m.curvature_normalized = mean * m.path_length;
    m.roughness = std::sqrt(var / static_cast<double>(k.size()));
  }
  if (m.path_length > 1e-9) {
    double turn = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      turn += std::abs(wrap_angle(trace.ticks[i].robot.theta - trace.ticks[i - 1].robot.theta));
    }
    m.angle_over_length = turn / m.path_length;
  }

  const SocialTimes s = social_metrics(trace, params);
  m.time_in_private_zone = s.private_zone;
  m.time_facing_peds = s.facing;
  m.time_seen_by_peds = s.seen;
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "collisions",       "time_to_goal",     "path_length",          "velocity_avg",
      "acceleration_avg", "jerk",             "curvature_avg",        "curvature_max",
      "curvature_min",    "curvature_normalized", "angle_over_length", "roughness",
      "time_in_private_zone", "time_facing_peds", "time_seen_by_peds", "duration",
  };
  return names;
}

std::optional<double> metric_value(const MetricsRecord& m, const std::string& name) {
  if (name == "collisions") return static_cast<double>(m.collisions);
  if (name == "time_to_goal") return m.time_to_goal;
  if (name == "path_length") return m.path_length;
  if (name == "velocity_avg") return m.velocity_avg;
  if (name == "acceleration_avg") return m.acceleration_avg;
  if (name == "jerk") return m.jerk;
  if (name == "curvature_avg") return m.curvature_avg;
  if (name == "curvature_max") return m.curvature_max;
  if (name == "curvature_min") return m.curvature_min;
  if (name == "curvature_normalized") return m.curvature_normalized;
  if (name == "angle_over_length") return m.angle_over_length;
  if (name == "roughness") return m.roughness;
  if (name == "time_in_private_zone") return m.time_in_private_zone;
  if (name == "time_facing_peds") return m.time_facing_peds;
  if (name == "time_seen_by_peds") return m.time_seen_by_peds;
  if (name == "duration") return m.duration;
  throw Error("unknown metric '" + name + "'");
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("bad number '" + s + "' in metrics CSV");
  }
  return v;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::string csv_header() {
  return "stage,episode,seed,planner,robot,failed,success,collisions,time_to_goal,path_length,"
         "velocity_avg,acceleration_avg,jerk,curvature_avg,curvature_max,curvature_min,"
         "curvature_normalized,angle_over_length,roughness,time_in_private_zone,"
         "time_facing_peds,time_seen_by_peds,timeout,duration,trajectory_hash";
}

std::string csv_row(const EpisodeResult& r) {
  const MetricsRecord& m = r.metrics;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.trajectory_hash));
  std::ostringstream os;
  os << r.stage << ',' << r.episode << ',' << r.seed << ',' << r.planner << ',' << r.robot << ','
     << (r.failed ? 1 : 0) << ',' << (m.success ? 1 : 0) << ',' << m.collisions << ','
     << opt(m.time_to_goal) << ',' << format_double(m.path_length) << ','
     << format_double(m.velocity_avg) << ',' << format_double(m.acceleration_avg) << ','
     << format_double(m.jerk) << ',' << opt(m.curvature_avg) << ',' << opt(m.curvature_max) << ','
     << opt(m.curvature_min) << ',' << opt(m.curvature_normalized) << ','
     << opt(m.angle_over_length) << ',' << opt(m.roughness) << ','
     << format_double(m.time_in_private_zone) << ',' << format_double(m.time_facing_peds) << ','
     << format_double(m.time_seen_by_peds) << ',' << (m.timeout ? 1 : 0) << ','
     << format_double(m.duration) << ',' << hash;
  return os.str();
}

std::vector<EpisodeResult> read_metrics_csv(const std::string& text) {
  std::vector<EpisodeResult> out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return out;
  if (split(line, ',') != split(csv_header(), ',')) throw Error("unexpected metrics CSV header");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (f.size() != 25) throw Error("metrics CSV row with " + std::to_string(f.size()) + " fields");
    EpisodeResult r;
    r.stage = f[0];
    r.episode = std::stoll(f[1]);
    r.seed = std::stoull(f[2]);
    r.planner = f[3];
    r.robot = f[4];
    r.failed = f[5] == "1";
    MetricsRecord& m = r.metrics;
    m.success = f[6] == "1";
    m.collisions = std::stoi(f[7]);
    m.time_to_goal = parse_opt(f[8]);
    m.path_length = parse_double(f[9]);
    m.velocity_avg = parse_double(f[10]);
    m.acceleration_avg = parse_double(f[11]);
    m.jerk = parse_double(f[12]);
    m.curvature_avg = parse_opt(f[13]);
    m.curvature_max = parse_opt(f[14]);
    m.curvature_min = parse_opt(f[15]);
    m.curvature_normalized = parse_opt(f[16]);
    m.angle_over_length = parse_opt(f[17]);
    m.roughness = parse_opt(f[18]);
    m.time_in_private_zone = parse_double(f[19]);
    m.time_facing_peds = parse_double(f[20]);
    m.time_seen_by_peds = parse_double(f[21]);
    m.timeout = f[22] == "1";
    m.duration = parse_double(f[23]);
    r.trajectory_hash = std::stoull(f[24], nullptr, 16);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GroupSummary> aggregate(std::span<const EpisodeResult> records, const GroupKey& key) {
  std::vector<std::pair<std::string, std::vector<const EpisodeResult*>>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    const std::string k = key(r);
    auto [it, fresh] = index.try_emplace(k, groups.size());
    if (fresh) groups.push_back({k, {}});
    groups[it->second].second.push_back(&r);
  }
  std::vector<GroupSummary> out;
  for (const auto& [k, rs] : groups) {
    GroupSummary g;
    g.key = k;
    g.episodes = rs.size();
    std::size_t ok = 0, timeouts = 0;
    for (const auto* r : rs) {
      ok += r->metrics.success && !r->failed;
      timeouts += r->metrics.timeout && !r->failed;
    }
    g.success_rate = 100.0 * static_cast<double>(ok) / static_cast<double>(rs.size());
    g.timeout_rate = 100.0 * static_cast<double>(timeouts) / static_cast<double>(rs.size());
    for (const auto& name : metric_names()) {
      std::vector<double> xs;
      for (const auto* r : rs) {
        if (r->failed) continue;
        if (auto v = metric_value(r->metrics, name)) xs.push_back(*v);
      }
      MetricSummary s;
      s.metric = name;
      s.n = xs.size();
      if (!xs.empty()) {
        double sum = 0.0;
        for (double x : xs) sum += x;
        s.mean = sum / static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(var / static_cast<double>(xs.size()));
        s.min = *std::min_element(xs.begin(), xs.end());
        s.max = *std::max_element(xs.begin(), xs.end());
      }
      g.metrics.push_back(s);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::string aggregate_csv_key(const EpisodeResult& r) {
  return r.planner + ',' + r.robot + ',' + r.stage;
}

std::string aggregate_csv_header() {
  return "planner,robot,stage,episodes,success_rate,timeout_rate,metric,n,mean,std,min,max";
}

std::vector<std::string> aggregate_csv_rows(const std::vector<GroupSummary>& groups) {
  std::vector<std::string> rows;
  for (const auto& g : groups) {
    for (const auto& s : g.metrics) {
      std::ostringstream os;
      os << g.key << ',' << g.episodes << ',' << format_double(g.success_rate) << ','
         << format_double(g.timeout_rate) << ',' << s.metric << ',' << s.n << ',';
      if (s.n > 0) {
        os << format_double(s.mean) << ',' << format_double(s.std) << ','
           << format_double(s.min) << ',' << format_double(s.max);
      } else {
        os << ",,,";
      }
      rows.push_back(os.str());
    }
  }
  return rows;
}

}  // namespace socnav
