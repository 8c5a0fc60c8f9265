#include "socnav/config.hpp"

#include "socnav/errors.hpp"
#include "socnav/plugins.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace socnav {

bool Zone::contains(const Vec2& p, double margin) const {
  if (shape == Shape::Circle) return (p - center).norm() <= radius + margin;
  const Vec2 d = (p - center).cwiseAbs();
  return d.x() <= 0.5 * size.x() + margin && d.y() <= 0.5 * size.y() + margin;
}

std::uint64_t stage_seed_base(const BenchmarkConfig& cfg, std::size_t index) {
  const StageSpec& s = cfg.stages.at(index);
  if (s.seed_base) return *s.seed_base;
  return cfg.seed.value_or(0) + 1000ULL * index;
}

namespace {

using json = nlohmann::json;

// A YAML node together with its dotted field path, for diagnostics.
class Field {
 public:
  Field(YAML::Node node, std::string path, std::shared_ptr<const std::string> file,
        int fallback_line)
      : node_(std::move(node)),
        path_(std::move(path)),
        file_(std::move(file)),
        fallback_(fallback_line) {}

  bool defined() const { return node_.IsDefined() && !node_.IsNull(); }
  bool is_seq() const { return node_.IsSequence(); }
  bool is_map() const { return node_.IsMap(); }
  int line() const { return node_.IsDefined() ? node_.Mark().line + 1 : fallback_; }
  const std::string& path() const { return path_; }
  const std::string& file() const { return *file_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(*file_, line(), path_, msg);
  }

  Field operator[](const std::string& key) const {
    if (!node_.IsMap()) fail("expected a mapping");
    const YAML::Node& n = node_;
    return Field(n[key], path_.empty() ? key : path_ + "." + key, file_, line());
  }

  std::size_t size() const {
    if (!node_.IsSequence()) fail("expected a list");
    return node_.size();
  }
  Field at(std::size_t i) const {
    if (!node_.IsSequence()) fail("expected a list");
    const YAML::Node& n = node_;
    return Field(n[i], path_ + "[" + std::to_string(i) + "]", file_, line());
  }

  std::vector<std::string> keys() const {
    if (!node_.IsMap()) fail("expected a mapping");
    std::vector<std::string> out;
    for (const auto& kv : node_) out.push_back(kv.first.as<std::string>());
    return out;
  }

  void allow(std::initializer_list<std::string_view> allowed) const {
    if (!defined()) return;
    if (!node_.IsMap()) fail("expected a mapping");
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        Field(kv.first, path_.empty() ? k : path_ + "." + k, file_, line())
            .fail("unknown field");
      }
    }
  }

  double num() const {
    if (!node_.IsScalar()) fail("expected a number");
    try {
      const double v = node_.as<double>();
      if (!std::isfinite(v)) fail("must be finite");
      return v;
    } catch (const YAML::Exception&) {
      fail("expected a number");
    }
  }
  std::int64_t integer() const {
    const double v = num();
    if (v != std::floor(v)) fail("expected an integer");
    return static_cast<std::int64_t>(v);
  }
  std::uint64_t u64() const {
    if (!node_.IsScalar()) fail("expected an unsigned integer");
    try {
      return node_.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail("expected an unsigned integer");
    }
  }
  std::string str() const {
    if (!node_.IsScalar()) fail("expected a string");
    return node_.as<std::string>();
  }
  bool boolean() const {
    if (!node_.IsScalar()) fail("expected true or false");
    try {
      return node_.as<bool>();
    } catch (const YAML::Exception&) {
      fail("expected true or false");
    }
  }
  Vec2 vec2() const {
    if (!node_.IsSequence() || node_.size() != 2) fail("expected [x, y]");
    return {at(0).num(), at(1).num()};
  }
  Pose2 pose() const {
    if (!node_.IsSequence() || (node_.size() != 2 && node_.size() != 3)) {
      fail("expected [x, y] or [x, y, theta]");
    }
    Pose2 p{at(0).num(), at(1).num(), 0.0};
    if (node_.size() == 3) p.theta = at(2).num();
    return p;
  }
  std::vector<Vec2> points() const {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).vec2());
    return out;
  }

  void read(const char* key, double& out) const {
    if (auto f = (*this)[key]; f.defined()) out = f.num();
  }
  void read(const char* key, int& out) const {
    if (auto f = (*this)[key]; f.defined()) out = static_cast<int>(f.integer());
  }
  void read(const char* key, bool& out) const {
    if (auto f = (*this)[key]; f.defined()) out = f.boolean();
  }
  void read(const char* key, std::string& out) const {
    if (auto f = (*this)[key]; f.defined()) out = f.str();
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::shared_ptr<const std::string> file_;
  int fallback_;
};

Field parse_root(const std::string& text, const std::filesystem::path& source,
                 const std::string& schema) {
  auto file = std::make_shared<const std::string>(source.string());
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(*file, e.mark.line + 1, "", e.msg);
  }
  Field f(root, "", file, 1);
  if (!f.defined() || !root.IsMap()) f.fail("expected a mapping at the top level");
  const Field s = f["schema"];
  if (!s.defined()) f.fail("missing 'schema: " + schema + "' header");
  if (s.str() != schema) s.fail("expected schema '" + schema + "', got '" + s.str() + "'");
  return f;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot read file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path relative_to(const Field& f, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return path;
  return std::filesystem::path(f.file()).parent_path() / path;
}

IntRange int_range(const Field& f) {
  if (!f.defined()) f.fail("missing");
  IntRange r;
  if (f.is_seq()) {
    if (f.size() != 2) f.fail("expected [lo, hi]");
    r.lo = static_cast<int>(f.at(0).integer());
    r.hi = static_cast<int>(f.at(1).integer());
  } else {
    r.lo = r.hi = static_cast<int>(f.integer());
  }
  if (r.lo < 0 || r.hi < r.lo) f.fail("need 0 <= lo <= hi");
  return r;
}

SpeedRange real_range(const Field& f) {
  SpeedRange r;
  if (f.is_seq()) {
    if (f.size() != 2) f.fail("expected [lo, hi]");
    r.lo = f.at(0).num();
    r.hi = f.at(1).num();
  } else {
    r.lo = r.hi = f.num();
  }
  if (r.lo < 0 || r.hi < r.lo) f.fail("need 0 <= lo <= hi");
  return r;
}

void require_plugin(const Field& f, const std::string& name) {
  if (!PluginRegistry::global().contains(name)) {
    throw UnknownPlugin(name, f.file(), f.line(), f.path());
  }
}

StaticObstacle parse_shape(const Field& f) {
  f.allow({"shape", "center", "radius", "size"});
  StaticObstacle o;
  const std::string shape = f["shape"].defined() ? f["shape"].str() : "circle";
  if (shape == "circle") {
    o.shape = StaticObstacle::Shape::Circle;
    if (!f["radius"].defined()) f.fail("circle needs 'radius'");
    o.radius = f["radius"].num();
    if (!(o.radius > 0.0)) f["radius"].fail("must be > 0");
  } else if (shape == "rect") {
    o.shape = StaticObstacle::Shape::Rect;
    if (!f["size"].defined()) f.fail("rect needs 'size'");
    o.size = f["size"].vec2();
    if (!(o.size.x() > 0.0 && o.size.y() > 0.0)) f["size"].fail("must be positive");
  } else {
    f["shape"].fail("expected 'circle' or 'rect'");
  }
  o.center = f["center"].defined() ? f["center"].vec2() : Vec2::Zero();
  return o;
}

Zone parse_zone(const Field& f) {
  const StaticObstacle s = parse_shape(f);
  Zone z;
  z.shape = s.shape == StaticObstacle::Shape::Circle ? Zone::Shape::Circle : Zone::Shape::Rect;
  z.center = s.center;
  z.radius = s.radius;
  z.size = s.size;
  return z;
}

std::vector<Zone> parse_zones(const Field& f) {
  std::vector<Zone> out;
  if (!f.defined()) return out;
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(parse_zone(f.at(i)));
  return out;
}

MapSpec parse_map(const Field& f) {
  f.allow({"generator", "params", "size", "resolution", "seed", "file"});
  MapSpec m;
  if (f["file"].defined()) {
    if (f["generator"].defined()) f.fail("give either 'file' or 'generator'");
    m.source = MapSpec::Source::File;
    m.file = relative_to(f, f["file"].str());
    return m;
  }
  if (!f["generator"].defined()) f.fail("map needs 'generator' or 'file'");
  const auto algo = algorithm_from_name(f["generator"].str());
  if (!algo) f["generator"].fail("unknown generator '" + f["generator"].str() + "'");
  m.generator = GeneratorParams::defaults(*algo);
  if (const Field p = f["params"]; p.defined()) {
    for (const auto& k : p.keys()) {
      try {
        m.generator.set(k, p[k].num());
      } catch (const ConfigError& e) {
        p[k].fail("not a parameter of " + f["generator"].str());
      }
    }
  }
  try {
    m.generator.validate();
  } catch (const ConfigError& e) {
    const Field p = f["params"];
    if (p.defined() && p[e.field].defined()) p[e.field].fail(e.what());
    f.fail(e.what());
  }
  if (const Field s = f["size"]; s.defined()) {
    const Vec2 wh = s.vec2();
    if (wh.x() != std::floor(wh.x()) || wh.y() != std::floor(wh.y()) || wh.x() < 5 || wh.y() < 5) {
      s.fail("expected integer cell counts >= 5");
    }
    m.size.width = static_cast<int>(wh.x());
    m.size.height = static_cast<int>(wh.y());
  }
  f.read("resolution", m.size.resolution);
  if (!(m.size.resolution > 0.0)) f["resolution"].fail("must be > 0");
  if (f["seed"].defined()) m.seed = f["seed"].u64();
  return m;
}

void parse_sfm(const Field& f, SfmParams& p) {
  if (!f.defined()) return;
  f.allow({"relaxation_time", "repulsion_strength", "repulsion_range", "anisotropy", "cutoff",
           "robot_body_repulsion", "border_strength", "border_range", "group_gaze", "group_attraction",
           "group_repulsion", "group_repulsion_range", "vision_half_angle", "evacuation_factor",
           "exit", "bond_stiffness", "bond_rest_length", "bonds", "spin_radius", "orca_horizon",
           "max_speed"});
  f.read("relaxation_time", p.relaxation_time);
  f.read("repulsion_strength", p.repulsion_strength);
  f.read("repulsion_range", p.repulsion_range);
  f.read("anisotropy", p.anisotropy);
  f.read("cutoff", p.cutoff);
  f.read("robot_body_repulsion", p.robot_body_repulsion);
  f.read("border_strength", p.border_strength);
  f.read("border_range", p.border_range);
  f.read("group_gaze", p.group_gaze);
  f.read("group_attraction", p.group_attraction);
  f.read("group_repulsion", p.group_repulsion);
  f.read("group_repulsion_range", p.group_repulsion_range);
  f.read("vision_half_angle", p.vision_half_angle);
  f.read("evacuation_factor", p.evacuation_factor);
  if (f["exit"].defined()) p.exit = f["exit"].vec2();
  f.read("bond_stiffness", p.bond_stiffness);
  f.read("bond_rest_length", p.bond_rest_length);
  if (const Field b = f["bonds"]; b.defined()) {
    p.bonds.clear();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const Vec2 pair = b.at(i).vec2();
      p.bonds.emplace_back(static_cast<int>(pair.x()), static_cast<int>(pair.y()));
    }
  }
  f.read("spin_radius", p.spin_radius);
  f.read("orca_horizon", p.orca_horizon);
  f.read("max_speed", p.max_speed);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    const std::string key = e.field.substr(e.field.find('.') + 1);
    if (f[key].defined()) f[key].fail(e.what() + std::string());
    f.fail(e.what());
  }
}

void parse_social(const Field& f, SocialStateParams& p) {
  if (!f.defined()) return;
  f.allow({"walking_speed", "running_threshold", "avoid_radius", "interest_radius",
           "interest_rate", "approach_speed", "approach_radius", "dwell", "avoid_speed_factor",
           "standoff", "gather_radius", "arrival_time"});
  if (f["walking_speed"].defined()) p.walking_speed = real_range(f["walking_speed"]);
  f.read("running_threshold", p.running_threshold);
  f.read("avoid_radius", p.avoid_radius);
  f.read("interest_radius", p.interest_radius);
  f.read("interest_rate", p.interest_rate);
  f.read("approach_speed", p.approach_speed);
  f.read("approach_radius", p.approach_radius);
  if (f["dwell"].defined()) p.dwell = real_range(f["dwell"]);
  f.read("avoid_speed_factor", p.avoid_speed_factor);
  f.read("standoff", p.standoff);
  f.read("gather_radius", p.gather_radius);
  f.read("arrival_time", p.arrival_time);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
}

void parse_limits(const Field& f, EpisodeLimits& l) {
  if (!f.defined()) return;
  f.allow({"dt", "timeout", "goal_tolerance", "max_collisions", "replan_period",
           "collision_rearm"});
  f.read("dt", l.dt);
  f.read("timeout", l.timeout);
  f.read("goal_tolerance", l.goal_tolerance);
  f.read("max_collisions", l.max_collisions);
  f.read("replan_period", l.replan_period);
  f.read("collision_rearm", l.collision_rearm);
  if (!(l.dt > 0.0)) f["dt"].fail("must be > 0");
  if (!(l.timeout > 0.0)) f["timeout"].fail("must be > 0");
  if (!(l.goal_tolerance > 0.0)) f["goal_tolerance"].fail("must be > 0");
  if (l.max_collisions < 1) f["max_collisions"].fail("must be >= 1");
  if (!(l.replan_period > 0.0)) f["replan_period"].fail("must be > 0");
  if (!(l.collision_rearm >= 0.0)) f["collision_rearm"].fail("must be >= 0");
}

void parse_metrics(const Field& f, MetricsParams& m) {
  if (!f.defined()) return;
  f.allow({"facing_angle_deg", "facing_range", "private_zone", "curvature_spacing"});
  if (f["facing_angle_deg"].defined()) m.cone.half_angle = f["facing_angle_deg"].num() * kPi / 180.0;
  f.read("facing_range", m.cone.range);
  f.read("private_zone", m.private_zone);
  f.read("curvature_spacing", m.curvature_spacing);
  try {
    m.validate();
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
}

void parse_interplanner(const Field& f, InterplannerParams& p) {
  if (!f.defined()) return;
  f.allow({"trigger_distance", "window", "aggressive_speed", "aggressive_clearance_weight",
           "polite_speed", "polite_clearance_weight", "polite_clearance",
           "polite_personal_space", "sideways_offset", "sideways_ramp"});
  f.read("trigger_distance", p.trigger_distance);
  f.read("window", p.window);
  f.read("aggressive_speed", p.aggressive_speed);
  f.read("aggressive_clearance_weight", p.aggressive_clearance_weight);
  f.read("polite_speed", p.polite_speed);
  f.read("polite_clearance_weight", p.polite_clearance_weight);
  f.read("polite_clearance", p.polite_clearance);
  f.read("polite_personal_space", p.polite_personal_space);
  f.read("sideways_offset", p.sideways_offset);
  f.read("sideways_ramp", p.sideways_ramp);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
}

void parse_dwa(const Field& f, DwaParams& p) {
  if (!f.defined()) return;
  f.allow({"horizon", "sim_step", "control_period", "linear_samples", "angular_samples",
           "path_weight", "heading_weight", "clearance_weight", "speed_weight",
           "cruise_fraction", "clearance_cap", "path_cap", "heading_gain"});
  f.read("horizon", p.horizon);
  f.read("sim_step", p.sim_step);
  f.read("control_period", p.control_period);
  f.read("linear_samples", p.linear_samples);
  f.read("angular_samples", p.angular_samples);
  f.read("path_weight", p.path_weight);
  f.read("heading_weight", p.heading_weight);
  f.read("clearance_weight", p.clearance_weight);
  f.read("speed_weight", p.speed_weight);
  f.read("cruise_fraction", p.cruise_fraction);
  f.read("clearance_cap", p.clearance_cap);
  f.read("path_cap", p.path_cap);
  f.read("heading_gain", p.heading_gain);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    f.fail(e.what());
  }
}

SocialState parse_state(const Field& f) {
  const auto s = state_from_name(f.str());
  if (!s) f.fail("unknown social state '" + f.str() + "'");
  return *s;
}

ScenarioSpec parse_scenario(const Field& root) {
  root.allow({"schema", "map", "robot", "obstacles", "pedestrians", "forbidden_zones", "seed"});
  ScenarioSpec s;
  s.source = root.file();
  if (!root["map"].defined()) root.fail("scenario needs a 'map'");
  s.map = parse_map(root["map"]);
  const Field robot = root["robot"];
  if (!robot.defined()) root.fail("scenario needs a 'robot' with start and goal");
  robot.allow({"start", "goal"});
  if (!robot["start"].defined() || !robot["goal"].defined()) robot.fail("needs 'start' and 'goal'");
  s.robot_start = robot["start"].pose();
  s.robot_goal = robot["goal"].vec2();
  if (const Field obs = root["obstacles"]; obs.defined()) {
    for (std::size_t i = 0; i < obs.size(); ++i) s.obstacles.push_back(parse_shape(obs.at(i)));
  }
  if (const Field peds = root["pedestrians"]; peds.defined()) {
    std::set<int> ids;
    for (std::size_t i = 0; i < peds.size(); ++i) {
      const Field p = peds.at(i);
      p.allow({"id", "spawn", "waypoints", "cyclic", "plugin", "group", "state", "speed"});
      PedestrianSpec ped;
      ped.id = p["id"].defined() ? static_cast<int>(p["id"].integer()) : static_cast<int>(i);
      if (!ids.insert(ped.id).second) p["id"].fail("duplicate pedestrian id");
      if (!p["spawn"].defined()) p.fail("needs 'spawn'");
      ped.spawn = p["spawn"].vec2();
      if (p["waypoints"].defined()) ped.waypoints = p["waypoints"].points();
      p.read("cyclic", ped.cyclic);
      p.read("plugin", ped.plugin);
      require_plugin(p["plugin"], ped.plugin);
      if (p["group"].defined()) ped.group = static_cast<int>(p["group"].integer());
      if (p["state"].defined()) ped.state = parse_state(p["state"]);
      if (p["speed"].defined()) {
        ped.speed = p["speed"].num();
        if (*ped.speed < 0.0) p["speed"].fail("must be >= 0");
      }
      s.pedestrians.push_back(std::move(ped));
    }
  }
  s.forbidden = parse_zones(root["forbidden_zones"]);
  if (root["seed"].defined()) s.seed = root["seed"].u64();
  return s;
}

std::vector<ModelSpec> parse_models(const Field& root) {
  root.allow({"schema", "models"});
  std::vector<ModelSpec> out;
  const Field models = root["models"];
  if (!models.defined()) root.fail("needs 'models'");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const Field m = models.at(i);
    m.allow({"model", "count", "footprint"});
    ModelSpec spec;
    if (!m["model"].defined()) m.fail("needs 'model'");
    spec.model = m["model"].str();
    spec.count = int_range(m["count"]);
    if (!m["footprint"].defined()) m.fail("needs 'footprint'");
    spec.footprint = parse_shape(m["footprint"]);
    out.push_back(std::move(spec));
  }
  return out;
}

ObstacleMode parse_obstacles(const Field& f) {
  ObstacleMode o;
  if (!f.defined()) return o;
  f.allow({"mode", "pedestrians", "static", "static_radius", "waypoints", "plugin",
           "group_probability", "group_size", "initial_states", "models", "scenario"});
  const std::string mode = f["mode"].defined() ? f["mode"].str() : "random";
  if (mode == "random") {
    o.kind = ObstacleModeKind::Random;
  } else if (mode == "parametrized") {
    o.kind = ObstacleModeKind::Parametrized;
  } else if (mode == "scenario") {
    o.kind = ObstacleModeKind::Scenario;
  } else {
    f["mode"].fail("expected random, parametrized or scenario");
  }
  if (f["pedestrians"].defined()) o.pedestrians = int_range(f["pedestrians"]);
  if (f["static"].defined()) o.static_obstacles = int_range(f["static"]);
  if (f["static_radius"].defined()) {
    o.static_radius = real_range(f["static_radius"]);
    if (!(o.static_radius.lo > 0.0)) f["static_radius"].fail("must be > 0");
  }
  if (f["waypoints"].defined()) {
    o.waypoints = int_range(f["waypoints"]);
    if (o.waypoints.lo < 1) f["waypoints"].fail("need at least one waypoint");
  }
  f.read("plugin", o.plugin);
  require_plugin(f["plugin"], o.plugin);
  f.read("group_probability", o.group_probability);
  if (!(o.group_probability >= 0.0 && o.group_probability <= 1.0)) {
    f["group_probability"].fail("must be in [0, 1]");
  }
  if (f["group_size"].defined()) {
    o.group_size = int_range(f["group_size"]);
    if (o.group_size.lo < 2) f["group_size"].fail("groups need at least 2 members");
  }
  if (const Field s = f["initial_states"]; s.defined()) {
    double total = 0.0;
    for (const auto& k : s.keys()) {
      const auto st = state_from_name(k);
      if (!st) s[k].fail("unknown social state '" + k + "'");
      const double w = s[k].num();
      if (w < 0.0) s[k].fail("weight must be >= 0");
      o.initial_states.emplace_back(*st, w);
      total += w;
    }
    if (!(total > 0.0)) s.fail("weights must not all be zero");
  }
  if (o.kind == ObstacleModeKind::Parametrized) {
    if (!f["models"].defined()) f.fail("parametrized mode needs a 'models' catalog file");
    o.models = load_model_catalog(relative_to(f, f["models"].str()));
  }
  if (o.kind == ObstacleModeKind::Scenario) {
    if (!f["scenario"].defined()) f.fail("scenario mode needs a 'scenario' file");
    o.scenario = std::make_shared<ScenarioSpec>(load_scenario(relative_to(f, f["scenario"].str())));
  }
  return o;
}

RobotMode parse_robot_mode(const Field& f) {
  RobotMode r;
  if (!f.defined()) return r;
  f.allow({"mode", "waypoints", "min_goal_distance"});
  const std::string mode = f["mode"].defined() ? f["mode"].str() : "random";
  if (mode == "random") {
    r.kind = RobotModeKind::Random;
  } else if (mode == "scenario") {
    r.kind = RobotModeKind::Scenario;
  } else if (mode == "explore") {
    r.kind = RobotModeKind::Explore;
  } else if (mode == "waypoints") {
    r.kind = RobotModeKind::Waypoints;
    const Field w = f["waypoints"];
    if (!w.defined()) f.fail("waypoints mode needs 'waypoints' (a list or a file)");
    if (w.is_seq()) {
      r.waypoints = w.points();
    } else {
      const std::filesystem::path p = relative_to(w, w.str());
      const Field root = parse_root(slurp(p), p, "waypoints/1");
      root.allow({"schema", "waypoints"});
      if (!root["waypoints"].defined()) root.fail("needs 'waypoints'");
      r.waypoints = root["waypoints"].points();
    }
    if (r.waypoints.size() < 2) w.fail("need at least two waypoints");
  } else {
    f["mode"].fail("expected random, scenario, waypoints or explore");
  }
  f.read("min_goal_distance", r.min_goal_distance);
  if (!(r.min_goal_distance >= 0.0)) f["min_goal_distance"].fail("must be >= 0");
  return r;
}

CurriculumStage parse_curriculum_stage(const Field& f) {
  f.allow({"obstacles", "map"});
  CurriculumStage s;
  s.obstacles = parse_obstacles(f["obstacles"]);
  if (f["map"].defined()) s.map = parse_map(f["map"]);
  return s;
}

StageSpec parse_stage(const Field& f, const BenchmarkConfig& cfg, const EpisodeLimits& limits,
                      const SfmParams& sfm, const SocialStateParams& social) {
  f.allow({"name", "episodes", "seed_base", "map", "dynamic_map", "obstacles", "robot",
           "forbidden_zones", "limits", "sfm", "social", "curriculum", "pedestrian_radius"});
  (void)cfg;
  StageSpec s;
  if (!f["name"].defined()) f.fail("stage needs a 'name'");
  s.name = f["name"].str();
  if (s.name.empty() || s.name.find_first_of(",\n\r\"") != std::string::npos) {
    f["name"].fail("stage names must be non-empty and free of commas and quotes");
  }
  if (!f["episodes"].defined()) f.fail("stage needs 'episodes'");
  s.episodes = static_cast<int>(f["episodes"].integer());
  if (s.episodes < 1) f["episodes"].fail("must be >= 1");
  if (f["seed_base"].defined()) s.seed_base = f["seed_base"].u64();
  s.limits = limits;
  parse_limits(f["limits"], s.limits);
  s.sfm = sfm;
  parse_sfm(f["sfm"], s.sfm);
  s.social = social;
  parse_social(f["social"], s.social);
  f.read("dynamic_map", s.dynamic_map);
  f.read("pedestrian_radius", s.pedestrian_radius);
  if (!(s.pedestrian_radius > 0.0)) f["pedestrian_radius"].fail("must be > 0");
  s.obstacles = parse_obstacles(f["obstacles"]);
  s.robot = parse_robot_mode(f["robot"]);
  s.forbidden = parse_zones(f["forbidden_zones"]);
  bool have_map = false;
  if (const Field c = f["curriculum"]; c.defined()) {
    c.allow({"file", "stage"});
    if (!c["file"].defined() || !c["stage"].defined()) c.fail("needs 'file' and 'stage'");
    if (f["obstacles"].defined()) f.fail("give either 'obstacles' or 'curriculum'");
    CurriculumStage cs;
    try {
      cs = staged_curriculum(relative_to(c, c["file"].str()), static_cast<int>(c["stage"].integer()));
    } catch (const StageOutOfRange& e) {
      c["stage"].fail(e.what());
    }
    s.obstacles = cs.obstacles;
    if (cs.map) {
      s.map = *cs.map;
      have_map = true;
    }
  }
  if (f["map"].defined()) {
    s.map = parse_map(f["map"]);
    have_map = true;
  }
  if (s.obstacles.kind == ObstacleModeKind::Scenario) {
    if (!have_map) s.map = s.obstacles.scenario->map;
    if (f["robot"].defined() && s.robot.kind != RobotModeKind::Scenario &&
        s.robot.kind != RobotModeKind::Random) {
      f["robot"].fail("scenario obstacles combine with scenario or random robot modes");
    }
    if (!f["robot"].defined()) s.robot.kind = RobotModeKind::Scenario;
  } else {
    if (!have_map) f.fail("stage needs a 'map' (or a curriculum stage that provides one)");
    if (s.robot.kind == RobotModeKind::Scenario) {
      f["robot"].fail("robot mode 'scenario' needs scenario obstacles");
    }
  }
  return s;
}

json to_json(const MapSpec& m) {
  json j;
  if (m.source == MapSpec::Source::File) {
    j["file"] = m.file.string();
    std::ifstream in(m.file, std::ios::binary);
    std::vector<unsigned char> b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    j["file_hash"] = fnv1a(b);
    return j;
  }
  j["generator"] = std::string(algorithm_name(m.generator.algorithm));
  j["params"] = m.generator.values;
  j["size"] = {m.size.width, m.size.height};
  j["resolution"] = m.size.resolution;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  return j;
}

json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

json to_json(const StaticObstacle& o) {
  json j;
  j["shape"] = o.shape == StaticObstacle::Shape::Circle ? "circle" : "rect";
  j["center"] = to_json(o.center);
  if (o.shape == StaticObstacle::Shape::Circle) {
    j["radius"] = o.radius;
  } else {
    j["size"] = to_json(o.size);
  }
  return j;
}

json to_json(const Zone& z) {
  StaticObstacle o;
  o.shape = z.shape == Zone::Shape::Circle ? StaticObstacle::Shape::Circle : StaticObstacle::Shape::Rect;
  o.center = z.center;
  o.radius = z.radius;
  o.size = z.size;
  return to_json(o);
}

json to_json(const ScenarioSpec& s) {
  json j;
  j["map"] = to_json(s.map);
  j["robot"] = {{"start", {s.robot_start.x, s.robot_start.y, s.robot_start.theta}},
                {"goal", to_json(s.robot_goal)}};
  j["obstacles"] = json::array();
  for (const auto& o : s.obstacles) j["obstacles"].push_back(to_json(o));
  j["pedestrians"] = json::array();
  for (const auto& p : s.pedestrians) {
    json pj;
    pj["id"] = p.id;
    pj["spawn"] = to_json(p.spawn);
    pj["waypoints"] = json::array();
    for (const auto& w : p.waypoints) pj["waypoints"].push_back(to_json(w));
    pj["cyclic"] = p.cyclic;
    pj["plugin"] = p.plugin;
    pj["group"] = p.group ? json(*p.group) : json(nullptr);
    pj["state"] = std::string(state_name(p.state));
    pj["speed"] = p.speed ? json(*p.speed) : json(nullptr);
    j["pedestrians"].push_back(pj);
  }
  j["forbidden_zones"] = json::array();
  for (const auto& z : s.forbidden) j["forbidden_zones"].push_back(to_json(z));
  j["seed"] = s.seed ? json(*s.seed) : json(nullptr);
  return j;
}

json to_json(const SfmParams& p) {
  json bonds = json::array();
  for (const auto& [a, b] : p.bonds) bonds.push_back({a, b});
  return {{"relaxation_time", p.relaxation_time},
          {"repulsion_strength", p.repulsion_strength},
          {"repulsion_range", p.repulsion_range},
          {"anisotropy", p.anisotropy},
          {"cutoff", p.cutoff},
          {"robot_body_repulsion", p.robot_body_repulsion},
          {"border_strength", p.border_strength},
          {"border_range", p.border_range},
          {"group_gaze", p.group_gaze},
          {"group_attraction", p.group_attraction},
          {"group_repulsion", p.group_repulsion},
          {"group_repulsion_range", p.group_repulsion_range},
          {"vision_half_angle", p.vision_half_angle},
          {"evacuation_factor", p.evacuation_factor},
          {"exit", to_json(p.exit)},
          {"bond_stiffness", p.bond_stiffness},
          {"bond_rest_length", p.bond_rest_length},
          {"bonds", bonds},
          {"spin_radius", p.spin_radius},
          {"orca_horizon", p.orca_horizon},
          {"max_speed", p.max_speed}};
}

json to_json(const SocialStateParams& p) {
  return {{"walking_speed", {p.walking_speed.lo, p.walking_speed.hi}},
          {"running_threshold", p.running_threshold},
          {"avoid_radius", p.avoid_radius},
          {"interest_radius", p.interest_radius},
          {"interest_rate", p.interest_rate},
          {"approach_speed", p.approach_speed},
          {"approach_radius", p.approach_radius},
          {"dwell", {p.dwell.lo, p.dwell.hi}},
          {"avoid_speed_factor", p.avoid_speed_factor},
          {"standoff", p.standoff},
          {"gather_radius", p.gather_radius},
          {"arrival_time", p.arrival_time}};
}

json to_json(const ObstacleMode& o) {
  static const char* kinds[] = {"scenario", "random", "parametrized"};
  json j;
  j["mode"] = kinds[static_cast<int>(o.kind)];
  j["pedestrians"] = {o.pedestrians.lo, o.pedestrians.hi};
  j["static"] = {o.static_obstacles.lo, o.static_obstacles.hi};
  j["static_radius"] = {o.static_radius.lo, o.static_radius.hi};
  j["waypoints"] = {o.waypoints.lo, o.waypoints.hi};
  j["plugin"] = o.plugin;
  j["group_probability"] = o.group_probability;
  j["group_size"] = {o.group_size.lo, o.group_size.hi};
  j["initial_states"] = json::array();
  for (const auto& [s, w] : o.initial_states) {
    j["initial_states"].push_back({std::string(state_name(s)), w});
  }
  j["models"] = json::array();
  for (const auto& m : o.models) {
    j["models"].push_back({{"model", m.model},
                           {"count", {m.count.lo, m.count.hi}},
                           {"footprint", to_json(m.footprint)}});
  }
  j["scenario"] = o.scenario ? to_json(*o.scenario) : json(nullptr);
  return j;
}

json to_json(const StageSpec& s, std::uint64_t seed_base) {
  static const char* robot_kinds[] = {"scenario", "random", "waypoints", "explore"};
  json j;
  j["name"] = s.name;
  j["episodes"] = s.episodes;
  j["seed_base"] = seed_base;
  j["map"] = to_json(s.map);
  j["dynamic_map"] = s.dynamic_map;
  j["obstacles"] = to_json(s.obstacles);
  json robot;
  robot["mode"] = robot_kinds[static_cast<int>(s.robot.kind)];
  robot["waypoints"] = json::array();
  for (const auto& w : s.robot.waypoints) robot["waypoints"].push_back(to_json(w));
  robot["min_goal_distance"] = s.robot.min_goal_distance;
  j["robot"] = robot;
  j["forbidden_zones"] = json::array();
  for (const auto& z : s.forbidden) j["forbidden_zones"].push_back(to_json(z));
  j["limits"] = {{"dt", s.limits.dt},
                 {"timeout", s.limits.timeout},
                 {"goal_tolerance", s.limits.goal_tolerance},
                 {"max_collisions", s.limits.max_collisions},
                 {"replan_period", s.limits.replan_period},
                 {"collision_rearm", s.limits.collision_rearm}};
  j["sfm"] = to_json(s.sfm);
  j["social"] = to_json(s.social);
  j["pedestrian_radius"] = s.pedestrian_radius;
  return j;
}

}  // namespace

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return parse_scenario(parse_root(slurp(path), path, "scenario/1"));
}

std::vector<ModelSpec> load_model_catalog(const std::filesystem::path& path) {
  return parse_models(parse_root(slurp(path), path, "models/1"));
}

std::vector<CurriculumStage> load_curriculum(const std::filesystem::path& path) {
  const Field root = parse_root(slurp(path), path, "curriculum/1");
  root.allow({"schema", "stages"});
  const Field stages = root["stages"];
  if (!stages.defined()) root.fail("needs 'stages'");
  std::vector<CurriculumStage> out;
  for (std::size_t i = 0; i < stages.size(); ++i) out.push_back(parse_curriculum_stage(stages.at(i)));
  return out;
}

CurriculumStage staged_curriculum(const std::filesystem::path& path, int stage_index) {
  auto stages = load_curriculum(path);
  if (stage_index < 0 || static_cast<std::size_t>(stage_index) >= stages.size()) {
    throw StageOutOfRange("stage " + std::to_string(stage_index) + " outside curriculum of " +
                          std::to_string(stages.size()) + " stages");
  }
  return std::move(stages[static_cast<std::size_t>(stage_index)]);
}

RobotConfig load_robot_config(const std::filesystem::path& path) {
  const Field root = parse_root(slurp(path), path, "robot/1");
  root.allow({"schema", "name", "kinematics", "footprint_radius", "max_linear", "min_linear",
              "max_lateral", "max_angular", "max_linear_accel", "max_angular_accel", "wheelbase",
              "max_steering", "max_steering_rate"});
  RobotConfig c;
  c.name = path.stem().string();
  root.read("name", c.name);
  if (!root["kinematics"].defined()) root.fail("needs 'kinematics'");
  const auto k = kinematics_from_name(root["kinematics"].str());
  if (!k) root["kinematics"].fail("expected holonomic, differential or ackermann");
  c.kinematics = *k;
  root.read("footprint_radius", c.footprint_radius);
  root.read("max_linear", c.max_linear);
  root.read("min_linear", c.min_linear);
  root.read("max_lateral", c.max_lateral);
  root.read("max_angular", c.max_angular);
  root.read("max_linear_accel", c.max_linear_accel);
  root.read("max_angular_accel", c.max_angular_accel);
  root.read("wheelbase", c.wheelbase);
  root.read("max_steering", c.max_steering);
  root.read("max_steering_rate", c.max_steering_rate);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    if (root[e.field].defined()) root[e.field].fail(e.what());
    root.fail(e.what());
  }
  return c;
}

RobotConfig resolve_robot(const std::string& name_or_path) {
  const auto names = builtin_robot_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return builtin_robot(name_or_path);
  }
  if (std::filesystem::exists(name_or_path)) return load_robot_config(name_or_path);
  throw ConfigError("", 0, "robot",
                    "'" + name_or_path + "' is neither a built-in robot nor a robot file");
}

BenchmarkConfig parse_benchmark_config(const std::string& text,
                                       const std::filesystem::path& source) {
  const Field root = parse_root(text, source, "benchmark/1");
  root.allow({"schema", "name", "seed", "output", "robot", "planners", "limits", "metrics",
              "sfm", "social", "interplanner", "dwa", "stages"});
  BenchmarkConfig cfg;
  cfg.source = source;
  root.read("name", cfg.name);
  if (root["seed"].defined()) cfg.seed = root["seed"].u64();
  if (root["output"].defined()) cfg.output = relative_to(root, root["output"].str());
  root.read("robot", cfg.robot);
  if (const Field p = root["planners"]; p.defined()) {
    cfg.planners.clear();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string name = p.at(i).str();
      if (!InterplannerRegistry::global().contains(name)) {
        throw UnknownPlugin(name, p.at(i).file(), p.at(i).line(), p.at(i).path());
      }
      cfg.planners.push_back(name);
    }
    if (cfg.planners.empty()) p.fail("need at least one planner");
  }
  EpisodeLimits limits;
  parse_limits(root["limits"], limits);
  parse_metrics(root["metrics"], cfg.metrics);
  SfmParams sfm;
  parse_sfm(root["sfm"], sfm);
  SocialStateParams social;
  parse_social(root["social"], social);
  parse_interplanner(root["interplanner"], cfg.interplanner);
  parse_dwa(root["dwa"], cfg.dwa);
  const Field stages = root["stages"];
  if (!stages.defined() || stages.size() == 0) root.fail("needs at least one stage");
  std::set<std::string> names;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    StageSpec s = parse_stage(stages.at(i), cfg, limits, sfm, social);
    if (!names.insert(s.name).second) stages.at(i)["name"].fail("duplicate stage name '" + s.name + "'");
    cfg.stages.push_back(std::move(s));
  }
  return cfg;
}

BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
  return parse_benchmark_config(slurp(path), path);
}

void validate(const BenchmarkConfig& cfg) {
  std::set<std::string> names;
  const std::string file = cfg.source.string();
  if (cfg.stages.empty()) throw ConfigError(file, 0, "stages", "needs at least one stage");
  for (const auto& s : cfg.stages) {
    if (!names.insert(s.name).second) {
      throw ConfigError(file, 0, "stages", "duplicate stage name '" + s.name + "'");
    }
    if (s.episodes < 1) throw ConfigError(file, 0, "stages." + s.name + ".episodes", "must be >= 1");
    s.map.generator.validate();
    s.sfm.validate();
    s.social.validate();
    if (!PluginRegistry::global().contains(s.obstacles.plugin)) {
      throw UnknownPlugin(s.obstacles.plugin, file, 0, "stages." + s.name + ".obstacles.plugin");
    }
  }
  for (const auto& p : cfg.planners) {
    if (!InterplannerRegistry::global().contains(p)) throw UnknownPlugin(p, file, 0, "planners");
  }
  cfg.metrics.validate();
  cfg.interplanner.validate();
  cfg.dwa.validate();
}

std::string canonical_json(const BenchmarkConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  j["robot"] = cfg.robot;
  j["planners"] = cfg.planners;
  j["metrics"] = {{"facing_half_angle", cfg.metrics.cone.half_angle},
                  {"facing_range", cfg.metrics.cone.range},
                  {"private_zone", cfg.metrics.private_zone},
                  {"curvature_spacing", cfg.metrics.curvature_spacing},
                  {"success_max_collisions", cfg.metrics.success_max_collisions}};
  const auto& ip = cfg.interplanner;
  j["interplanner"] = {{"trigger_distance", ip.trigger_distance},
                       {"window", ip.window},
                       {"aggressive_speed", ip.aggressive_speed},
                       {"aggressive_clearance_weight", ip.aggressive_clearance_weight},
                       {"polite_speed", ip.polite_speed},
                       {"polite_clearance_weight", ip.polite_clearance_weight},
                       {"polite_clearance", ip.polite_clearance},
                       {"polite_personal_space", ip.polite_personal_space},
                       {"sideways_offset", ip.sideways_offset},
                       {"sideways_ramp", ip.sideways_ramp}};
  const auto& d = cfg.dwa;
  j["dwa"] = {{"horizon", d.horizon},
              {"sim_step", d.sim_step},
              {"control_period", d.control_period},
              {"linear_samples", d.linear_samples},
              {"angular_samples", d.angular_samples},
              {"path_weight", d.path_weight},
              {"heading_weight", d.heading_weight},
              {"clearance_weight", d.clearance_weight},
              {"speed_weight", d.speed_weight},
              {"cruise_fraction", d.cruise_fraction},
              {"clearance_cap", d.clearance_cap},
              {"path_cap", d.path_cap},
              {"heading_gain", d.heading_gain}};
  j["stages"] = json::array();
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    j["stages"].push_back(to_json(cfg.stages[i], stage_seed_base(cfg, i)));
  }
  return j.dump();
}

std::string config_hash(const BenchmarkConfig& cfg) {
  const std::string s = canonical_json(cfg);
  const std::uint64_t h =
      fnv1a({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace socnav
