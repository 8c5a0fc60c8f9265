#pragma once

#include "socnav/dwa.hpp"
#include "socnav/interplanner.hpp"
#include "socnav/map_gen.hpp"
#include "socnav/metrics.hpp"
#include "socnav/robot.hpp"
#include "socnav/sfm.hpp"
#include "socnav/social_states.hpp"
#include "socnav/world.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace socnav {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

/// Region excluded from random spawning.
struct Zone {
  enum class Shape { Circle, Rect };
  Shape shape = Shape::Circle;
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  Vec2 size = Vec2(1.0, 1.0);

  /// True when a disc of `margin` around p touches the zone.
  bool contains(const Vec2& p, double margin = 0.0) const;
};

struct MapSpec {
  enum class Source { Generator, File };
  Source source = Source::Generator;
  GeneratorParams generator = GeneratorParams::defaults(MapAlgorithm::Barn);
  MapSize size;
  std::filesystem::path file;  // metadata YAML for Source::File
  std::optional<std::uint64_t> seed;
};

struct PedestrianSpec {
  int id = 0;
  Vec2 spawn = Vec2::Zero();
  std::vector<Vec2> waypoints;
  bool cyclic = true;
  std::string plugin = "pysocial";
  std::optional<int> group;
  SocialState state = SocialState::Walking;
  std::optional<double> speed;
};

struct ScenarioSpec {
  std::filesystem::path source;
  MapSpec map;
  std::vector<StaticObstacle> obstacles;
  std::vector<PedestrianSpec> pedestrians;
  Pose2 robot_start;
  Vec2 robot_goal = Vec2::Zero();
  std::vector<Zone> forbidden;
  std::optional<std::uint64_t> seed;
};

/// One entry of a model catalog: spawn `count` copies of `footprint`.
struct ModelSpec {
  std::string model;
  IntRange count;
  StaticObstacle footprint;
};

enum class ObstacleModeKind { Scenario, Random, Parametrized };
enum class RobotModeKind { Scenario, Random, Waypoints, Explore };

struct ObstacleMode {
  ObstacleModeKind kind = ObstacleModeKind::Random;
  IntRange pedestrians{0, 0};
  IntRange static_obstacles{0, 0};
  SpeedRange static_radius{0.2, 0.5};
  IntRange waypoints{2, 4};
  std::string plugin = "pysocial";
  double group_probability = 0.0;
  IntRange group_size{2, 3};
  /// Initial social-state weights; empty means everyone walks.
  std::vector<std::pair<SocialState, double>> initial_states;
  std::vector<ModelSpec> models;
  std::shared_ptr<const ScenarioSpec> scenario;
};

struct RobotMode {
  RobotModeKind kind = RobotModeKind::Random;
  std::vector<Vec2> waypoints;
  double min_goal_distance = 5.0;
};

struct EpisodeLimits {
  double dt = 0.1;
  double timeout = 180.0;
  double goal_tolerance = 0.5;
  int max_collisions = 10;
  double replan_period = 2.0;
  double collision_rearm = 1.0;
};

/// Everything reset_episode needs for one stage.
struct StageSpec {
  std::string name;
  int episodes = 1;
  std::optional<std::uint64_t> seed_base;
  MapSpec map;
  bool dynamic_map = false;
  ObstacleMode obstacles;
  RobotMode robot;
  std::vector<Zone> forbidden;
  EpisodeLimits limits;
  SfmParams sfm;
  SocialStateParams social;
  double pedestrian_radius = 0.3;
};

struct BenchmarkConfig {
  std::filesystem::path source;
  std::string name = "benchmark";
  std::optional<std::uint64_t> seed;
  std::filesystem::path output;
  std::string robot = "jackal";
  std::vector<std::string> planners{"neutral"};
  MetricsParams metrics;
  InterplannerParams interplanner;
  DwaParams dwa;
  std::vector<StageSpec> stages;
};

/// Seed base of stage `index`: explicit, else seed + 1000 * index.
std::uint64_t stage_seed_base(const BenchmarkConfig& cfg, std::size_t index);

/// Parsers. All throw ConfigError with file, line and field, or
/// UnknownPlugin for unregistered plugin or planner names.
BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);
BenchmarkConfig parse_benchmark_config(const std::string& text,
                                       const std::filesystem::path& source = "<string>");
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::vector<ModelSpec> load_model_catalog(const std::filesystem::path& path);
RobotConfig load_robot_config(const std::filesystem::path& path);
/// Built-in name, or a path to a robot file.
RobotConfig resolve_robot(const std::string& name_or_path);

struct CurriculumStage {
  ObstacleMode obstacles;
  std::optional<MapSpec> map;
};
std::vector<CurriculumStage> load_curriculum(const std::filesystem::path& path);
/// Throws StageOutOfRange.
CurriculumStage staged_curriculum(const std::filesystem::path& path, int stage_index);

/// Cross-field checks (unique stage names, ranges, registered names).
void validate(const BenchmarkConfig& cfg);

/// Canonical JSON of the fully resolved config.
std::string canonical_json(const BenchmarkConfig& cfg);
/// Hex FNV-1a of canonical_json.
std::string config_hash(const BenchmarkConfig& cfg);

}  // namespace socnav
