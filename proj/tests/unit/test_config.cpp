#include <socnav/config.hpp>
#include <socnav/errors.hpp>

#include <gtest/gtest.h>

#include <stdexcept>
#include <string>

using namespace socnav;

namespace {

const std::string kDir = SOCNAV_CONFIG_DIR;

const std::string kBase = R"(schema: benchmark/1
name: t
seed: 3
planners: [neutral, polite]
stages:
  - name: a
    episodes: 2
    map: {generator: barn, params: {fill_pct: 0.2}, size: [40, 40]}
    obstacles: {mode: random, pedestrians: [1, 3]}
)";

BenchmarkConfig parse(const std::string& text) {
  return parse_benchmark_config(text, kDir + "/benchmarks/inline.yaml");
}

template <class E = ConfigError>
E parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const E& e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  throw std::logic_error("expected error not raised");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST(Config, ShippedConfigsLoad) {
  for (const char* f : {"/benchmarks/desk.yaml", "/benchmarks/staged.yaml"}) {
    const auto cfg = load_benchmark_config(kDir + f);
    EXPECT_NO_THROW(validate(cfg)) << f;
  }
  const auto desk = load_benchmark_config(kDir + "/benchmarks/desk.yaml");
  int eps = 0;
  for (const auto& s : desk.stages) eps += s.episodes;
  EXPECT_EQ(eps, 20);
  EXPECT_EQ(desk.planners.size(), 4u);
  for (const char* r : {"jackal", "holonomic", "cart"}) {
    const auto c = load_robot_config(kDir + "/robots/" + r + ".yaml");
    EXPECT_EQ(c.kinematics, builtin_robot(r).kinematics) << r;
  }
  EXPECT_EQ(load_model_catalog(kDir + "/models/boxes.yaml").size(), 2u);
  EXPECT_EQ(load_scenario(kDir + "/scenarios/corridor.yaml").pedestrians.size(), 6u);
}

TEST(Config, ErrorNamesLineAndField) {
  const auto e = parse_error(replace(kBase, "episodes: 2", "episodes: -4"));
  EXPECT_EQ(e.line, 7);
  EXPECT_NE(e.field.find("episodes"), std::string::npos) << e.field;
  EXPECT_NE(std::string(e.what()).find("inline.yaml:7"), std::string::npos) << e.what();
}

TEST(Config, UnknownKeyRejected) {
  const auto e = parse_error(replace(kBase, "seed: 3", "seed: 3\nsede: 4"));
  EXPECT_EQ(e.line, 4);
  EXPECT_NE(std::string(e.what()).find("sede"), std::string::npos);
}

TEST(Config, WrongTypeRejected) {
  const auto e = parse_error(replace(kBase, "fill_pct: 0.2", "fill_pct: lots"));
  EXPECT_EQ(e.line, 8);
}

TEST(Config, SyntaxErrorHasLine) {
  const auto e = parse_error(replace(kBase, "episodes: 2", "episodes: [2"));
  EXPECT_GT(e.line, 0);
}

TEST(Config, WrongSchemaRejected) {
  EXPECT_THROW(parse(replace(kBase, "benchmark/1", "benchmark/9")), ConfigError);
}

TEST(Config, UnknownPlanner) {
  const auto e = parse_error<UnknownPlugin>(replace(kBase, "[neutral, polite]", "[neutral, rude]"));
  EXPECT_EQ(e.name, "rude");
  EXPECT_EQ(e.line, 4);
}

TEST(Config, UnknownForcePlugin) {
  const auto e = parse_error<UnknownPlugin>(
      replace(kBase, "pedestrians: [1, 3]}", "pedestrians: [1, 3], plugin: deep_social}"));
  EXPECT_EQ(e.name, "deep_social");
  EXPECT_EQ(e.line, 9);
}

TEST(Config, UnknownGeneratorParam) {
  const auto e = parse_error(replace(kBase, "fill_pct: 0.2", "chair_chance: 0.2"));
  EXPECT_EQ(e.line, 8);
}

TEST(Config, OutOfRangeGeneratorParam) {
  EXPECT_THROW(parse(replace(kBase, "fill_pct: 0.2", "fill_pct: 1.5")), ConfigError);
}

TEST(Config, CurriculumStageOutOfRange) {
  const auto e = parse_error(replace(kBase, "obstacles: {mode: random, pedestrians: [1, 3]}",
                                     "curriculum: {file: ../curricula/basic.yaml, stage: 7}"));
  EXPECT_EQ(e.field.find("stage") != std::string::npos, true) << e.field;
}

TEST(Config, HashIsStable) {
  EXPECT_EQ(config_hash(parse(kBase)), config_hash(parse(kBase)));
  EXPECT_EQ(config_hash(parse(kBase)).size(), 16u);
}

TEST(Config, HashIgnoresFormatting) {
  const std::string reformatted = replace(
      replace(kBase, "planners: [neutral, polite]", "planners:\n  - neutral\n  - polite"),
      "name: t", "name: t   # comment");
  EXPECT_EQ(config_hash(parse(kBase)), config_hash(parse(reformatted)));
  // Defaults spelled out change nothing.
  EXPECT_EQ(config_hash(parse(kBase)),
            config_hash(parse(replace(kBase, "seed: 3", "seed: 3\nlimits: {dt: 0.1}"))));
}

TEST(Config, HashTracksMeaningfulFields) {
  const std::string h = config_hash(parse(kBase));
  for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"seed: 3", "seed: 4"},
           {"episodes: 2", "episodes: 3"},
           {"fill_pct: 0.2", "fill_pct: 0.3"},
           {"[neutral, polite]", "[polite, neutral]"},
           {"pedestrians: [1, 3]", "pedestrians: [1, 4]"},
           {"seed: 3", "seed: 3\nlimits: {timeout: 100}"},
           {"seed: 3", "seed: 3\nsfm: {relaxation_time: 0.6}"},
           {"seed: 3", "seed: 3\ndwa: {cruise_fraction: 0.7}"},
           {"seed: 3", "seed: 3\nmetrics: {private_zone: 0.6}"},
       }) {
    EXPECT_NE(config_hash(parse(replace(kBase, from, to))), h) << to;
  }
}

TEST(Config, StageSeedBase) {
  auto cfg = parse(kBase);
  EXPECT_EQ(stage_seed_base(cfg, 0), 3u);
  cfg.stages.push_back(cfg.stages[0]);
  cfg.stages[1].name = "b";
  EXPECT_EQ(stage_seed_base(cfg, 1), 1003u);
  cfg.stages[1].seed_base = 42;
  EXPECT_EQ(stage_seed_base(cfg, 1), 42u);
}

TEST(Config, ValidateCatchesProgrammaticErrors) {
  auto cfg = parse(kBase);
  cfg.stages.push_back(cfg.stages[0]);
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.stages.pop_back();
  cfg.stages[0].episodes = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.stages[0].episodes = 1;
  cfg.planners.push_back("nope");
  EXPECT_THROW(validate(cfg), UnknownPlugin);
}

TEST(Config, ResolveRobot) {
  EXPECT_EQ(resolve_robot("cart").kinematics, Kinematics::Ackermann);
  EXPECT_EQ(resolve_robot(kDir + "/robots/holonomic.yaml").kinematics, Kinematics::Holonomic);
  EXPECT_THROW(resolve_robot("hovercraft"), ConfigError);
}

TEST(Config, ScenarioRobotModeNeedsScenario) {
  EXPECT_THROW(parse(replace(kBase, "pedestrians: [1, 3]}", "pedestrians: [1, 3]}\n    robot: {mode: scenario}")),
               ConfigError);
}
