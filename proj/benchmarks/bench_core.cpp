#include <socnav/dwa.hpp>
#include <socnav/errors.hpp>
#include <socnav/global_planner.hpp>
#include <socnav/map_gen.hpp>
#include <socnav/plugins.hpp>

#include <benchmark/benchmark.h>

using namespace socnav;

namespace {

GeneratedMap barn(int side, std::uint64_t seed) {
  GeneratorParams p = GeneratorParams::defaults(MapAlgorithm::Barn);
  p.set("fill_pct", 0.15);
  return generate_map(p, MapSize{side, side, 0.25}, seed);
}

void BM_DistanceTransform(benchmark::State& state) {
  const auto m = barn(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(distance_transform(m.grid));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_DistanceTransform)->Arg(64)->Arg(128)->Arg(256)->Complexity();

void BM_AStar(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  GeneratorParams p = GeneratorParams::defaults(MapAlgorithm::RosnavOutdoor);
  p.set("obstacle_num", side / 4);
  const auto m = generate_map(p, MapSize{side, side, 0.25}, 2);
  const auto d = distance_transform(m.grid);
  const auto g = PlanningGrid::inflate(m.grid, d, 0.3);
  CellIndex s{2, 2}, t{side - 3, side - 3};
  while (g.blocked(s.x, s.y)) ++s.x;
  while (g.blocked(t.x, t.y)) --t.x;
  try {
    astar(g, s, t);
  } catch (const NoPath&) {
    state.SkipWithError("no path");
    return;
  }
  for (auto _ : state) benchmark::DoNotOptimize(astar(g, s, t));
}
BENCHMARK(BM_AStar)->Arg(64)->Arg(128)->Arg(256);

void BM_PluginStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  WorldState w;
  for (int i = 0; i < n; ++i) {
    AgentState a;
    a.id = i;
    a.position = a.spawn = {rng.uniform(0, 30), rng.uniform(0, 30)};
    a.velocity = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    a.waypoints = {{rng.uniform(0, 30), rng.uniform(0, 30)}};
    if (i % 3 == 0) a.group_id = i / 9;
    w.agents.push_back(a);
  }
  PluginContext ctx;
  for (auto _ : state) {
    const auto frame = capture_frame(w, ctx.params.cutoff);
    benchmark::DoNotOptimize(plugin_step(frame, PluginKind::PySocial, ctx));
  }
}
BENCHMARK(BM_PluginStep)->Arg(10)->Arg(50)->Arg(200);

void BM_DwaControl(benchmark::State& state) {
  GridMap open(80, 80, 0.25);
  const auto d = distance_transform(open);
  const RobotConfig cfg = builtin_robot("jackal");
  RobotState r;
  r.pose = {10, 10, 0.3};
  r.vx = 0.4;
  const Path path = resample({{10, 10}, {18, 14}}, 0.25, PathSource::Global);
  DwaScene scene{&d, {}};
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    scene.obstacles.push_back({{12.0 + i % 4, 9.0 + i / 4}, {-0.5, 0.1}, 0.3});
  }
  for (auto _ : state) benchmark::DoNotOptimize(dwa_control(r, cfg, path, scene, DwaParams{}));
}
BENCHMARK(BM_DwaControl)->Arg(0)->Arg(8)->Arg(32);

void BM_GenerateMap(benchmark::State& state) {
  const auto algo = all_algorithms()[static_cast<std::size_t>(state.range(0))];
  const GeneratorParams p = GeneratorParams::defaults(algo);
  state.SetLabel(std::string(algorithm_name(algo)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_map(p, MapSize{}, seed++));
}
BENCHMARK(BM_GenerateMap)->DenseRange(0, 6);

}  // namespace
BENCHMARK_MAIN();
