// socnav command-line tool: run, generate-map, replay, plot-data.

#include <socnav/benchmark.hpp>
#include <socnav/errors.hpp>
#include <socnav/map_gen.hpp>
#include <socnav/map_io.hpp>
#include <socnav/metrics.hpp>
#include <socnav/trace.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace socnav;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct RunArgs {
  std::string config;
  std::vector<std::string> planners;
  std::string robot;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool record = false;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  BenchmarkConfig cfg;
  RunOptions opts;
  try {
    cfg = load_benchmark_config(a.config);
    for (const auto& p : a.planners) {
      for (auto& name : split(p, ',')) opts.planners.push_back(name);
    }
    if (!a.robot.empty()) opts.robot = a.robot;
    opts.seed = a.seed;
    opts.jobs = std::max(1, a.jobs);
    opts.record = a.record;
    if (!a.out.empty()) {
      opts.out = a.out;
    } else if (const char* env = std::getenv("SOCNAV_OUT"); env && *env && cfg.output.empty()) {
      opts.out = fs::path(env) / cfg.name;
    }
    cfg = resolve_run_config(std::move(cfg), opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  opts.on_episode = [](const EpisodeResult& r) {
    std::cerr << r.planner << ' ' << r.stage << '#' << r.episode;
    if (r.failed) {
      std::cerr << " FAILED: " << r.error << '\n';
    } else {
      std::cerr << (r.metrics.success ? " success" : " fail") << " collisions=" << r.metrics.collisions
                << " duration=" << format_double(r.metrics.duration) << '\n';
    }
  };
  try {
    const RunReport report = run_benchmark(cfg, opts);
    std::size_t failed = 0, total = 0;
    for (const auto& p : report.planners) {
      for (const auto& r : p.results) {
        ++total;
        failed += r.failed ? 1 : 0;
      }
    }
    std::cout << "config hash " << report.config_hash << ", seed " << report.seed << '\n'
              << total << " episodes (" << failed << " failed) written to " << report.out.string()
              << '\n';
  } catch (const std::exception& e) {
    std::cerr << "run aborted: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

struct MapArgs {
  std::string algorithm;
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  std::string seed_range;
  std::string size = "120x120";
  double resolution = 0.25;
  std::string out = "map";
};

int cmd_generate_map(const MapArgs& a) {
  GeneratorParams params;
  MapSize size;
  std::vector<std::uint64_t> seeds{a.seed};
  try {
    const auto algo = algorithm_from_name(a.algorithm);
    if (!algo) throw ConfigError("", 0, "algorithm", "unknown generator '" + a.algorithm + "'");
    params = GeneratorParams::defaults(*algo);
    for (const auto& kv : a.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("", 0, "param", "expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      double value = 0.0;
      try {
        value = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("", 0, key, "not a number: '" + kv.substr(eq + 1) + "'");
      }
      params.set(key, value);
    }
    params.validate();
    const auto wh = split(a.size, 'x');
    if (wh.size() != 2) throw ConfigError("", 0, "size", "expected WxH");
    size.width = std::stoi(wh[0]);
    size.height = std::stoi(wh[1]);
    size.resolution = a.resolution;
    if (size.width < 5 || size.height < 5 || !(size.resolution > 0.0)) {
      throw ConfigError("", 0, "size", "need at least 5x5 cells and a positive resolution");
    }
    if (!a.seed_range.empty()) {
      const auto colon = a.seed_range.find(':');
      if (colon == std::string::npos) throw ConfigError("", 0, "seed-range", "expected FIRST:LAST");
      const std::uint64_t lo = std::stoull(a.seed_range.substr(0, colon));
      const std::uint64_t hi = std::stoull(a.seed_range.substr(colon + 1));
      if (hi < lo) throw ConfigError("", 0, "seed-range", "LAST must not be below FIRST");
      seeds.clear();
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const fs::path stem(a.out);
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  for (const auto seed : seeds) {
    try {
      const GeneratedMap m = generate_map(params, size, seed);
      const fs::path target =
          a.seed_range.empty() ? stem : fs::path(stem.string() + "_" + std::to_string(seed));
      for (const auto& p : write_map_bundle(m.grid, target)) std::cout << p.string() << '\n';
    } catch (const PlacementExhausted& e) {
      std::cerr << "generation failed for seed " << seed << ": " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  return 0;
}

struct ReplayArgs {
  std::string trace;
  std::optional<double> facing_angle;
  std::optional<double> facing_range;
  std::optional<double> private_zone;
  std::string sidecar;
};

int cmd_replay(const ReplayArgs& a) {
  EpisodeTrace trace;
  try {
    trace = read_trace(a.trace);
  } catch (const TraceCorrupt& e) {
    std::cerr << "corrupt trace: " << e.what() << '\n';
    return kExitRuntime;
  }
  MetricsParams params;
  // A run directory keeps its cone next to the metrics.
  fs::path sidecar = a.sidecar;
  if (sidecar.empty()) {
    const fs::path guess = fs::path(a.trace).parent_path().parent_path().parent_path() /
                           ("metrics_" + trace.header.planner + ".json");
    if (fs::exists(guess)) sidecar = guess;
  }
  if (!sidecar.empty()) {
    const auto j = nlohmann::json::parse(slurp(sidecar));
    const auto& cone = j.at("facing_cone");
    params.cone.half_angle = cone.at("half_angle_rad").get<double>();
    params.cone.range = cone.at("range_m").get<double>();
    params.private_zone = cone.at("private_zone_m").get<double>();
  }
  if (a.facing_angle) params.cone.half_angle = *a.facing_angle * kPi / 180.0;
  if (a.facing_range) params.cone.range = *a.facing_range;
  if (a.private_zone) params.private_zone = *a.private_zone;

  EpisodeResult r;
  r.stage = trace.header.stage;
  r.episode = trace.header.episode;
  r.seed = trace.header.seed;
  r.planner = trace.header.planner;
  r.robot = trace.header.robot;
  r.metrics = compute_episode_metrics(trace, trace.header.goal, params);
  r.trajectory_hash = trace.trajectory_hash();
  std::cout << csv_header() << '\n' << csv_row(r) << '\n';
  return 0;
}

struct PlotArgs {
  std::vector<std::string> inputs;
  std::string group = "planner,stage";
  std::string out = "plot_data";
};

int cmd_plot_data(const PlotArgs& a) {
  std::vector<EpisodeResult> records;
  try {
    for (const auto& in : a.inputs) {
      auto rows = read_metrics_csv(slurp(in));
      records.insert(records.end(), rows.begin(), rows.end());
    }
  } catch (const std::exception& e) {
    std::cerr << "cannot read metrics: " << e.what() << '\n';
    return kExitRuntime;
  }
  const auto fields = split(a.group, ',');
  for (const auto& f : fields) {
    if (f != "planner" && f != "stage" && f != "robot") {
      std::cerr << "config error: group key must list planner, stage or robot, got '" << f << "'\n";
      return kExitConfig;
    }
  }
  const GroupKey key = [&](const EpisodeResult& r) {
    std::string k;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) k += '\t';
      k += fields[i] == "planner" ? r.planner : fields[i] == "stage" ? r.stage : r.robot;
    }
    return k;
  };
  // Groups follow first appearance, so this orders them by planner name.
  std::stable_sort(records.begin(), records.end(),
                   [](const EpisodeResult& x, const EpisodeResult& y) { return x.planner < y.planner; });
  const auto groups = aggregate(records, key);

  fs::create_directories(a.out);
  std::string head;
  for (const auto& f : fields) head += f + '\t';
  auto cell = [](const MetricSummary& s, double v) { return s.n ? format_double(v) : std::string(); };

  std::ofstream all(fs::path(a.out) / "aggregate.tsv", std::ios::binary);
  all << head << "episodes\tsuccess_rate\ttimeout_rate\tmetric\tn\tmean\tstd\tmin\tmax\n";
  std::map<std::string, std::ofstream> per_metric;
  for (const auto& g : groups) {
    for (const auto& s : g.metrics) {
      all << g.key << '\t' << g.episodes << '\t' << format_double(g.success_rate) << '\t'
          << format_double(g.timeout_rate) << '\t' << s.metric << '\t' << s.n << '\t'
          << cell(s, s.mean) << '\t' << cell(s, s.std) << '\t' << cell(s, s.min) << '\t'
          << cell(s, s.max) << '\n';
      auto it = per_metric.find(s.metric);
      if (it == per_metric.end()) {
        it = per_metric.emplace(s.metric, std::ofstream(fs::path(a.out) / (s.metric + ".tsv"),
                                                        std::ios::binary)).first;
        it->second << head << "n\tmean\tstd\tmin\tmax\n";
      }
      it->second << g.key << '\t' << s.n << '\t' << cell(s, s.mean) << '\t' << cell(s, s.std)
                 << '\t' << cell(s, s.min) << '\t' << cell(s, s.max) << '\n';
    }
  }
  std::cout << groups.size() << " groups written to " << a.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic social-navigation simulation and benchmarking"};
  app.set_version_flag("--version", std::string(engine_version()));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark config");
  run_cmd->add_option("-c,--config", run.config, "Benchmark config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-p,--planner", run.planners, "Planner name(s), comma separated");
  run_cmd->add_option("-r,--robot", run.robot, "Built-in robot name or robot config file");
  run_cmd->add_option("-s,--seed", run.seed, "Root seed (overrides the config)");
  run_cmd->add_option("-j,--jobs", run.jobs, "Parallel episodes")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--record", run.record, "Write per-episode traces");
  run_cmd->add_option("-o,--out", run.out, "Output directory (default: config output, else $SOCNAV_OUT/<name>)");

  MapArgs map;
  auto* map_cmd = app.add_subcommand("generate-map", "Generate a map bundle");
  map_cmd->add_option("-a,--algorithm", map.algorithm, "Generator name")->required();
  map_cmd->add_option("--param", map.params, "Generator parameter key=value (repeatable)");
  map_cmd->add_option("-s,--seed", map.seed, "Seed");
  map_cmd->add_option("--seed-range", map.seed_range, "Generate FIRST:LAST seeds (suffixes the stem)");
  map_cmd->add_option("--size", map.size, "Grid size in cells, WxH");
  map_cmd->add_option("--resolution", map.resolution, "Meters per cell");
  map_cmd->add_option("-o,--out", map.out, "Output path stem");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Recompute metrics from a trace");
  replay_cmd->add_option("trace", replay.trace, "Trace file")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--facing-angle", replay.facing_angle, "Facing cone half angle, degrees");
  replay_cmd->add_option("--facing-range", replay.facing_range, "Facing cone range, meters");
  replay_cmd->add_option("--private-zone", replay.private_zone, "Private zone radius, meters");
  replay_cmd->add_option("--sidecar", replay.sidecar, "metrics_<planner>.json holding the run's cone");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot-data", "Aggregate metrics CSVs into plot-ready tables");
  plot_cmd->add_option("inputs", plot.inputs, "Metrics CSV files")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("-g,--group", plot.group, "Group key fields: planner, stage, robot");
  plot_cmd->add_option("-o,--out", plot.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return cmd_run(run);
  if (*map_cmd) return cmd_generate_map(map);
  if (*replay_cmd) return cmd_replay(replay);
  if (*plot_cmd) return cmd_plot_data(plot);
  return 1;
}
