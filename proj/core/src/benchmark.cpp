#include "socnav/benchmark.hpp"

#include "socnav/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#ifndef SOCNAV_VERSION
#define SOCNAV_VERSION "dev"
#endif

namespace socnav {

namespace fs = std::filesystem;
using nlohmann::json;

const char* engine_version() { return SOCNAV_VERSION; }

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

struct Manifest {
  json doc;
  fs::path path;
  std::vector<fs::path> files;

  void add(const fs::path& p) {
    if (std::find(files.begin(), files.end(), p) == files.end()) files.push_back(p);
  }
  void write(const fs::path& root, const std::string& status) {
    doc["status"] = status;
    json inv = json::array();
    for (const auto& f : files) inv.push_back(fs::relative(f, root).generic_string());
    doc["outputs"] = inv;
    write_text(path, doc.dump(2) + "\n");
  }
};

}  // namespace

std::string trace_file_name(const std::string& stage, int episode) {
  return stage + "_" + std::to_string(episode) + ".sntrace";
}

BenchmarkConfig resolve_run_config(BenchmarkConfig cfg, const RunOptions& opts) {
  if (!opts.planners.empty()) {
    for (const auto& p : opts.planners) {
      if (!InterplannerRegistry::global().contains(p)) {
        throw ConfigError("", 0, "planner", "unknown planner '" + p + "'");
      }
    }
    cfg.planners = opts.planners;
  }
  if (opts.robot) cfg.robot = *opts.robot;
  resolve_robot(cfg.robot);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!cfg.seed) {
    std::random_device rd;
    cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  if (!opts.out.empty()) cfg.output = opts.out;
  if (cfg.output.empty()) cfg.output = fs::path("socnav_out") / cfg.name;
  validate(cfg);
  return cfg;
}

void run_episodes(const TaskGenerator& gen, const std::vector<int>& episodes,
                  const EpisodeSettings& settings, int jobs,
                  const std::function<void(EpisodeResult&&, EpisodeTrace*)>& sink) {
  struct Slot {
    bool ready = false;
    EpisodeResult result;
    std::optional<EpisodeTrace> trace;
  };
  const std::size_t n = episodes.size();
  std::vector<Slot> slots(n);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      Slot s;
      EpisodeResult& r = s.result;
      r.stage = gen.stage().name;
      r.episode = episodes[i];
      r.seed = gen.episode_seed(episodes[i]);
      r.planner = settings.planner;
      r.robot = settings.robot.name;
      try {
        const EpisodeSetup setup = gen.reset(episodes[i]);
        EpisodeTrace trace = run_episode(setup, gen.stage(), settings);
        r.metrics = compute_episode_metrics(trace, setup.goal, settings.metrics);
        r.trajectory_hash = trace.trajectory_hash();
        s.trace = std::move(trace);
      } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
      }
      std::lock_guard lock(mu);
      slots[i].result = std::move(s.result);
      slots[i].trace = std::move(s.trace);
      slots[i].ready = true;
      cv.notify_all();
    }
  };

  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  if (threads == 1) work();

  for (std::size_t i = 0; i < n; ++i) {
    Slot s;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slots[i].ready; });
      s.result = std::move(slots[i].result);
      s.trace = std::move(slots[i].trace);
      slots[i].trace.reset();
    }
    sink(std::move(s.result), s.trace ? &*s.trace : nullptr);
  }
  for (auto& t : pool) t.join();
}

RunReport run_benchmark(const BenchmarkConfig& cfg, const RunOptions& opts) {
  RunReport report;
  report.config_hash = config_hash(cfg);
  report.seed = cfg.seed.value_or(0);
  report.out = cfg.output;
  fs::create_directories(report.out);

  const RobotConfig robot = resolve_robot(cfg.robot);
  std::vector<TaskGenerator> generators;
  json stages = json::array();
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const std::uint64_t base = stage_seed_base(cfg, i);
    generators.emplace_back(cfg.stages[i], base, robot);
    json seeds = json::array();
    for (int e = 0; e < cfg.stages[i].episodes; ++e) seeds.push_back(generators.back().episode_seed(e));
    stages.push_back({{"name", cfg.stages[i].name}, {"seed_base", base}, {"seeds", seeds}});
  }

  Manifest manifest;
  manifest.path = report.out / "manifest.json";
  manifest.doc["config_hash"] = report.config_hash;
  manifest.doc["engine_version"] = engine_version();
  manifest.doc["config"] = fs::absolute(cfg.source).generic_string();
  manifest.doc["seed"] = report.seed;
  manifest.doc["robot"] = robot.name;
  manifest.doc["planners"] = cfg.planners;
  manifest.doc["stages"] = stages;
  manifest.doc["record"] = opts.record;
  const fs::path resolved = report.out / "config.resolved.json";
  write_text(resolved, json::parse(canonical_json(cfg)).dump(2) + "\n");
  manifest.add(manifest.path);
  manifest.add(resolved);
  manifest.write(report.out, "running");

  const json cone = {{"half_angle_rad", cfg.metrics.cone.half_angle},
                     {"range_m", cfg.metrics.cone.range},
                     {"private_zone_m", cfg.metrics.private_zone}};

  for (const auto& planner : cfg.planners) {
    PlannerRun run;
    run.planner = planner;
    run.metrics_csv = report.out / ("metrics_" + planner + ".csv");
    run.aggregate_csv = report.out / ("aggregate_" + planner + ".csv");
    const fs::path sidecar = report.out / ("metrics_" + planner + ".json");
    const fs::path trace_dir = report.out / "traces" / planner;
    if (opts.record) fs::create_directories(trace_dir);

    std::ofstream csv(run.metrics_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error("cannot write " + run.metrics_csv.string());
    csv << csv_header() << '\n';
    csv.flush();
    manifest.add(run.metrics_csv);

    EpisodeSettings settings;
    settings.planner = planner;
    settings.robot = robot;
    settings.interplanner = cfg.interplanner;
    settings.dwa = cfg.dwa;
    settings.metrics = cfg.metrics;
    settings.config_hash = report.config_hash;

    for (const auto& gen : generators) {
      std::vector<int> eps(static_cast<std::size_t>(gen.stage().episodes));
      for (std::size_t e = 0; e < eps.size(); ++e) eps[e] = static_cast<int>(e);
      run_episodes(gen, eps, settings, opts.jobs, [&](EpisodeResult&& r, EpisodeTrace* trace) {
        csv << csv_row(r) << '\n';
        csv.flush();
        if (opts.record && trace) {
          const fs::path p = trace_dir / trace_file_name(r.stage, static_cast<int>(r.episode));
          write_trace(*trace, p);
          manifest.add(p);
        }
        if (opts.on_episode) opts.on_episode(r);
        run.results.push_back(std::move(r));
      });
    }
    csv.close();

    const auto groups = aggregate(run.results, aggregate_csv_key);
    std::string agg = aggregate_csv_header() + "\n";
    for (const auto& row : aggregate_csv_rows(groups)) agg += row + "\n";
    write_text(run.aggregate_csv, agg);
    manifest.add(run.aggregate_csv);

    json side;
    side["planner"] = planner;
    side["robot"] = robot.name;
    side["config_hash"] = report.config_hash;
    side["seed"] = report.seed;
    side["stages"] = stages;
    side["facing_cone"] = cone;
    side["episodes"] = run.results.size();
    json failures = json::array();
    for (const auto& r : run.results) {
      if (r.failed) failures.push_back({{"stage", r.stage}, {"episode", r.episode}, {"error", r.error}});
    }
    side["failed_episodes"] = failures;
    write_text(sidecar, side.dump(2) + "\n");
    manifest.add(sidecar);
    manifest.write(report.out, "running");
    report.planners.push_back(std::move(run));
  }

  manifest.write(report.out, "complete");
  report.manifest = manifest.path;
  report.files = manifest.files;
  return report;
}

}  // namespace socnav
