// plan: run, sweep, render and validate motion-planning scenarios.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gbrrt/bench.hpp"
#include "gbrrt/svg.hpp"

namespace fs = std::filesystem;
using namespace gbrrt;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::string utc_stamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

struct Setup {
  Scenario scenario;
  std::shared_ptr<SystemModel> model;
  PlannerConfig config;
};

Setup setup(const std::string& scenario_file, const std::string& config_file, const std::string& ablations) {
  Setup s;
  s.scenario = load_scenario(scenario_file);
  ConfigFile cf;
  if (!config_file.empty()) cf = load_config(config_file);
  std::string lib = cf.maneuver_library;
  if (!lib.empty() && fs::path(lib).is_relative()) lib = (fs::path(config_file).parent_path() / lib).string();
  s.model = model_for(s.scenario.system, lib);
  s.config = config_from_json(cf.overrides, PlannerConfig::defaults_for(*s.model), config_file.empty() ? "config" : config_file);
  if (!ablations.empty()) s.config.ablations = parse_ablations(ablations);
  return s;
}

int cmd_run(const std::string& scenario_file, const std::string& planner, const std::string& config_file,
            std::size_t trials, std::uint64_t seed, const std::string& out, bool no_timestamp,
            const std::string& ablations, bool randomize, unsigned threads) {
  const Setup s = setup(scenario_file, config_file, ablations);
  BatchOptions opt;
  opt.trials = trials;
  opt.base_seed = seed;
  opt.randomize_endpoints = randomize;
  opt.threads = threads;
  const auto kind = parse_planner(planner);
  const auto recs = run_batch(kind, s.model, s.scenario, s.config, opt);
  ensure_dir(out);
  CsvOptions co;
  co.timestamp = !no_timestamp;
  co.wall_clock = !no_timestamp;
  co.stamp = utc_stamp();
  std::ostringstream csv;
  write_csv(csv, recs, co);
  io::write_file((fs::path(out) / "results.csv").string(), csv.str());
  const Summary sum = aggregate(recs);
  json js = summary_to_json(sum);
  js["planner"] = planner_label(kind, s.config.ablations);
  js["scenario"] = s.scenario.id;
  js["system"] = s.scenario.system;
  js["s_max"] = s.config.s_max;
  if (no_timestamp) {
    js.erase("mean_time_s");
    js.erase("median_time_s");
    js.erase("se_time_s");
  }
  io::write_file((fs::path(out) / "summary.json").string(), js.dump(2) + "\n");
  std::size_t bad = 0;
  for (const auto& r : recs)
    for (const auto& e : r.path_errors) {
      std::cerr << "trial " << r.trial << ": invalid path: " << e << "\n";
      ++bad;
    }
  std::cout << js["planner"].get<std::string>() << " on " << s.scenario.id << ": " << sum.success_pct
            << "% solved over " << sum.trials << " trials\n";
  return bad ? 1 : 0;
}

int cmd_sweep(const std::string& spec_file, const std::string& out, unsigned threads) {
  const json j = io::parse_file(spec_file);
  const SweepSpec spec = sweep_from_json(j, spec_file, fs::path(spec_file).parent_path().string());
  std::string lib;
  if (spec.config_overrides.contains("maneuver_library")) {
    lib = spec.config_overrides["maneuver_library"].get<std::string>();
    if (fs::path(lib).is_relative()) lib = (fs::path(spec_file).parent_path() / lib).string();
  }
  auto model = model_for(spec.scenario.system, lib);
  const auto grid = sweep(spec, model, threads);
  ensure_dir(out);
  std::ostringstream csv;
  for (const auto& a : spec.axes) csv << a.name << ',';
  csv << "trials,success_pct,mean_time_s,median_time_s,se_time_s,mean_cost\n";
  for (const auto& p : grid) {
    for (double v : p.coords) csv << io::fmt("%.9g", v) << ',';
    csv << p.summary.trials << ',' << io::fmt("%.6g", p.summary.success_pct) << ',' << io::fmt("%.6f", p.summary.mean_time)
        << ',' << io::fmt("%.6f", p.summary.median_time) << ',' << io::fmt("%.6f", p.summary.se_time) << ','
        << io::fmt("%.9g", p.summary.mean_cost) << "\n";
  }
  io::write_file((fs::path(out) / "sweep.csv").string(), csv.str());
  io::write_file((fs::path(out) / "sweep.svg").string(), svg::render_sweep(spec, grid));
  std::cout << "swept " << grid.size() << " points\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& out, const std::string& planner,
               const std::string& config_file, std::uint64_t seed) {
  std::string content;
  if (fs::path(input).extension() == ".csv") {
    std::ifstream in(input);
    if (!in) throw IoError("cannot read " + input);
    content = svg::render_csv(in);
  } else {
    Setup s = setup(input, config_file, "");
    s.config.seed = seed;
    PlannerRun run(parse_planner(planner), s.model, s.scenario, s.config);
    const RunResult res = run_planner(run);
    content = svg::render_run(run, s.scenario, *s.model, res.path);
  }
  io::write_file(out, content);
  return 0;
}

int cmd_validate(const std::string& scenario_file, const std::string& config_file) {
  const Scenario sc = load_scenario(scenario_file);
  if (!config_file.empty()) setup(scenario_file, config_file, "");
  std::cout << scenario_file << ": ok (" << sc.system << ", " << sc.obstacles.size() << " obstacles)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bidirectional kinodynamic planners and benchmark harness"};
  app.require_subcommand(1);

  std::string scenario, planner = "gbrrt", config, out, ablation, spec, input;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  bool no_timestamp = false, randomize = false;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "run a batch of seeded trials");
  run->add_option("--scenario", scenario, "scenario JSON")->required();
  run->add_option("--planner", planner, "gbrrt, gabrrt or rrt");
  run->add_option("--config", config, "planner config JSON");
  run->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "base seed; trial i uses seed + i");
  run->add_option("--out", out, "output directory")->required();
  run->add_flag("--no-timestamp", no_timestamp, "omit the timestamp line and wall-clock times");
  run->add_option("--ablation", ablation, "comma-separated ablations");
  run->add_flag("--randomize", randomize, "resample free start and goal positions per trial");
  run->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* sw = app.add_subcommand("sweep", "parameter sweep");
  sw->add_option("--spec", spec, "sweep JSON")->required();
  sw->add_option("--out", out, "output directory")->required();
  sw->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* rd = app.add_subcommand("render", "render a scenario run or a results CSV to SVG");
  rd->add_option("--input", input, "scenario JSON or results CSV")->required();
  rd->add_option("--out", out, "output SVG")->required();
  rd->add_option("--planner", planner, "planner for scenario input");
  rd->add_option("--config", config, "planner config JSON");
  rd->add_option("--seed", seed, "seed for scenario input");

  auto* va = app.add_subcommand("validate", "check a scenario file");
  va->add_option("--scenario", scenario, "scenario JSON")->required();
  va->add_option("--config", config, "planner config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return cmd_run(scenario, planner, config, trials, seed, out, no_timestamp, ablation, randomize, threads);
    if (*sw) return cmd_sweep(spec, out, threads);
    if (*rd) return cmd_render(input, out, planner, config, seed);
    if (*va) return cmd_validate(scenario, config);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
