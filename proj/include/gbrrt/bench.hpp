#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gbrrt/config.hpp"
#include "gbrrt/maneuver.hpp"
#include "gbrrt/planners.hpp"
#include "gbrrt/systems.hpp"

namespace gbrrt {

using json = nlohmann::json;

inline constexpr int kScenarioFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;

// ---- JSON field helpers --------------------------------------------------

namespace io {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(path + "." + key + ": missing");
  return *it;
}

// Numbers, plus null or "inf"/"-inf" for unbounded values.
inline double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_null() || v == "inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  throw ValidationError(path + ": expected a number");
}

inline std::vector<double> numbers(const json& v, const std::string& path, std::size_t expect = 0) {
  if (!v.is_array()) throw ValidationError(path + ": expected an array");
  if (expect && v.size() != expect)
    throw ValidationError(path + ": expected " + std::to_string(expect) + " entries, got " + std::to_string(v.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? json(nullptr) : json("-inf");
  return x;
}

inline json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

inline std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError(path + ": expected a string");
  return v.get<std::string>();
}

inline json parse_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(file + ": malformed JSON: " + e.what());
  }
}

inline void write_file(const std::string& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file);
  out << content;
  if (!out) throw IoError("write failed for " + file);
}

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace io

// ---- obstacles and scenarios ---------------------------------------------

inline json obstacle_to_json(const Obstacle& o) {
  return std::visit(
      [](const auto& ob) -> json {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, BoxObstacle>) {
          return {{"type", "box"}, {"lo", ob.lo}, {"hi", ob.hi}};
        } else if constexpr (std::is_same_v<T, CylinderObstacle>) {
          return {{"type", "cylinder"},
                  {"center", {ob.cx, ob.cy}},
                  {"radius", ob.radius},
                  {"z", {io::number_json(ob.z_lo), io::number_json(ob.z_hi)}}};
        } else {
          return {{"type", "sphere"}, {"center", ob.center}, {"radius", ob.radius}};
        }
      },
      o);
}

inline Obstacle obstacle_from_json(const json& j, const std::string& path) {
  const std::string type = io::text(io::field(j, "type", path), path + ".type");
  if (type == "box")
    return BoxObstacle{io::numbers(io::field(j, "lo", path), path + ".lo"), io::numbers(io::field(j, "hi", path), path + ".hi")};
  if (type == "cylinder") {
    CylinderObstacle c;
    const auto ctr = io::numbers(io::field(j, "center", path), path + ".center", 2);
    c.cx = ctr[0];
    c.cy = ctr[1];
    c.radius = io::number(io::field(j, "radius", path), path + ".radius");
    if (j.contains("z")) {
      const auto z = io::numbers(j["z"], path + ".z", 2);
      c.z_lo = z[0] == std::numeric_limits<double>::infinity() ? -z[0] : z[0];
      c.z_hi = z[1];
    }
    return c;
  }
  if (type == "sphere")
    return SphereObstacle{io::numbers(io::field(j, "center", path), path + ".center"),
                          io::number(io::field(j, "radius", path), path + ".radius")};
  throw ValidationError(path + ".type: unknown obstacle type '" + type + "'");
}

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["format_version"] = kScenarioFormatVersion;
  j["id"] = sc.id;
  j["system"] = sc.system;
  if (!sc.description.empty()) j["description"] = sc.description;
  j["bounds"] = {{"lo", io::numbers_json(sc.bounds.lo)}, {"hi", io::numbers_json(sc.bounds.hi)}};
  j["robot_radius"] = sc.robot_radius;
  if (sc.collision_resolution > 0.0) j["collision_resolution"] = sc.collision_resolution;
  j["start"] = sc.start.values;
  j["goal"] = sc.goal.values;
  j["goal_tolerance"] = {{"below", io::numbers_json(sc.goal_below)}, {"above", io::numbers_json(sc.goal_above)}};
  json obs = json::array();
  for (const auto& o : sc.obstacles) obs.push_back(obstacle_to_json(o));
  j["obstacles"] = obs;
  return j;
}

/// Parses and validates a scenario. Errors name the offending field.
inline Scenario scenario_from_json(const json& j, const std::string& path = "scenario") {
  Scenario sc;
  const auto& ver = io::field(j, "format_version", path);
  if (!ver.is_number_integer() || ver.get<int>() != kScenarioFormatVersion)
    throw ValidationError(path + ".format_version: unsupported (expected " + std::to_string(kScenarioFormatVersion) + ")");
  sc.id = io::text(io::field(j, "id", path), path + ".id");
  sc.system = io::text(io::field(j, "system", path), path + ".system");
  if (j.contains("description")) sc.description = io::text(j["description"], path + ".description");
  auto model = make_bare_system(sc.system);
  const std::size_t d = model->state_dim();
  const auto& b = io::field(j, "bounds", path);
  sc.bounds.lo = io::numbers(io::field(b, "lo", path + ".bounds"), path + ".bounds.lo", d);
  sc.bounds.hi = io::numbers(io::field(b, "hi", path + ".bounds"), path + ".bounds.hi", d);
  sc.robot_radius = j.contains("robot_radius") ? io::number(j["robot_radius"], path + ".robot_radius") : 0.0;
  if (j.contains("collision_resolution"))
    sc.collision_resolution = io::number(j["collision_resolution"], path + ".collision_resolution");
  sc.start = State(io::numbers(io::field(j, "start", path), path + ".start", d));
  sc.goal = State(io::numbers(io::field(j, "goal", path), path + ".goal", d));
  const auto& tol = io::field(j, "goal_tolerance", path);
  if (tol.is_array()) {
    sc.goal_below = io::numbers(tol, path + ".goal_tolerance", d);
    sc.goal_above = sc.goal_below;
  } else {
    sc.goal_below = io::numbers(io::field(tol, "below", path + ".goal_tolerance"), path + ".goal_tolerance.below", d);
    sc.goal_above = io::numbers(io::field(tol, "above", path + ".goal_tolerance"), path + ".goal_tolerance.above", d);
  }
  if (j.contains("obstacles")) {
    const auto& obs = j["obstacles"];
    if (!obs.is_array()) throw ValidationError(path + ".obstacles: expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i)
      sc.obstacles.push_back(obstacle_from_json(obs[i], path + ".obstacles[" + std::to_string(i) + "]"));
  }
  try {
    validate_scenario(sc, *model);
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& file) { return scenario_from_json(io::parse_file(file), file); }

inline void save_scenario(const Scenario& sc, const std::string& file) {
  io::write_file(file, scenario_to_json(sc).dump(2) + "\n");
}

inline bool operator==(const Scenario& a, const Scenario& b) { return scenario_to_json(a) == scenario_to_json(b); }

// ---- planner configuration -----------------------------------------------

inline json config_to_json(const PlannerConfig& c) {
  json j;
  j["format_version"] = kConfigFormatVersion;
  j["delta_hr"] = c.delta_hr;
  j["q"] = c.q;
  j["n_best"] = c.n_best;
  j["gamma"] = c.gamma;
  j["radius_exponent"] = c.radius_exponent == RadiusExponent::one_over_d ? "1/d" : "1/(d+1)";
  j["constant_radius"] = c.constant_radius;
  j["t_max"] = c.t_max;
  j["step"] = c.step;
  j["m_iter"] = c.m_iter;
  j["s_max"] = c.s_max;
  j["seed"] = c.seed;
  json ab = json::array();
  if (c.ablations.no_fast_explore) ab.push_back("no_fast_explore");
  if (c.ablations.no_queue_update) ab.push_back("no_queue_update");
  if (c.ablations.no_exploit) ab.push_back("no_exploit");
  if (c.ablations.range_update) ab.push_back("range_update");
  j["ablations"] = ab;
  j["extend_epsilon"] = c.extend_epsilon;
  j["goal_bias"] = c.goal_bias;
  j["range_mode"] = c.range_mode == RangeMode::exact ? "exact" : "approximate";
  j["range_epsilon"] = c.range_epsilon;
  return j;
}

/// Overrides fields of `base` with those present in `j`. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
inline PlannerConfig config_from_json(const json& j, PlannerConfig base, const std::string& path = "config") {
  static const std::set<std::string> known = {
      "format_version", "delta_hr", "q",     "n_best",  "gamma",          "radius_exponent", "constant_radius",
      "t_max",          "step",     "m_iter", "s_max",  "seed",           "ablations",       "extend_epsilon",
      "goal_bias",      "range_mode", "range_epsilon", "maneuver_library", "description"};
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ValidationError(path + "." + k + ": unknown field");
  if (j.contains("format_version") && j["format_version"] != kConfigFormatVersion)
    throw ValidationError(path + ".format_version: unsupported");
  auto num = [&](const char* k, double& dst) {
    if (j.contains(k)) dst = io::number(j[k], path + "." + k);
  };
  auto count = [&](const char* k, auto& dst) {
    if (!j.contains(k)) return;
    if (!j[k].is_number_integer() || j[k].template get<long long>() < 0)
      throw ValidationError(path + "." + k + ": expected a nonnegative integer");
    dst = j[k].template get<std::decay_t<decltype(dst)>>();
  };
  num("delta_hr", base.delta_hr);
  num("q", base.q);
  count("n_best", base.n_best);
  num("gamma", base.gamma);
  if (j.contains("radius_exponent")) {
    const auto e = io::text(j["radius_exponent"], path + ".radius_exponent");
    if (e == "1/d")
      base.radius_exponent = RadiusExponent::one_over_d;
    else if (e == "1/(d+1)")
      base.radius_exponent = RadiusExponent::one_over_d_plus_one;
    else
      throw ValidationError(path + ".radius_exponent: expected \"1/d\" or \"1/(d+1)\"");
  }
  if (j.contains("constant_radius")) {
    if (!j["constant_radius"].is_boolean()) throw ValidationError(path + ".constant_radius: expected a boolean");
    base.constant_radius = j["constant_radius"].get<bool>();
  }
  num("t_max", base.t_max);
  num("step", base.step);
  count("m_iter", base.m_iter);
  num("s_max", base.s_max);
  count("seed", base.seed);
  if (j.contains("ablations")) {
    const auto& a = j["ablations"];
    if (!a.is_array()) throw ValidationError(path + ".ablations: expected an array of names");
    std::string list;
    for (const auto& n : a) list += io::text(n, path + ".ablations") + ",";
    try {
      base.ablations = parse_ablations(list);
    } catch (const ValidationError& e) {
      throw ValidationError(path + ".ablations: " + e.what());
    }
  }
  num("extend_epsilon", base.extend_epsilon);
  num("goal_bias", base.goal_bias);
  if (j.contains("range_mode")) {
    const auto m = io::text(j["range_mode"], path + ".range_mode");
    if (m == "exact")
      base.range_mode = RangeMode::exact;
    else if (m == "approximate")
      base.range_mode = RangeMode::approximate;
    else
      throw ValidationError(path + ".range_mode: expected \"exact\" or \"approximate\"");
  }
  num("range_epsilon", base.range_epsilon);
  try {
    base.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.what());
  }
  return base;
}

/// A configuration file: overrides applied on top of the system's defaults,
/// plus an optional maneuver library path.
struct ConfigFile {
  json overrides = json::object();
  std::string maneuver_library;
};

inline ConfigFile load_config(const std::string& file) {
  ConfigFile cf;
  cf.overrides = io::parse_file(file);
  config_from_json(cf.overrides, PlannerConfig{}, file);  // validate early
  if (cf.overrides.contains("maneuver_library"))
    cf.maneuver_library = io::text(cf.overrides["maneuver_library"], file + ".maneuver_library");
  return cf;
}

inline bool operator==(const PlannerConfig& a, const PlannerConfig& b) { return config_to_json(a) == config_to_json(b); }

/// Model for a system, with the library named by the config if any.
inline std::shared_ptr<SystemModel> model_for(const std::string& system, const std::string& library_file = {}) {
  if (library_file.empty()) return make_system(system);
  auto m = make_bare_system(system);
  auto lib = load_library(library_file, m->distance_spec());
  if (lib.system != system) throw ValidationError(library_file + ": library is for '" + lib.system + "'");
  m->set_library(std::make_shared<ManeuverLibrary>(std::move(lib)));
  return m;
}

// ---- trials ---------------------------------------------------------------

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string planner;  // planner id, with "+ablation" suffixes
  std::string system;
  std::string scenario;
  bool success = false;
  double solution_time_s = 0.0;
  std::size_t iterations = 0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_forward = 0;
  std::size_t n_reverse = 0;
  double r_rk = 0.0;
  double r_edge = 0.0;
  double r_x = 0.0;
  double r_max = 0.0;
  Ablations ablations;
  std::vector<std::string> path_errors;  // empty unless the returned path failed validation
};

inline std::string planner_label(PlannerKind k, const Ablations& a) {
  std::string s = to_string(k);
  if (a.no_fast_explore) s += "+no_fast_explore";
  if (a.no_queue_update) s += "+no_queue_update";
  if (a.no_exploit) s += "+no_exploit";
  if (a.range_update) s += "+range_update";
  return s;
}

struct BatchOptions {
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  bool randomize_endpoints = false;
  bool validate_paths = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Draws a collision-free state: positional dimensions uniform in the box,
/// the rest copied from `like`.
inline State random_free_state(const Scenario& sc, const SystemModel& m, const State& like, Rng& rng) {
  const CollisionScene scene = sc.scene(m);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    State s = like;
    for (std::size_t d : m.positional_dims()) s[d] = rng.uniform(sc.bounds.lo[d], sc.bounds.hi[d]);
    if (!state_in_collision(scene, s)) return s;
  }
  throw ValidationError("could not find a collision-free state");
}

inline TrialRecord run_trial(PlannerKind kind, std::shared_ptr<const SystemModel> model, Scenario sc,
                             PlannerConfig cfg, std::size_t trial, std::uint64_t seed, bool randomize,
                             bool validate_paths = true) {
  cfg.seed = seed;
  if (randomize) {
    Rng r(splitmix64(seed ^ 0x3c6ef372fe94f82bULL));
    sc.start = random_free_state(sc, *model, sc.start, r);
    sc.goal = random_free_state(sc, *model, sc.goal, r);
  }
  PlannerRun run(kind, model, sc, cfg);
  const RunResult res = run_planner(run);
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = seed;
  rec.planner = planner_label(kind, cfg.ablations);
  rec.system = model->id();
  rec.scenario = sc.id;
  rec.ablations = cfg.ablations;
  const RunMetrics& m = res.metrics;
  rec.success = m.success;
  rec.solution_time_s = m.solution_time_s;
  rec.iterations = m.iterations;
  rec.cost = m.cost;
  rec.n_forward = m.n_forward;
  rec.n_reverse = m.n_reverse;
  rec.r_rk = m.r_rk;
  rec.r_edge = m.r_edge;
  rec.r_x = m.r_x;
  rec.r_max = m.r_max;
  if (res.path && validate_paths) rec.path_errors = check_path(*res.path, *model, sc, cfg);
  return rec;
}

/// Runs trials with seeds base_seed + i on a worker pool. Results are in
/// trial order regardless of scheduling.
inline std::vector<TrialRecord> run_batch(PlannerKind kind, std::shared_ptr<const SystemModel> model,
                                          const Scenario& sc, const PlannerConfig& cfg, const BatchOptions& opt) {
  if (opt.trials < 1) throw ValidationError("trials: must be >= 1");
  std::vector<TrialRecord> out(opt.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < opt.trials; i = next++)
      out[i] = run_trial(kind, model, sc, cfg, i, opt.base_seed + i, opt.randomize_endpoints, opt.validate_paths);
  };
  unsigned n = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, opt.trials));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

struct Summary {
  std::size_t trials = 0;
  double success_pct = 0.0;
  double mean_time = 0.0;
  double median_time = 0.0;
  double se_time = 0.0;
  double mean_cost = std::numeric_limits<double>::quiet_NaN();
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Solution-time statistics over all trials; failed trials already carry
/// S_max as their time. SE is the sample standard deviation over sqrt(n).
inline Summary aggregate(const std::vector<TrialRecord>& recs) {
  Summary s;
  s.trials = recs.size();
  if (recs.empty()) return s;
  std::vector<double> t;
  double cost = 0.0;
  std::size_t ok = 0;
  for (const auto& r : recs) {
    t.push_back(r.solution_time_s);
    if (r.success) {
      ++ok;
      cost += r.cost;
    }
  }
  const double n = static_cast<double>(t.size());
  s.success_pct = 100.0 * static_cast<double>(ok) / n;
  s.mean_time = std::accumulate(t.begin(), t.end(), 0.0) / n;
  s.median_time = median(t);
  if (t.size() > 1) {
    double ss = 0.0;
    for (double x : t) ss += (x - s.mean_time) * (x - s.mean_time);
    s.se_time = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  if (ok) s.mean_cost = cost / static_cast<double>(ok);
  return s;
}

inline const char* kCsvHeader =
    "trial,seed,planner,system,scenario,success,solution_time_s,iterations,cost,n_forward,n_reverse,r_rk,r_edge,r_x,r_max";

struct CsvOptions {
  bool timestamp = true;    // leading "# generated ..." comment line
  bool wall_clock = true;   // false writes "-" for solution_time_s
  std::string stamp;        // timestamp text; filled by the caller
};

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& recs, const CsvOptions& opt = {}) {
  if (opt.timestamp) os << "# generated " << opt.stamp << "\n";
  os << kCsvHeader << "\n";
  for (const auto& r : recs) {
    os << r.trial << ',' << r.seed << ',' << r.planner << ',' << r.system << ',' << r.scenario << ','
       << (r.success ? 1 : 0) << ',' << (opt.wall_clock ? io::fmt("%.6f", r.solution_time_s) : std::string("-")) << ','
       << r.iterations << ',' << (r.success ? io::fmt("%.9g", r.cost) : std::string()) << ',' << r.n_forward << ','
       << r.n_reverse << ',' << io::fmt("%.9g", r.r_rk) << ',' << io::fmt("%.9g", r.r_edge) << ','
       << io::fmt("%.9g", r.r_x) << ',' << io::fmt("%.9g", r.r_max) << "\n";
  }
}

inline json summary_to_json(const Summary& s) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return {{"trials", s.trials},         {"success_pct", s.success_pct}, {"mean_time_s", num(s.mean_time)},
          {"median_time_s", num(s.median_time)}, {"se_time_s", num(s.se_time)}, {"mean_cost", num(s.mean_cost)}};
}

// ---- sweeps ---------------------------------------------------------------

struct SweepAxis {
  std::string name;  // delta_hr, q or n_best
  std::vector<double> values;
  bool log_scale() const { return name != "q"; }
};

struct SweepSpec {
  std::string scenario_file;
  Scenario scenario;
  PlannerKind planner = PlannerKind::gbrrt;
  json config_overrides = json::object();
  std::vector<SweepAxis> axes;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  bool constant_radius = true;
};

inline SweepSpec sweep_from_json(const json& j, const std::string& path, const std::string& base_dir = ".") {
  SweepSpec s;
  s.scenario_file = io::text(io::field(j, "scenario", path), path + ".scenario");
  const std::string sf = s.scenario_file.size() && s.scenario_file[0] == '/' ? s.scenario_file : base_dir + "/" + s.scenario_file;
  s.scenario = load_scenario(sf);
  if (j.contains("planner")) s.planner = parse_planner(io::text(j["planner"], path + ".planner"));
  if (j.contains("config")) s.config_overrides = j["config"];
  const auto& axes = io::field(j, "axes", path);
  if (!axes.is_object() || axes.empty()) throw ValidationError(path + ".axes: need at least one axis");
  for (const auto& [name, vals] : axes.items()) {
    if (name != "delta_hr" && name != "q" && name != "n_best")
      throw ValidationError(path + ".axes." + name + ": sweepable axes are delta_hr, q and n_best");
    SweepAxis ax{name, io::numbers(vals, path + ".axes." + name)};
    if (ax.values.empty()) throw ValidationError(path + ".axes." + name + ": needs at least one value");
    s.axes.push_back(std::move(ax));
  }
  if (j.contains("trials")) {
    const auto& t = j["trials"];
    if (!t.is_number_integer() || t.get<long long>() < 1) throw ValidationError(path + ".trials: must be >= 1");
    s.trials = t.get<std::size_t>();
  }
  if (j.contains("base_seed")) s.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("constant_radius")) s.constant_radius = j["constant_radius"].get<bool>();
  return s;
}

struct SweepPoint {
  std::vector<double> coords;  // one value per axis
  Summary summary;
};

inline std::vector<SweepPoint> sweep(const SweepSpec& spec, std::shared_ptr<const SystemModel> model,
                                     unsigned threads = 0) {
  std::vector<SweepPoint> grid;
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  while (true) {
    PlannerConfig cfg = config_from_json(spec.config_overrides, PlannerConfig::defaults_for(*model));
    cfg.constant_radius = spec.constant_radius;
    SweepPoint pt;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const double v = spec.axes[a].values[idx[a]];
      pt.coords.push_back(v);
      if (spec.axes[a].name == "delta_hr") cfg.delta_hr = v;
      if (spec.axes[a].name == "q") cfg.q = v;
      if (spec.axes[a].name == "n_best") cfg.n_best = static_cast<std::size_t>(std::llround(v));
    }
    cfg.validate();
    BatchOptions opt;
    opt.trials = spec.trials;
    opt.base_seed = spec.base_seed;
    opt.threads = threads;
    pt.summary = aggregate(run_batch(spec.planner, model, spec.scenario, cfg, opt));
    grid.push_back(std::move(pt));
    std::size_t a = 0;
    while (a < idx.size() && ++idx[a] == spec.axes[a].values.size()) idx[a++] = 0;
    if (a == idx.size()) break;
  }
  return grid;
}

}  // namespace gbrrt
