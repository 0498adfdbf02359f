#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gbrrt/collision.hpp"
#include "gbrrt/dynamics.hpp"
#include "gbrrt/spatial_index.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

/// Box around a goal state: dimension i accepts goal[i] - below[i] through
/// goal[i] + above[i], measured as a wrapped difference on angular
/// dimensions. Infinite tolerances leave a dimension free.
struct GoalRegion {
  State center;
  std::vector<double> below;
  std::vector<double> above;
  std::vector<DimKind> kinds;

  bool contains(std::span<const double> s) const {
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double d = kinds[i] == DimKind::angular ? angle_diff(s[i], center[i]) : s[i] - center[i];
      if (d < -below[i] || d > above[i]) return false;
    }
    return true;
  }
  bool contains(const State& s) const { return contains(s.view()); }
};

struct Scenario {
  std::string id = "scenario";
  std::string system;
  std::string description;
  Bounds bounds;  // full state box used for sampling and truncation
  std::vector<Obstacle> obstacles;
  double robot_radius = 0.0;
  double collision_resolution = 0.0;
  State start;
  State goal;
  std::vector<double> goal_below;
  std::vector<double> goal_above;

  GoalRegion goal_region(const SystemModel& m) const { return {goal, goal_below, goal_above, m.kinds()}; }

  CollisionScene scene(const SystemModel& m) const {
    CollisionScene sc;
    sc.positional_dims = m.positional_dims();
    for (std::size_t d : sc.positional_dims) {
      sc.workspace.lo.push_back(bounds.lo[d]);
      sc.workspace.hi.push_back(bounds.hi[d]);
    }
    sc.obstacles = obstacles;
    sc.robot_radius = robot_radius;
    sc.resolution = collision_resolution;
    return sc;
  }

  /// Extent of the first positional dimension.
  double x_extent() const { return bounds.hi[0] - bounds.lo[0]; }
};

/// Throws ValidationError describing the first broken invariant.
inline void validate_scenario(const Scenario& sc, const SystemModel& m) {
  const std::size_t d = m.state_dim();
  if (sc.system != m.id()) throw ValidationError("scenario system '" + sc.system + "' does not match model '" + m.id() + "'");
  if (sc.bounds.lo.size() != d || sc.bounds.hi.size() != d) throw ValidationError("bounds: need " + std::to_string(d) + " entries");
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(sc.bounds.lo[i]) || !std::isfinite(sc.bounds.hi[i]) || !(sc.bounds.lo[i] < sc.bounds.hi[i]))
      throw ValidationError("bounds[" + std::to_string(i) + "]: need finite lo < hi");
  }
  if (!(sc.robot_radius >= 0.0)) throw ValidationError("robot_radius: must be >= 0");
  if (sc.start.size() != d) throw ValidationError("start: need " + std::to_string(d) + " values");
  if (sc.goal.size() != d) throw ValidationError("goal: need " + std::to_string(d) + " values");
  if (!sc.start.all_finite()) throw ValidationError("start: non-finite value");
  if (!sc.goal.all_finite()) throw ValidationError("goal: non-finite value");
  if (sc.goal_below.size() != d || sc.goal_above.size() != d) throw ValidationError("goal_tolerance: need " + std::to_string(d) + " entries");
  for (std::size_t i = 0; i < d; ++i)
    if (!(sc.goal_below[i] >= 0.0) || !(sc.goal_above[i] >= 0.0)) throw ValidationError("goal_tolerance[" + std::to_string(i) + "]: must be >= 0");
  if (!sc.bounds.contains(sc.start.view())) throw ValidationError("start: outside bounds");
  if (!sc.bounds.contains(sc.goal.view())) throw ValidationError("goal: outside bounds");
  const std::size_t np = m.positional_dims().size();
  for (std::size_t k = 0; k < sc.obstacles.size(); ++k)
    if (auto err = check_obstacle(sc.obstacles[k], np); !err.empty())
      throw ValidationError("obstacles[" + std::to_string(k) + "]: " + err);
  const CollisionScene scene = sc.scene(m);
  for (std::size_t k = 0; k < sc.obstacles.size(); ++k) {
    double p[8];
    std::span<double> ps(p, np);
    scene.position_of(sc.start.view(), ps);
    if (obstacle_distance(sc.obstacles[k], ps) <= sc.robot_radius)
      throw ValidationError("start: in collision with obstacles[" + std::to_string(k) + "]");
    scene.position_of(sc.goal.view(), ps);
    if (obstacle_distance(sc.obstacles[k], ps) <= sc.robot_radius)
      throw ValidationError("goal: in collision with obstacles[" + std::to_string(k) + "]");
  }
  if (state_in_collision(scene, sc.start)) throw ValidationError("start: robot leaves the workspace");
  if (state_in_collision(scene, sc.goal)) throw ValidationError("goal: robot leaves the workspace");
}

struct Ablations {
  bool no_fast_explore = false;
  bool no_queue_update = false;
  bool no_exploit = false;
  bool range_update = false;

  bool any() const { return no_fast_explore || no_queue_update || no_exploit || range_update; }
  friend bool operator==(const Ablations&, const Ablations&) = default;
};

/// Comma-separated ablation names, e.g. "no_fast_explore,range_update".
inline Ablations parse_ablations(const std::string& list) {
  Ablations a;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t end = std::min(list.find(',', pos), list.size());
    const std::string name = list.substr(pos, end - pos);
    if (name == "no_fast_explore" || name == "NF")
      a.no_fast_explore = true;
    else if (name == "no_queue_update" || name == "NU")
      a.no_queue_update = true;
    else if (name == "no_exploit" || name == "NE")
      a.no_exploit = true;
    else if (name == "range_update" || name == "RU")
      a.range_update = true;
    else if (!name.empty())
      throw ValidationError("unknown ablation '" + name + "'");
    pos = end + 1;
  }
  return a;
}

inline std::string to_string(const Ablations& a) {
  std::string s;
  auto add = [&](bool on, const char* n) {
    if (!on) return;
    if (!s.empty()) s += ',';
    s += n;
  };
  add(a.no_fast_explore, "no_fast_explore");
  add(a.no_queue_update, "no_queue_update");
  add(a.no_exploit, "no_exploit");
  add(a.range_update, "range_update");
  return s;
}

struct PlannerConfig {
  double delta_hr = 1.0;
  double q = 0.7;
  std::function<double(std::size_t)> q_schedule;  // overrides q when set
  std::size_t n_best = 1;
  double gamma = 1.0;
  RadiusExponent radius_exponent = RadiusExponent::one_over_d_plus_one;
  bool constant_radius = false;  // r_k = delta_hr throughout
  double t_max = 1.0;
  double step = 1e-3;
  std::size_t m_iter = 100000;
  double s_max = 60.0;
  std::uint64_t seed = 0;
  Ablations ablations;
  double extend_epsilon = 0.0;  // 0 selects delta_hr / 2
  double goal_bias = 0.05;      // baseline RRT only
  RangeMode range_mode = RangeMode::exact;
  double range_epsilon = 0.25;

  double exploit_ratio(std::size_t k) const { return q_schedule ? q_schedule(k) : q; }
  double epsilon() const { return extend_epsilon > 0.0 ? extend_epsilon : delta_hr / 2.0; }

  static PlannerConfig defaults_for(const SystemModel& m) {
    PlannerConfig c;
    const auto& d = m.defaults();
    c.delta_hr = d.delta_hr;
    c.n_best = d.n_best;
    c.q = d.q;
    c.gamma = d.gamma;
    c.t_max = d.t_max;
    return c;
  }

  void validate() const {
    if (!(delta_hr > 0.0) || !std::isfinite(delta_hr)) throw ValidationError("delta_hr: must be finite and > 0");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("q: must lie in [0, 1]");
    if (n_best < 1) throw ValidationError("n_best: must be >= 1");
    if (!(gamma > 0.0)) throw ValidationError("gamma: must be > 0");
    if (!(t_max > 0.0)) throw ValidationError("t_max: must be > 0");
    if (!(step > 0.0) || step > t_max) throw ValidationError("step: must be in (0, t_max]");
    if (!(s_max >= 0.0)) throw ValidationError("s_max: must be >= 0");
    if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw ValidationError("goal_bias: must lie in [0, 1]");
    if (!(extend_epsilon >= 0.0)) throw ValidationError("extend_epsilon: must be >= 0");
    if (!(range_epsilon >= 0.0)) throw ValidationError("range_epsilon: must be >= 0");
  }
};

}  // namespace gbrrt
