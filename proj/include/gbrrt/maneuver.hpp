#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbrrt/dynamics.hpp"
#include "gbrrt/edge.hpp"
#include "gbrrt/metrics.hpp"
#include "gbrrt/systems.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

/// How body-frame template samples map to the world.
///  - se2: rotate (x, y) by the anchor heading and add headings; state (x, y, theta).
///  - translation: add the anchor position; state (x, y, z).
enum class FrameRule { se2, translation };

inline const char* to_string(FrameRule f) { return f == FrameRule::se2 ? "se2" : "translation"; }

struct ManeuverTemplate {
  std::string label;
  std::vector<double> params;  // generator inputs, informational
  Edge body;                   // starts at the origin with zero heading
  double v_start = 0.0;        // speed at the first and last sample
  double v_end = 0.0;
  double reach = 0.0;          // largest positional distance from the origin

  void compute_reach(FrameRule frame);
};

struct ManeuverLibrary {
  std::string system;
  FrameRule frame = FrameRule::se2;
  std::vector<ManeuverTemplate> templates;

  std::size_t size() const { return templates.size(); }
};

inline void ManeuverTemplate::compute_reach(FrameRule frame) {
  reach = 0.0;
  for (std::size_t i = 0; i < body.sample_count(); ++i) {
    auto s = body.sample(i);
    reach = std::max(reach, frame == FrameRule::se2 ? std::hypot(s[0], s[1]) : std::hypot(s[0], s[1], s[2]));
  }
}

namespace detail {

inline State place(FrameRule frame, std::span<const double> anchor, std::span<const double> body) {
  if (frame == FrameRule::se2) {
    const double c = std::cos(anchor[2]), s = std::sin(anchor[2]);
    return State{anchor[0] + c * body[0] - s * body[1], anchor[1] + s * body[0] + c * body[1],
                 wrap_angle(anchor[2] + body[2])};
  }
  State out(std::vector<double>(anchor.begin(), anchor.end()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += body[i];
  return out;
}

// World start state such that the template's last sample lands on `end`.
inline State start_for_end(FrameRule frame, std::span<const double> end, std::span<const double> body_end) {
  if (frame == FrameRule::se2) {
    const double th = wrap_angle(end[2] - body_end[2]);
    const double c = std::cos(th), s = std::sin(th);
    return State{end[0] - (c * body_end[0] - s * body_end[1]), end[1] - (s * body_end[0] + c * body_end[1]), th};
  }
  State out(std::vector<double>(end.begin(), end.end()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= body_end[i];
  return out;
}

// True when every point within `reach` of the start's position lies inside
// the positional part of the box, so no sample of the template can leave it.
inline bool clear_of_walls(FrameRule frame, const State& start, double reach, const Bounds& b) {
  const std::size_t np = frame == FrameRule::se2 ? 2 : 3;
  for (std::size_t i = 0; i < np; ++i)
    if (start[i] - reach < b.lo[i] || start[i] + reach > b.hi[i]) return false;
  if (frame == FrameRule::se2 && (b.lo[2] > -kPi || b.hi[2] < kPi)) return false;
  return true;
}

}  // namespace detail

/// Places template `index` in the world. Forward: the edge starts at `anchor`.
/// Reverse: the edge ends at `anchor`. Samples outside `bounds` (if given)
/// truncate the edge on its free side; none when nothing remains.
inline std::optional<Edge> instantiate(const ManeuverLibrary& lib, std::size_t index, const State& anchor,
                                       Direction dir, const Bounds* bounds, const DistanceSpec& spec) {
  if (index >= lib.templates.size()) throw NotFoundError("maneuver index out of range");
  const Edge& body = lib.templates[index].body;
  const std::size_t n = body.sample_count();
  Edge e(anchor.size());
  e.reserve(n);
  if (dir == Direction::forward) {
    e.push_sample(0.0, anchor.view());
    for (std::size_t i = 1; i < n; ++i) {
      State w = detail::place(lib.frame, anchor.view(), body.sample(i));
      if (bounds && !bounds->contains(w.view())) break;
      e.push_sample(body.time(i), w.view());
    }
  } else {
    const State start = detail::start_for_end(lib.frame, anchor.view(), body.sample(n - 1));
    // Walk back from the anchored end while samples stay inside the box.
    std::size_t first = n - 1;
    while (first > 0) {
      if (bounds && !bounds->contains(detail::place(lib.frame, start.view(), body.sample(first - 1)).view())) break;
      --first;
    }
    const double t0 = body.time(first);
    for (std::size_t i = first; i + 1 < n; ++i)
      e.push_sample(body.time(i) - t0, detail::place(lib.frame, start.view(), body.sample(i)).view());
    e.push_sample(body.time(n - 1) - t0, anchor.view());
  }
  if (e.sample_count() < 2) return std::nullopt;
  e.control = ManeuverRef{index, dir == Direction::reverse};
  e.duration = e.time(e.sample_count() - 1);
  e.direction = dir;
  e.truncated = e.sample_count() < n;
  e.cost = edge_cost(spec, e);
  return e;
}

/// Returns the listed template whose free end is closest to `target` under
/// `select` (default: `spec`, which also prices the edge). The first listed
/// template wins ties.
inline std::optional<Edge> best_template(const ManeuverLibrary& lib, const std::vector<std::size_t>& indices,
                                         const State& from, const State& target, Direction dir,
                                         const Bounds* bounds, const DistanceSpec& spec,
                                         const DistanceSpec* select = nullptr) {
  const DistanceSpec& sel = select ? *select : spec;
  // Templates that cannot leave the box from their anchor are scored from the
  // free end alone; the rest are instantiated with truncation.
  std::size_t best_idx = 0;
  bool found = false;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t idx : indices) {
    const auto& tpl = lib.templates.at(idx);
    const Edge& body = tpl.body;
    const State start = dir == Direction::forward
                            ? from
                            : detail::start_for_end(lib.frame, from.view(), body.sample(body.sample_count() - 1));
    double d;
    if (!bounds || detail::clear_of_walls(lib.frame, start, tpl.reach, *bounds)) {
      const State free_end =
          dir == Direction::forward ? detail::place(lib.frame, start.view(), body.sample(body.sample_count() - 1)) : start;
      d = distance(sel, free_end.view(), target.view());
    } else {
      auto e = instantiate(lib, idx, from, dir, bounds, spec);
      if (!e) continue;
      d = distance(sel, dir == Direction::forward ? e->sample(e->sample_count() - 1) : e->sample(0), target.view());
    }
    if (d < best_d) {
      best_d = d;
      best_idx = idx;
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return instantiate(lib, best_idx, from, dir, bounds, spec);
}

/// Best template over the whole library.
inline Edge maneuver_propagate(const ManeuverLibrary& lib, const State& from, const State& target,
                               const DistanceSpec& spec, const Bounds* bounds = nullptr) {
  if (lib.templates.empty()) throw Error("maneuver library is empty");
  std::vector<std::size_t> all(lib.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto e = best_template(lib, all, from, target, Direction::forward, bounds, spec);
  if (!e) throw PropagationError("no maneuver stays inside the bounds");
  return *e;
}

namespace detail {

// Trapezoid with linear ramps over the first and last quarter of [0, 1].
inline double trapezoid(double tau) {
  constexpr double ramp = 0.25;
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  if (tau < ramp) return tau / ramp;
  if (tau > 1.0 - ramp) return (1.0 - tau) / ramp;
  return 1.0;
}

inline double min_jerk(double tau) { return tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau); }
inline double min_jerk_rate(double tau) { return 30.0 * tau * tau * (1.0 - tau) * (1.0 - tau); }

}  // namespace detail

/// Unicycle templates: peak speed 1..5 m/s, peak turn rate 0..pi/2 in pi/18
/// steps, both signs of each, with a trapezoidal profile over one second.
inline ManeuverLibrary generate_unicycle_library(const DistanceSpec& spec, double duration = 1.0,
                                                 double sample_dt = 0.01, double h = 1e-3) {
  ManeuverLibrary lib;
  lib.system = "unicycle";
  lib.frame = FrameRule::se2;
  const auto n_steps = static_cast<std::size_t>(std::lround(duration / h));
  const auto every = static_cast<std::size_t>(std::lround(sample_dt / h));
  for (int v = 1; v <= 5; ++v) {
    for (int k = 0; k <= 9; ++k) {
      const double w = k * kPi / 18.0;
      for (int sv : {1, -1}) {
        for (int sw : {1, -1}) {
          if (k == 0 && sw < 0) continue;
          const double vp = sv * v, wp = sw * w;
          auto rate = [&](double t, const std::array<double, 3>& x) {
            const double f = detail::trapezoid(t / duration);
            return std::array<double, 3>{vp * f * std::cos(x[2]), vp * f * std::sin(x[2]), wp * f};
          };
          std::array<double, 3> x{0.0, 0.0, 0.0};
          ManeuverTemplate tpl;
          tpl.label = "v" + std::to_string(static_cast<int>(vp)) + "_w" + std::to_string(sw * k) + "pi18";
          tpl.params = {vp, wp};
          tpl.body = Edge(3);
          tpl.body.push_sample(0.0, x);
          for (std::size_t s = 0; s < n_steps; ++s) {
            const double t = static_cast<double>(s) * h;
            auto add = [&](const std::array<double, 3>& a, const std::array<double, 3>& b, double c) {
              return std::array<double, 3>{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
            };
            const auto k1 = rate(t, x);
            const auto k2 = rate(t + h / 2, add(x, k1, h / 2));
            const auto k3 = rate(t + h / 2, add(x, k2, h / 2));
            const auto k4 = rate(t + h, add(x, k3, h));
            for (int i = 0; i < 3; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if ((s + 1) % every == 0) {
              std::array<double, 3> w3{x[0], x[1], wrap_angle(x[2])};
              tpl.body.push_sample(static_cast<double>(s + 1) * h, w3);
            }
          }
          tpl.body.control = ManeuverRef{lib.templates.size(), false};
          tpl.body.duration = duration;
          tpl.body.cost = edge_cost(spec, tpl.body);
          tpl.v_start = vp * detail::trapezoid(0.0);
          tpl.v_end = vp * detail::trapezoid(1.0);
          tpl.compute_reach(lib.frame);
          lib.templates.push_back(std::move(tpl));
        }
      }
    }
  }
  return lib;
}

/// Quadrotor templates: straight moves of 1..5 m, headings every 10 degrees,
/// climb angles -30/0/30 degrees, with a minimum-jerk profile.
inline ManeuverLibrary generate_quadrotor_library(const DistanceSpec& spec, double sample_dt = 0.01) {
  ManeuverLibrary lib;
  lib.system = "quadrotor";
  lib.frame = FrameRule::translation;
  for (int dist = 1; dist <= 5; ++dist) {
    for (int hd = 0; hd < 36; ++hd) {
      for (int climb : {-30, 0, 30}) {
        const double psi = hd * kPi / 18.0, gam = climb * kPi / 180.0;
        const double dx = dist * std::cos(gam) * std::cos(psi), dy = dist * std::cos(gam) * std::sin(psi),
                     dz = dist * std::sin(gam);
        const double T = 1.0 + 0.25 * dist;
        const auto n = static_cast<std::size_t>(std::lround(T / sample_dt));
        ManeuverTemplate tpl;
        tpl.label = "d" + std::to_string(dist) + "_h" + std::to_string(hd * 10) + "_c" + std::to_string(climb);
        tpl.params = {static_cast<double>(dist), psi, gam};
        tpl.body = Edge(3);
        for (std::size_t i = 0; i <= n; ++i) {
          const double tau = static_cast<double>(i) / static_cast<double>(n);
          const double s = detail::min_jerk(tau);
          const std::array<double, 3> p{s * dx, s * dy, s * dz};
          tpl.body.push_sample(tau * T, p);
        }
        tpl.body.control = ManeuverRef{lib.templates.size(), false};
        tpl.body.duration = T;
        tpl.body.cost = edge_cost(spec, tpl.body);
        tpl.v_start = dist * detail::min_jerk_rate(0.0) / T;
        tpl.v_end = dist * detail::min_jerk_rate(1.0) / T;
        tpl.compute_reach(lib.frame);
        lib.templates.push_back(std::move(tpl));
      }
    }
  }
  return lib;
}

/// Checks every library invariant; throws ValidationError naming the
/// offending template.
inline void validate_library(const ManeuverLibrary& lib, const DistanceSpec& spec) {
  if (lib.templates.empty()) throw ValidationError("maneuver library has no templates");
  constexpr std::size_t dim = 3;
  for (std::size_t i = 0; i < lib.templates.size(); ++i) {
    const auto& t = lib.templates[i];
    const std::string where = "template " + std::to_string(i) + " (" + t.label + "): ";
    if (t.body.dim() != dim) throw ValidationError(where + "wrong state dimension");
    if (auto err = check_edge_structure(t.body, std::numeric_limits<double>::infinity()); !err.empty())
      throw ValidationError(where + err);
    for (double v : t.body.sample(0))
      if (v != 0.0) throw ValidationError(where + "does not start at the origin");
    if (std::abs(t.v_start) > 1e-9 || std::abs(t.v_end) > 1e-9)
      throw ValidationError(where + "start and end velocities must be zero");
    const double c = edge_cost(spec, t.body);
    if (std::abs(c - t.body.cost) > 1e-9 * std::max(1.0, c)) throw ValidationError(where + "stored cost is inconsistent");
  }
}

inline constexpr int kLibraryFormatVersion = 1;

inline nlohmann::json library_to_json(const ManeuverLibrary& lib) {
  nlohmann::json j;
  j["format_version"] = kLibraryFormatVersion;
  j["system"] = lib.system;
  j["frame"] = to_string(lib.frame);
  auto& arr = j["templates"] = nlohmann::json::array();
  for (const auto& t : lib.templates) {
    nlohmann::json jt;
    jt["label"] = t.label;
    jt["params"] = t.params;
    jt["duration"] = t.body.duration;
    jt["cost"] = t.body.cost;
    jt["v_start"] = t.v_start;
    jt["v_end"] = t.v_end;
    auto& samples = jt["samples"] = nlohmann::json::array();
    for (std::size_t i = 0; i < t.body.sample_count(); ++i) {
      nlohmann::json row = nlohmann::json::array({t.body.time(i)});
      for (double v : t.body.sample(i)) row.push_back(v);
      samples.push_back(std::move(row));
    }
    arr.push_back(std::move(jt));
  }
  return j;
}

inline ManeuverLibrary library_from_json(const nlohmann::json& j, const DistanceSpec& spec) {
  try {
    if (j.at("format_version").get<int>() != kLibraryFormatVersion)
      throw ValidationError("unsupported maneuver library format_version");
    ManeuverLibrary lib;
    lib.system = j.at("system").get<std::string>();
    const auto frame = j.at("frame").get<std::string>();
    if (frame == "se2")
      lib.frame = FrameRule::se2;
    else if (frame == "translation")
      lib.frame = FrameRule::translation;
    else
      throw ValidationError("unknown frame '" + frame + "'");
    for (const auto& jt : j.at("templates")) {
      ManeuverTemplate t;
      t.label = jt.at("label").get<std::string>();
      t.params = jt.value("params", std::vector<double>{});
      t.v_start = jt.at("v_start").get<double>();
      t.v_end = jt.at("v_end").get<double>();
      t.body = Edge(3);
      for (const auto& row : jt.at("samples")) {
        const auto v = row.get<std::vector<double>>();
        if (v.size() != 4) throw ValidationError("template '" + t.label + "': sample rows need time plus 3 values");
        t.body.push_sample(v[0], std::span<const double>(v).subspan(1));
      }
      t.body.control = ManeuverRef{lib.templates.size(), false};
      t.body.duration = jt.at("duration").get<double>();
      t.body.cost = jt.at("cost").get<double>();
      t.compute_reach(lib.frame);
      lib.templates.push_back(std::move(t));
    }
    validate_library(lib, spec);
    return lib;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("maneuver library: ") + e.what());
  }
}

inline void save_library(const ManeuverLibrary& lib, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << library_to_json(lib).dump(1) << '\n';
}

inline ManeuverLibrary load_library(const std::string& path, const DistanceSpec& spec) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return library_from_json(j, spec);
}

/// Model with its default library attached (unicycle and quadrotor).
inline std::shared_ptr<SystemModel> make_system(const std::string& id) {
  auto m = make_bare_system(id);
  if (id == "unicycle")
    m->set_library(std::make_shared<ManeuverLibrary>(generate_unicycle_library(m->distance_spec())));
  else if (id == "quadrotor")
    m->set_library(std::make_shared<ManeuverLibrary>(generate_quadrotor_library(m->distance_spec())));
  return m;
}

}  // namespace gbrrt
