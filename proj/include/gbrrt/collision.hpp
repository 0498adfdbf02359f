#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "gbrrt/edge.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

/// Axis-aligned box in workspace coordinates.
struct BoxObstacle {
  std::vector<double> lo, hi;
  friend bool operator==(const BoxObstacle&, const BoxObstacle&) = default;
};

/// Vertical cylinder; the z range is ignored in planar workspaces.
struct CylinderObstacle {
  double cx = 0.0, cy = 0.0, radius = 1.0;
  double z_lo = -std::numeric_limits<double>::infinity();
  double z_hi = std::numeric_limits<double>::infinity();
  friend bool operator==(const CylinderObstacle&, const CylinderObstacle&) = default;
};

struct SphereObstacle {
  std::vector<double> center;
  double radius = 1.0;
  friend bool operator==(const SphereObstacle&, const SphereObstacle&) = default;
};

using Obstacle = std::variant<BoxObstacle, CylinderObstacle, SphereObstacle>;

/// Euclidean distance from p to the obstacle; zero inside.
inline double obstacle_distance(const Obstacle& o, std::span<const double> p) {
  return std::visit(
      [&](const auto& ob) -> double {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, BoxObstacle>) {
          double s = 0.0;
          for (std::size_t i = 0; i < p.size(); ++i) {
            const double d = std::max({ob.lo[i] - p[i], 0.0, p[i] - ob.hi[i]});
            s += d * d;
          }
          return std::sqrt(s);
        } else if constexpr (std::is_same_v<T, CylinderObstacle>) {
          const double radial = std::max(std::hypot(p[0] - ob.cx, p[1] - ob.cy) - ob.radius, 0.0);
          const double axial = p.size() > 2 ? std::max({ob.z_lo - p[2], 0.0, p[2] - ob.z_hi}) : 0.0;
          return std::hypot(radial, axial);
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - ob.center[i]) * (p[i] - ob.center[i]);
          return std::max(std::sqrt(s) - ob.radius, 0.0);
        }
      },
      o);
}

/// Returns an empty string when the obstacle is well formed for a workspace
/// of dimension `dim`.
inline std::string check_obstacle(const Obstacle& o, std::size_t dim) {
  return std::visit(
      [&](const auto& ob) -> std::string {
        using T = std::decay_t<decltype(ob)>;
        if constexpr (std::is_same_v<T, BoxObstacle>) {
          if (ob.lo.size() != dim || ob.hi.size() != dim) return "box extents must have the workspace dimension";
          for (std::size_t i = 0; i < dim; ++i)
            if (!(ob.lo[i] < ob.hi[i])) return "box needs lo < hi in every dimension";
        } else if constexpr (std::is_same_v<T, CylinderObstacle>) {
          if (dim < 2) return "cylinders need a workspace of at least two dimensions";
          if (!(ob.radius > 0.0)) return "cylinder radius must be positive";
          if (!(ob.z_lo < ob.z_hi)) return "cylinder needs z_lo < z_hi";
        } else {
          if (ob.center.size() != dim) return "sphere center must have the workspace dimension";
          if (!(ob.radius > 0.0)) return "sphere radius must be positive";
        }
        return {};
      },
      o);
}

/// Obstacles and robot sphere over the positional dimensions of a state.
struct CollisionScene {
  std::vector<std::size_t> positional_dims;
  Bounds workspace;  // over positional dimensions only
  std::vector<Obstacle> obstacles;
  double robot_radius = 0.0;
  double resolution = 0.0;  // 0 selects the default

  double check_resolution() const {
    if (resolution > 0.0) return resolution;
    return robot_radius > 0.0 ? robot_radius / 2.0 : 0.05;
  }

  void position_of(std::span<const double> s, std::span<double> p) const {
    for (std::size_t i = 0; i < positional_dims.size(); ++i) p[i] = s[positional_dims[i]];
  }

  /// `margin` inflates the robot sphere beyond robot_radius.
  bool position_in_collision(std::span<const double> p, double margin = 0.0) const {
    const double r = robot_radius + margin;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] - r < workspace.lo[i] || p[i] + r > workspace.hi[i]) return true;
    for (const auto& o : obstacles)
      if (obstacle_distance(o, p) <= r) return true;
    return false;
  }
};

inline bool state_in_collision(const CollisionScene& scene, std::span<const double> s) {
  double buf[8];
  std::span<double> p(buf, scene.positional_dims.size());
  scene.position_of(s, p);
  return scene.position_in_collision(p);
}

inline bool state_in_collision(const CollisionScene& scene, const State& s) {
  return state_in_collision(scene, s.view());
}

/// Checks every sample plus evenly spaced points between consecutive samples
/// so that checked positions are at most `resolution` apart. With
/// `conservative`, each point must clear the obstacles by an extra half
/// resolution, which makes the whole polyline between samples free.
inline bool edge_in_collision(const CollisionScene& scene, const Edge& e, double resolution = 0.0,
                              bool conservative = false) {
  const double res = resolution > 0.0 ? resolution : scene.check_resolution();
  const double margin = conservative ? res / 2.0 : 0.0;
  const std::size_t np = scene.positional_dims.size();
  double a[8], b[8], m[8];
  std::span<double> pa(a, np), pb(b, np), pm(m, np);
  for (std::size_t i = 0; i < e.sample_count(); ++i) {
    scene.position_of(e.sample(i), pb);
    if (scene.position_in_collision(pb, margin)) return true;
    if (i > 0) {
      double len2 = 0.0;
      for (std::size_t k = 0; k < np; ++k) len2 += (pb[k] - pa[k]) * (pb[k] - pa[k]);
      const auto parts = static_cast<std::size_t>(std::ceil(std::sqrt(len2) / res));
      for (std::size_t j = 1; j < parts; ++j) {
        const double f = static_cast<double>(j) / static_cast<double>(parts);
        for (std::size_t k = 0; k < np; ++k) pm[k] = pa[k] + f * (pb[k] - pa[k]);
        if (scene.position_in_collision(pm, margin)) return true;
      }
    }
    std::copy_n(b, np, a);
  }
  return false;
}

}  // namespace gbrrt
