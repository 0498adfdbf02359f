#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gbrrt/edge.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

/// How one term of a distance function reads a state.
///  - coordinate: plain difference of one component.
///  - angle: shortest-angle difference of one component.
///  - velocity: one Cartesian component of a velocity given in polar form
///    (speed, flight-path angle, heading); used by the fixed-wing metric.
enum class TermKind { coordinate, angle, velocity };

struct DistanceTerm {
  TermKind kind = TermKind::coordinate;
  std::size_t dim = 0;
  double weight = 1.0;
  // velocity terms only
  int axis = 0;
  std::size_t speed_dim = 0;
  std::size_t pitch_dim = 0;
  std::size_t heading_dim = 0;
  // Terms flagged as velocity-like are dropped by the no-dynamics variant.
  bool dynamic = false;

  /// Value this term contributes for a state; angle terms return the raw
  /// (wrapped) angle and must be differenced with angle_diff.
  double feature(std::span<const double> s) const {
    switch (kind) {
      case TermKind::coordinate:
      case TermKind::angle:
        return s[dim];
      case TermKind::velocity: {
        const double v = s[speed_dim], pitch = s[pitch_dim], heading = s[heading_dim];
        if (axis == 0) return v * std::cos(pitch) * std::cos(heading);
        if (axis == 1) return v * std::cos(pitch) * std::sin(heading);
        return v * std::sin(pitch);
      }
    }
    return 0.0;
  }

  double diff(std::span<const double> a, std::span<const double> b) const {
    if (kind == TermKind::angle) return angle_diff(a[dim], b[dim]);
    return feature(a) - feature(b);
  }
};

/// A weighted Euclidean distance over features of the state:
/// sqrt(sum_i (w_i * diff_i)^2). Dimensions without a term are excluded.
struct DistanceSpec {
  std::string label = "full";
  std::size_t state_dim = 0;
  std::vector<DistanceTerm> terms;

  /// Builds a per-dimension spec. Zero weights exclude the dimension.
  static DistanceSpec per_dimension(const std::vector<double>& weights,
                                    const std::vector<DimKind>& kinds,
                                    const std::vector<bool>& dynamic = {}) {
    DistanceSpec spec;
    spec.state_dim = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      DistanceTerm t;
      t.kind = kinds[i] == DimKind::angular ? TermKind::angle : TermKind::coordinate;
      t.dim = i;
      t.weight = weights[i];
      t.dynamic = !dynamic.empty() && dynamic[i];
      spec.terms.push_back(t);
    }
    return spec;
  }

  /// The no-dynamics variant: the same spec with velocity terms dropped.
  DistanceSpec without_dynamics() const {
    DistanceSpec nd;
    nd.label = "no-dynamics";
    nd.state_dim = state_dim;
    for (const auto& t : terms)
      if (!t.dynamic) nd.terms.push_back(t);
    return nd;
  }

  void validate() const {
    bool any = false;
    for (const auto& t : terms) {
      if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
        throw ValidationError("distance weight must be finite and >= 0");
      any = any || t.weight > 0.0;
      const std::size_t hi = t.kind == TermKind::velocity
                                 ? std::max({t.speed_dim, t.pitch_dim, t.heading_dim})
                                 : t.dim;
      if (hi >= state_dim) throw ValidationError("distance term refers to a missing dimension");
    }
    if (!any) throw ValidationError("distance spec needs at least one positive weight");
  }
};

inline double distance(const DistanceSpec& spec, std::span<const double> a,
                       std::span<const double> b) {
  double sum = 0.0;
  for (const auto& t : spec.terms) {
    const double d = t.weight * t.diff(a, b);
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double distance(const DistanceSpec& spec, const State& a, const State& b) {
  if (a.size() != spec.state_dim || b.size() != spec.state_dim)
    throw InvalidStateError("distance: state dimension mismatch (expected " +
                            std::to_string(spec.state_dim) + ")");
  return distance(spec, a.view(), b.view());
}

/// Largest value the distance can take between two states inside `bounds`.
/// Linear features span hi - lo; angles span at most pi; polar velocity
/// components span twice the largest speed magnitude.
inline double max_distance(const DistanceSpec& spec, const Bounds& bounds) {
  double sum = 0.0;
  for (const auto& t : spec.terms) {
    double span = 0.0;
    switch (t.kind) {
      case TermKind::coordinate:
        span = bounds.hi[t.dim] - bounds.lo[t.dim];
        break;
      case TermKind::angle:
        span = std::min(bounds.hi[t.dim] - bounds.lo[t.dim], kPi);
        break;
      case TermKind::velocity:
        span = 2.0 * std::max(std::abs(bounds.lo[t.speed_dim]), std::abs(bounds.hi[t.speed_dim]));
        break;
    }
    sum += (t.weight * span) * (t.weight * span);
  }
  return std::sqrt(sum);
}

/// Discrete trajectory cost: the sum of distances between consecutive samples.
inline double edge_cost(const DistanceSpec& spec, const Edge& e) {
  double c = 0.0;
  for (std::size_t i = 1; i < e.sample_count(); ++i) c += distance(spec, e.sample(i - 1), e.sample(i));
  return c;
}

}  // namespace gbrrt
