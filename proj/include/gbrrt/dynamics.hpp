#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbrrt/edge.hpp"
#include "gbrrt/metrics.hpp"
#include "gbrrt/rng.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

struct ManeuverLibrary;

/// Per-system tuning row: heuristic radius, best-input count, exploitation
/// ratio, radius constant and maximum edge duration.
struct SystemDefaults {
  double delta_hr = 1.0;
  std::size_t n_best = 1;
  double q = 0.7;
  double gamma = 1.0;
  double t_max = 1.0;
};

/// A control-affine or general ODE x' = f(x, u) with its metric metadata.
class SystemModel {
 public:
  virtual ~SystemModel() = default;

  virtual void derivative(std::span<const double> x, std::span<const double> u, std::span<double> dx) const = 0;

  const std::string& id() const { return id_; }
  std::size_t state_dim() const { return kinds_.size(); }
  std::size_t control_dim() const { return control_bounds_.size(); }
  const std::vector<DimKind>& kinds() const { return kinds_; }
  const std::vector<std::string>& dim_names() const { return names_; }
  const Bounds& control_bounds() const { return control_bounds_; }
  /// Default limits on the non-positional dimensions; positional dimensions
  /// are left infinite and come from the scenario.
  const Bounds& default_bounds() const { return default_bounds_; }
  const DistanceSpec& distance_spec() const { return spec_; }
  DistanceSpec nd_spec() const { return spec_.without_dynamics(); }
  const std::vector<std::size_t>& positional_dims() const { return positional_; }
  /// Dimensions holding rates; goal regions leave them near zero.
  const std::vector<std::size_t>& velocity_dims() const { return velocity_; }
  const SystemDefaults& defaults() const { return defaults_; }

  /// Maneuver library for systems that use one; null for online integration.
  std::shared_ptr<const ManeuverLibrary> library() const { return library_; }
  void set_library(std::shared_ptr<const ManeuverLibrary> lib) { library_ = std::move(lib); }

 protected:
  std::string id_;
  std::vector<DimKind> kinds_;
  std::vector<std::string> names_;
  Bounds control_bounds_;
  Bounds default_bounds_;
  DistanceSpec spec_;
  std::vector<std::size_t> positional_;
  std::vector<std::size_t> velocity_;
  SystemDefaults defaults_;
  std::shared_ptr<const ManeuverLibrary> library_;
};

/// Fixed inputs of an integration: model, state box used for truncation
/// (null means unbounded) and step size.
struct PropagationContext {
  const SystemModel* model = nullptr;
  const Bounds* bounds = nullptr;
  double h = 1e-3;
};

namespace detail {

struct NoRecorder {
  void operator()(double, std::span<const double>) {}
};

struct EdgeRecorder {
  Edge* edge;
  void operator()(double t, std::span<const double> x) { edge->push_sample(t, x); }
};

// Integrates from x0 for t seconds (negated steps when backward). Calls rec
// for x0 and every in-bounds step. Leaves the last in-bounds state in x and
// returns the elapsed time reached; stops early when the state leaves the box.
template <class Rec>
double rk4_core(const PropagationContext& ctx, std::vector<double>& x, std::span<const double> u, double t,
                Direction dir, Rec&& rec) {
  const SystemModel& m = *ctx.model;
  const std::size_t n = x.size();
  const double sign = dir == Direction::forward ? 1.0 : -1.0;
  auto n_full = static_cast<std::size_t>(std::floor(t / ctx.h + 1e-9));
  double rem = t - static_cast<double>(n_full) * ctx.h;
  if (std::abs(rem) <= 1e-9 * ctx.h) rem = 0.0;
  const std::size_t n_steps = n_full + (rem > 0.0 ? 1 : 0);

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), next(n);
  rec(0.0, std::span<const double>(x));
  double reached = 0.0;
  for (std::size_t s = 0; s < n_steps; ++s) {
    const double step = s < n_full ? ctx.h : rem;
    const double hs = sign * step;
    m.derivative(x, u, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * hs * k1[i];
    m.derivative(tmp, u, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * hs * k2[i];
    m.derivative(tmp, u, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + hs * k3[i];
    m.derivative(tmp, u, k4);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = x[i] + hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i])) throw PropagationError("non-finite state during integration of " + m.id());
    }
    wrap_in_place(next, m.kinds());
    if (ctx.bounds && !ctx.bounds->contains(next)) break;
    x.swap(next);
    reached = s < n_full ? static_cast<double>(s + 1) * ctx.h : t;
    rec(reached, std::span<const double>(x));
  }
  return reached;
}

}  // namespace detail

/// Endpoint of an integration without recording samples. The free end is
/// the final state forward and the initial state backward.
struct PropagatedEnd {
  State state;
  double duration = 0.0;
  bool truncated = false;
};

inline std::optional<PropagatedEnd> rk4_endpoint(const PropagationContext& ctx, const State& x0,
                                                 const ControlInput& u, double t, Direction dir) {
  if (!(t > 0.0)) throw Error("integration time must be positive");
  std::vector<double> x = x0.values;
  const double reached = detail::rk4_core(ctx, x, u.values, t, dir, detail::NoRecorder{});
  if (reached <= 0.0) return std::nullopt;
  return PropagatedEnd{State(std::move(x)), reached, reached < t};
}

/// Integrates a constant control with classical RK4. A backward edge is
/// returned in forward time order, so its final state is x0. Leaving the
/// state box truncates the edge; an edge with no in-bounds step is none.
inline std::optional<Edge> rk4_propagate(const PropagationContext& ctx, const State& x0, const ControlInput& u,
                                         double t, Direction dir) {
  if (!(t > 0.0)) throw Error("integration time must be positive");
  if (x0.size() != ctx.model->state_dim()) throw InvalidStateError("propagate: state dimension mismatch");
  Edge e(x0.size());
  e.reserve(static_cast<std::size_t>(t / ctx.h) + 2);
  std::vector<double> x = x0.values;
  const double reached = detail::rk4_core(ctx, x, u.values, t, dir, detail::EdgeRecorder{&e});
  if (reached <= 0.0) return std::nullopt;
  if (dir == Direction::reverse) e.reverse_samples();
  e.control = u;
  e.duration = reached;
  e.direction = dir;
  e.truncated = reached < t;
  e.cost = edge_cost(ctx.model->distance_spec(), e);
  return e;
}

/// Uniform draw from the control box.
inline ControlInput sample_control(const SystemModel& m, Rng& rng) {
  const Bounds& b = m.control_bounds();
  std::vector<double> u(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) u[i] = rng.uniform(b.lo[i], b.hi[i]);
  return ControlInput(std::move(u));
}

/// Uniform duration on (0, t_max], rounded up to a whole number of steps.
inline double sample_duration(Rng& rng, double t_max, double h) {
  const double raw = t_max * (1.0 - rng.uniform01());
  const double k_max = std::max(1.0, std::floor(t_max / h + 1e-9));
  double k = std::ceil(raw / h - 1e-9);
  k = std::clamp(k, 1.0, k_max);
  return k * h;
}

/// Uniform state in a box; angular dimensions are wrapped.
inline State sample_state(const Bounds& b, std::span<const DimKind> kinds, Rng& rng) {
  std::vector<double> x(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
  wrap_in_place(x, kinds);
  return State(std::move(x));
}

}  // namespace gbrrt
