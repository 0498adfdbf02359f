#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gbrrt/collision.hpp"
#include "gbrrt/config.hpp"
#include "gbrrt/dynamics.hpp"
#include "gbrrt/frontier_queue.hpp"
#include "gbrrt/maneuver.hpp"
#include "gbrrt/rng.hpp"
#include "gbrrt/spatial_index.hpp"
#include "gbrrt/tree.hpp"

namespace gbrrt {

enum class PlannerKind { gbrrt, gabrrt, rrt };

inline const char* to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::gbrrt: return "gbrrt";
    case PlannerKind::gabrrt: return "gabrrt";
    case PlannerKind::rrt: return "rrt";
  }
  return "?";
}

inline PlannerKind parse_planner(const std::string& s) {
  if (s == "gbrrt") return PlannerKind::gbrrt;
  if (s == "gabrrt") return PlannerKind::gabrrt;
  if (s == "rrt") return PlannerKind::rrt;
  throw ValidationError("unknown planner '" + s + "'");
}

/// Where the forward edge of an iteration came from.
enum class EdgeSource { none, exploit, fast, random };

/// A proposed edge together with the tree node it hangs from.
struct Candidate {
  NodeId parent = 0;
  Edge edge;
};

struct RunCounters {
  std::size_t iterations = 0;
  std::size_t pops = 0;
  std::size_t exploit_attempts = 0;
  std::size_t exploit_edges = 0;
  std::size_t fast_attempts = 0;
  std::size_t random_attempts = 0;
  std::size_t null_edges = 0;
  std::size_t forward_collisions = 0;
  std::size_t reverse_collisions = 0;
  std::size_t queue_pushes = 0;
  std::size_t queue_updates = 0;
  std::size_t rk_events = 0;
};

/// Forward-edge selection of one iteration. With probability q the frontier
/// is popped: a popped node is exploited, an empty queue falls back to fast
/// exploration. Random exploration runs when the draw is >= q or the chosen
/// branch produced no edge. Returns the edge and the branch that made it.
template <class Cand, class PopFn, class ExploitFn, class FastFn, class RandomFn>
std::pair<std::optional<Cand>, EdgeSource> choose_forward_edge(Rng& rng, double q, PopFn&& pop, ExploitFn&& exploit,
                                                               FastFn&& fast, RandomFn&& random) {
  const double c_rand = rng.uniform01();
  std::optional<Cand> e;
  EdgeSource src = EdgeSource::none;
  if (c_rand < q) {
    if (auto x_pop = pop()) {
      e = exploit(*x_pop);
      src = EdgeSource::exploit;
    } else {
      e = fast();
      src = EdgeSource::fast;
    }
  }
  if (c_rand >= q || !e) {
    e = random();
    src = EdgeSource::random;
  }
  return {std::move(e), src};
}

enum class StepStatus { running, solved, exhausted };

struct StepOutcome {
  StepStatus status = StepStatus::running;
  std::optional<Path> path;
};

/// Mutable state of one planning attempt plus every subroutine of the
/// planners. Subroutines are public so tests can drive them one at a time.
class PlannerRun {
 public:
  using Clock = std::chrono::steady_clock;

  PlannerRun(PlannerKind kind, std::shared_ptr<const SystemModel> model, Scenario scenario, PlannerConfig config)
      : kind_(kind),
        model_(std::move(model)),
        scenario_(std::move(scenario)),
        config_(std::move(config)),
        goal_region_(scenario_.goal_region(*model_)),
        scene_(scenario_.scene(*model_)),
        full_spec_(model_->distance_spec()),
        nd_spec_(model_->nd_spec()),
        start_time_(Clock::now()),
        forward(TreeKind::forward, full_spec_, wrap_angles(scenario_.start, model_->kinds()), config_.range_epsilon),
        streams(config_.seed) {
    config_.validate();
    ctx_.model = model_.get();
    ctx_.bounds = &scenario_.bounds;
    ctx_.h = config_.step;
    schedule_ = RadiusSchedule{config_.gamma, model_->state_dim(), config_.radius_exponent, config_.delta_hr};
    const State goal = wrap_angles(scenario_.goal, model_->kinds());
    if (kind_ == PlannerKind::gbrrt) {
      reverse.emplace(TreeKind::reverse, full_spec_, goal, config_.range_epsilon);
    } else if (kind_ == PlannerKind::gabrrt) {
      reverse.emplace(TreeKind::reverse_nd, nd_spec_, goal, config_.range_epsilon);
      forward_nd_.emplace(nd_spec_, config_.range_epsilon);
      forward_nd_->insert(0, forward.state(0));
    }
    if (reverse) gap_ = distance(reverse->spec(), forward.state(0), reverse->state(0));
  }

  PlannerKind kind() const { return kind_; }
  const SystemModel& model() const { return *model_; }
  const Scenario& scenario() const { return scenario_; }
  const PlannerConfig& config() const { return config_; }
  const GoalRegion& goal_region() const { return goal_region_; }
  const CollisionScene& scene() const { return scene_; }
  const PropagationContext& context() const { return ctx_; }
  double elapsed_s() const { return std::chrono::duration<double>(Clock::now() - start_time_).count(); }
  double min_tree_gap() const { return gap_; }
  EdgeSource last_source() const { return last_source_; }

  /// Metric of the reverse side: d_X for GBRRT, the no-dynamics metric for GABRRT.
  const DistanceSpec& reverse_spec() const { return kind_ == PlannerKind::gabrrt ? nd_spec_ : full_spec_; }

  /// r_k from the reverse tree size.
  double radius() const {
    if (config_.constant_radius) return config_.delta_hr;
    return schedule_(reverse ? reverse->size() : forward.size());
  }

  // ---- edge generation -------------------------------------------------

  /// One random constant-control edge (or one random maneuver).
  std::optional<Edge> monte_carlo_prop(const State& from, Direction dir, Rng& rng) const {
    if (auto lib = model_->library()) {
      const std::size_t idx = rng.index(lib->size());
      return instantiate(*lib, idx, from, dir, ctx_.bounds, full_spec_);
    }
    const double t = sample_duration(rng, config_.t_max, config_.step);
    const ControlInput u = sample_control(*model_, rng);
    return rk4_propagate(ctx_, from, u, t, dir);
  }

  /// N_B candidates from `from`; keeps the one whose free end is closest to
  /// `toward` under `select`. None only when every candidate is empty.
  std::optional<Edge> best_input_prop(const State& from, const State& toward, Direction dir, Rng& rng,
                                      const DistanceSpec& select) const {
    if (auto lib = model_->library()) {
      std::vector<std::size_t> idx;
      if (config_.n_best >= lib->size()) {
        idx.resize(lib->size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      } else {
        idx.resize(config_.n_best);
        for (auto& i : idx) i = rng.index(lib->size());
      }
      return best_template(*lib, idx, from, toward, dir, ctx_.bounds, full_spec_, &select);
    }
    std::optional<ControlInput> best_u;
    double best_t = 0.0, best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < config_.n_best; ++i) {
      const double t = sample_duration(rng, config_.t_max, config_.step);
      ControlInput u = sample_control(*model_, rng);
      auto end = rk4_endpoint(ctx_, from, u, t, dir);
      if (!end) continue;
      const double d = distance(select, end->state.view(), toward.view());
      if (d < best_d) {
        best_d = d;
        best_u = std::move(u);
        best_t = t;
      }
    }
    if (!best_u) return std::nullopt;
    return rk4_propagate(ctx_, from, *best_u, best_t, dir);
  }

  State random_state(Rng& rng) const { return sample_state(scenario_.bounds, model_->kinds(), rng); }

  std::optional<Candidate> for_srch_fast_explore() {
    ++counters.fast_attempts;
    const State x_rand = random_state(streams.forward);
    const auto near = forward.nearest(x_rand);
    auto e = best_input_prop(forward.state(near->id), x_rand, Direction::forward, streams.forward, full_spec_);
    if (!e) return std::nullopt;
    return Candidate{near->id, std::move(*e)};
  }

  std::optional<Candidate> for_srch_random_explore() {
    ++counters.random_attempts;
    const State x_rand = random_state(streams.forward);
    const auto near = forward.nearest(x_rand);
    auto e = monte_carlo_prop(forward.state(near->id), Direction::forward, streams.forward);
    if (!e) return std::nullopt;
    return Candidate{near->id, std::move(*e)};
  }

  /// Best reverse node within r_k of x_pop by g + d + h, then best-input
  /// propagation toward it. None when the range is empty.
  std::optional<Candidate> for_srch_exploit(NodeId x_pop, double r_k) {
    ++counters.exploit_attempts;
    const State& xs = forward.state(x_pop);
    const auto near = reverse->range(xs, r_k, config_.range_mode);
    if (near.empty()) return std::nullopt;
    const double g = forward.cost(x_pop);
    NodeId best = near.front().id;
    double best_v = std::numeric_limits<double>::infinity();
    for (const auto& hit : near) {
      const double v = g + hit.dist + reverse->cost(hit.id);
      if (v < best_v) {
        best_v = v;
        best = hit.id;
      }
    }
    auto e = best_input_prop(xs, reverse->state(best), Direction::forward, streams.forward, reverse_spec());
    if (!e) return std::nullopt;
    ++counters.exploit_edges;
    return Candidate{x_pop, std::move(*e)};
  }

  /// Backward best-input edge whose final state is the nearest reverse node.
  std::optional<Candidate> rev_srch_fast_explore() {
    const State x_rand = random_state(streams.reverse);
    const auto near = reverse->nearest(x_rand);
    auto e = best_input_prop(reverse->state(near->id), x_rand, Direction::reverse, streams.reverse, full_spec_);
    if (!e) return std::nullopt;
    return Candidate{near->id, std::move(*e)};
  }

  /// Straight segment of no-dynamics length at most epsilon from the
  /// nearest reverse node toward a random state. Dimensions outside the
  /// no-dynamics metric keep the near node's values.
  std::optional<Candidate> rev_extend_nd() {
    const State x_rand = random_state(streams.reverse);
    const auto near = reverse->nearest(x_rand);
    const State& xn = reverse->state(near->id);
    if (!(near->dist > 0.0)) return std::nullopt;
    const double eps = config_.epsilon();
    const double f = std::min(1.0, eps / near->dist);
    State x_new = xn;
    for (const auto& t : nd_spec_.terms) {
      if (t.kind == TermKind::angle)
        x_new[t.dim] = wrap_angle(xn[t.dim] + f * angle_diff(x_rand[t.dim], xn[t.dim]));
      else if (t.kind == TermKind::coordinate)
        x_new[t.dim] = f < 1.0 ? xn[t.dim] + f * (x_rand[t.dim] - xn[t.dim]) : x_rand[t.dim];
    }
    const double len = distance(nd_spec_, x_new, xn);
    if (!(len > 0.0)) return std::nullopt;
    Edge e(xn.size());
    e.push_sample(0.0, x_new.view());
    const double dur = config_.t_max * std::min(1.0, len / eps);
    e.push_sample(dur, xn.view());
    e.control = StraightLine{};
    e.duration = dur;
    e.direction = Direction::reverse;
    e.cost = len;
    return Candidate{near->id, std::move(e)};
  }

  // ---- queue maintenance -----------------------------------------------

  /// Pushes a new forward node keyed by distance to its nearest reverse node
  /// plus that node's cost-to-goal, when the two are within r_k.
  void insert_to_priority_queue(NodeId x_for, double r_k) {
    const auto closest = reverse->nearest(forward.state(x_for));
    if (!closest || closest->dist > r_k) return;
    queue.push(x_for, closest->dist + reverse->cost(closest->id));
    ++counters.queue_pushes;
  }

  /// Lowers the key of the forward node nearest to a new reverse node (or of
  /// every forward node in range, with the range-update ablation).
  void update_priority_queue(NodeId x_rev, double r_k) {
    const State& xr = reverse->state(x_rev);
    const double h = reverse->cost(x_rev);
    const SpatialIndex& fwd = forward_nd_ ? *forward_nd_ : forward.index();
    if (config_.ablations.range_update) {
      for (const auto& hit : fwd.range(xr, r_k, config_.range_mode))
        if (queue.decrease_key(hit.id, hit.dist + h)) ++counters.queue_updates;
      return;
    }
    const auto closest = fwd.nearest(xr);
    if (!closest || closest->dist > r_k) return;
    if (queue.decrease_key(closest->id, closest->dist + h)) ++counters.queue_updates;
  }

  // ---- tree insertion ---------------------------------------------------

  NodeId add_forward(Candidate c) {
    const NodeId id = forward.add_child(c.parent, std::move(c.edge));
    if (forward_nd_) forward_nd_->insert(id, forward.state(id));
    if (reverse) {
      const auto n = reverse->nearest(forward.state(id));
      gap_ = std::min(gap_, n->dist);
    }
    return id;
  }

  NodeId add_reverse(Candidate c) {
    const NodeId id = reverse->add_child(c.parent, std::move(c.edge));
    const SpatialIndex& fwd = forward_nd_ ? *forward_nd_ : forward.index();
    gap_ = std::min(gap_, fwd.nearest(reverse->state(id))->dist);
    return id;
  }

  // ---- iterations -------------------------------------------------------

  StepOutcome step() {
    if (kind_ == PlannerKind::rrt) return rrt_baseline_step();
    return bidirectional_step();
  }

  /// One iteration of GBRRT or GABRRT (selected by the planner kind).
  StepOutcome bidirectional_step() {
    const std::size_t k = counters.iterations++;
    const double r_k = radius();
    const auto& ab = config_.ablations;

    auto rev = kind_ == PlannerKind::gabrrt ? rev_extend_nd() : rev_srch_fast_explore();
    if (rev) {
      if (edge_in_collision(scene_, rev->edge, 0.0, true)) {
        ++counters.reverse_collisions;
      } else {
        const NodeId x_rev = add_reverse(std::move(*rev));
        if (!ab.no_queue_update && !ab.no_exploit) update_priority_queue(x_rev, r_k);
      }
    }

    auto pop = [&]() -> std::optional<NodeId> {
      if (auto top = queue.pop_min()) {
        ++counters.pops;
        return top->id;
      }
      return std::nullopt;
    };
    auto exploit = [&](NodeId x) { return for_srch_exploit(x, r_k); };
    auto fast = [&]() { return ab.no_fast_explore ? for_srch_random_explore() : for_srch_fast_explore(); };
    auto random = [&]() { return for_srch_random_explore(); };
    auto [cand, src] = choose_forward_edge<Candidate>(streams.forward, config_.exploit_ratio(k), pop, exploit, fast, random);
    last_source_ = src;

    StepOutcome out;
    if (!cand) {
      ++counters.null_edges;
    } else if (edge_in_collision(scene_, cand->edge, 0.0, true)) {
      ++counters.forward_collisions;
    } else {
      const NodeId x_for = add_forward(std::move(*cand));
      if (goal_region_.contains(forward.state(x_for))) {
        if (gap_ <= r_k) ++counters.rk_events;
        return solved(x_for);
      }
      if (!ab.no_exploit) insert_to_priority_queue(x_for, r_k);
    }
    if (gap_ <= r_k) ++counters.rk_events;
    return out;
  }

  /// One iteration of best-input RRT with goal bias.
  StepOutcome rrt_baseline_step() {
    ++counters.iterations;
    Rng& rng = streams.forward;
    const bool to_goal = rng.uniform01() < config_.goal_bias;
    const State x_rand = to_goal ? goal_region_.center : random_state(rng);
    const auto near = forward.nearest(x_rand);
    ++counters.fast_attempts;
    auto e = best_input_prop(forward.state(near->id), x_rand, Direction::forward, rng, full_spec_);
    last_source_ = EdgeSource::fast;
    if (!e) {
      ++counters.null_edges;
      return {};
    }
    if (edge_in_collision(scene_, *e, 0.0, true)) {
      ++counters.forward_collisions;
      return {};
    }
    const NodeId x_for = add_forward(Candidate{near->id, std::move(*e)});
    if (goal_region_.contains(forward.state(x_for))) return solved(x_for);
    return {};
  }

  StepOutcome solved(NodeId leaf) {
    Path p = path_reconstruct(forward, leaf);
    p.found_at_s = elapsed_s();
    p.found_at_iteration = counters.iterations;
    return {StepStatus::solved, std::move(p)};
  }

  /// Tree and queue audits; empty when consistent.
  std::string audit() const {
    if (auto e = forward.audit(); !e.empty()) return "forward tree: " + e;
    if (reverse)
      if (auto e = reverse->audit(); !e.empty()) return "reverse tree: " + e;
    if (auto e = queue.audit(); !e.empty()) return "queue: " + e;
    for (const auto& entry : queue.entries())
      if (entry.id >= forward.size()) return "queue holds an id outside the forward tree";
    return {};
  }

 private:
  PlannerKind kind_;
  std::shared_ptr<const SystemModel> model_;
  Scenario scenario_;
  PlannerConfig config_;
  GoalRegion goal_region_;
  CollisionScene scene_;
  DistanceSpec full_spec_;
  DistanceSpec nd_spec_;
  PropagationContext ctx_;
  RadiusSchedule schedule_;
  std::optional<SpatialIndex> forward_nd_;
  double gap_ = std::numeric_limits<double>::infinity();
  EdgeSource last_source_ = EdgeSource::none;
  Clock::time_point start_time_;

 public:
  SearchTree forward;
  std::optional<SearchTree> reverse;
  FrontierQueue queue;
  RunStreams streams;
  RunCounters counters;
};

/// Per-run summary including the tree statistics.
struct RunMetrics {
  bool success = false;
  double solution_time_s = 0.0;
  std::size_t iterations = 0;
  double cost = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_forward = 0;
  std::size_t n_reverse = 0;
  double r_rk = 0.0;    // % of iterations with the trees within r_k
  double r_edge = 0.0;  // delta_hr / mean edge cost
  double r_x = 0.0;     // delta_hr / x extent
  double r_max = 0.0;   // delta_hr / d_X between opposite bounds corners
  RunCounters counters;
};

struct RunResult {
  std::optional<Path> path;
  RunMetrics metrics;
};

/// delta_hr over d_X between the low and high corners of the bounds box.
inline double r_max_statistic(double delta_hr, const DistanceSpec& spec, const Bounds& b) {
  return delta_hr / distance(spec, b.lo, b.hi);
}

inline RunMetrics collect_metrics(const PlannerRun& run, const std::optional<Path>& path, double time_s) {
  RunMetrics m;
  const auto& cfg = run.config();
  m.success = path.has_value();
  m.solution_time_s = path ? time_s : cfg.s_max;
  m.iterations = run.counters.iterations;
  if (path) m.cost = path->cost;
  m.n_forward = run.forward.size();
  m.n_reverse = run.reverse ? run.reverse->size() : 0;
  m.r_rk = m.iterations ? 100.0 * static_cast<double>(run.counters.rk_events) / static_cast<double>(m.iterations) : 0.0;
  double total = 0.0;
  std::size_t edges = 0;
  for (std::size_t i = 1; i < run.forward.size(); ++i) total += run.forward.node(static_cast<NodeId>(i)).edge->cost;
  edges += run.forward.size() - 1;
  if (run.reverse) {
    for (std::size_t i = 1; i < run.reverse->size(); ++i) total += run.reverse->node(static_cast<NodeId>(i)).edge->cost;
    edges += run.reverse->size() - 1;
  }
  m.r_edge = edges && total > 0.0 ? cfg.delta_hr / (total / static_cast<double>(edges)) : 0.0;
  m.r_x = cfg.delta_hr / run.scenario().x_extent();
  m.r_max = r_max_statistic(cfg.delta_hr, run.model().distance_spec(), run.scenario().bounds);
  m.counters = run.counters;
  return m;
}

/// Steps until solved, out of iterations, or out of wall-clock time. The
/// time budget is checked between iterations.
inline RunResult run_planner(PlannerRun& run) {
  const auto& cfg = run.config();
  if (run.goal_region().contains(run.forward.state(0))) {
    Path p;
    p.found_at_s = run.elapsed_s();
    return {p, collect_metrics(run, p, p.found_at_s)};
  }
  while (run.counters.iterations < cfg.m_iter && run.elapsed_s() < cfg.s_max) {
    auto out = run.step();
    if (out.status == StepStatus::solved) return {out.path, collect_metrics(run, out.path, out.path->found_at_s)};
  }
  return {std::nullopt, collect_metrics(run, std::nullopt, cfg.s_max)};
}

inline RunResult run_planner(PlannerKind kind, std::shared_ptr<const SystemModel> model, const Scenario& scenario,
                             const PlannerConfig& config) {
  PlannerRun run(kind, std::move(model), scenario, config);
  return run_planner(run);
}

/// Largest componentwise difference, wrapped on angular dimensions.
inline double state_gap(const State& a, const State& b, std::span<const DimKind> kinds) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, kinds[i] == DimKind::angular ? angle_dist(a[i], b[i]) : std::abs(a[i] - b[i]));
  return worst;
}

/// Re-creates an edge from its stored control and initial state.
inline std::optional<Edge> regenerate_edge(const SystemModel& m, const Scenario& sc, const Edge& e, double step) {
  PropagationContext ctx{&m, &sc.bounds, step};
  if (const auto* u = std::get_if<ControlInput>(&e.control)) {
    return rk4_propagate(ctx, e.initial(), *u, e.duration, Direction::forward);
  }
  if (const auto* ref = std::get_if<ManeuverRef>(&e.control)) {
    if (!m.library()) return std::nullopt;
    return instantiate(*m.library(), ref->index, e.initial(), Direction::forward, &sc.bounds, m.distance_spec());
  }
  return std::nullopt;
}

/// Every way a returned path can be wrong; empty when the path is valid.
inline std::vector<std::string> check_path(const Path& p, const SystemModel& m, const Scenario& sc,
                                           const PlannerConfig& cfg, double tol = 1e-6) {
  std::vector<std::string> errs;
  const auto& kinds = m.kinds();
  const GoalRegion goal = sc.goal_region(m);
  const State start = wrap_angles(sc.start, kinds);
  if (p.edges.empty()) {
    if (!goal.contains(start)) errs.push_back("empty path but start is not in the goal region");
    return errs;
  }
  if (p.edges.front().initial() != start) errs.push_back("path does not begin at the start state");
  if (!goal.contains(p.edges.back().final())) errs.push_back("path does not end in the goal region");
  CollisionScene scene = sc.scene(m);
  double total = 0.0;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const Edge& e = p.edges[i];
    const std::string tag = "edge " + std::to_string(i) + ": ";
    if (auto err = check_edge_structure(e, std::max(cfg.t_max, 1e9)); !err.empty()) errs.push_back(tag + err);
    if (i + 1 < p.edges.size() && e.final() != p.edges[i + 1].initial()) errs.push_back(tag + "does not chain to the next edge");
    if (std::abs(edge_cost(m.distance_spec(), e) - e.cost) > 1e-9 * std::max(1.0, e.cost)) errs.push_back(tag + "stored cost is inconsistent");
    const auto again = regenerate_edge(m, sc, e, cfg.step);
    if (!again)
      errs.push_back(tag + "cannot be regenerated");
    else if (state_gap(again->final(), e.final(), kinds) > tol)
      errs.push_back(tag + "regenerated final state differs");
    if (edge_in_collision(scene, e, scene.check_resolution() / 2.0)) errs.push_back(tag + "collides at double resolution");
    total += e.cost;
  }
  if (std::abs(total - p.cost) > 1e-9 * std::max(1.0, total)) errs.push_back("path cost differs from the sum of edge costs");
  return errs;
}

}  // namespace gbrrt
