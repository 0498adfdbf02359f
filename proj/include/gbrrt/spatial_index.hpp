#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gbrrt/metrics.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

enum class RangeMode { exact, approximate };

/// Dynamic kd-tree over the feature space of a DistanceSpec.
///
/// One point per node; every node keeps the bounding box of its subtree in
/// feature coordinates, which gives both a lower bound (pruning) and an upper
/// bound (bulk reporting in approximate range mode) on the distance to every
/// point below it. Angle features are boxed in their wrapped coordinates and
/// bounded with the circular distance. Insertion is unbalanced descent plus
/// scapegoat rebuilds, so depth stays logarithmic for any insertion order.
///
/// Candidate distances are always evaluated with gbrrt::distance on the
/// stored states, so results agree bit-for-bit with a linear scan.
class SpatialIndex {
 public:
  struct Hit {
    NodeId id;
    double dist;
  };

  explicit SpatialIndex(DistanceSpec spec, double range_epsilon = 0.25)
      : spec_(std::move(spec)), eps_(range_epsilon), nf_(spec_.terms.size()) {}

  const DistanceSpec& spec() const { return spec_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  double range_epsilon() const { return eps_; }

  bool contains(NodeId id) const { return slot_of_.count(id) != 0; }

  const State& state(NodeId id) const {
    auto it = slot_of_.find(id);
    if (it == slot_of_.end()) throw NotFoundError("spatial index: unknown id " + std::to_string(id));
    return nodes_[it->second].state;
  }

  void insert(NodeId id, const State& s) {
    if (s.size() != spec_.state_dim) throw InvalidStateError("spatial index: state dimension mismatch");
    if (slot_of_.count(id)) throw DuplicateIdError("spatial index: duplicate id " + std::to_string(id));
    Node n;
    n.id = id;
    n.state = s;
    n.feat.resize(nf_);
    for (std::size_t j = 0; j < nf_; ++j) n.feat[j] = spec_.terms[j].feature(s.view());
    n.lo = n.feat;
    n.hi = n.feat;
    const auto slot = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(std::move(n));
    slot_of_[id] = slot;

    if (nodes_.size() == 1) {
      root_ = slot;
      nodes_[slot].split = 0;
      return;
    }
    // Descend, widening boxes and counting sizes along the way.
    std::vector<std::uint32_t> path;
    std::uint32_t cur = root_;
    const auto& f = nodes_[slot].feat;
    while (true) {
      Node& c = nodes_[cur];
      path.push_back(cur);
      c.size += 1;
      grow_box(c, f);
      const bool left = nf_ == 0 || f[c.split] < c.feat[c.split];
      std::uint32_t& child = left ? c.left : c.right;
      if (child == kNone) {
        child = slot;
        nodes_[slot].split = nf_ == 0 ? 0 : (c.split + 1) % nf_;
        break;
      }
      cur = child;
    }
    // Scapegoat check: rebuild the topmost unbalanced subtree on a deep path.
    const double depth_limit = std::log(static_cast<double>(nodes_.size())) / std::log(1.0 / kAlpha) + 2.0;
    if (static_cast<double>(path.size()) > depth_limit) {
      for (std::size_t k = 0; k < path.size(); ++k) {
        const Node& c = nodes_[path[k]];
        const std::size_t ls = c.left == kNone ? 0 : nodes_[c.left].size;
        const std::size_t rs = c.right == kNone ? 0 : nodes_[c.right].size;
        if (static_cast<double>(std::max(ls, rs)) > kAlpha * static_cast<double>(c.size)) {
          rebuild(path, k);
          break;
        }
      }
    }
  }

  /// Nearest point; ties go to the smallest id. Empty index gives nullopt.
  std::optional<Hit> nearest(const State& q) const {
    if (nodes_.empty()) return std::nullopt;
    check_query(q);
    const auto qf = features(q);
    Hit best{std::numeric_limits<NodeId>::max(), std::numeric_limits<double>::infinity()};
    nearest_rec(root_, q, qf, best);
    return best;
  }

  /// All points within r of q, sorted by id. In approximate mode the result
  /// may additionally hold points within r * (1 + epsilon).
  std::vector<Hit> range(const State& q, double r, RangeMode mode = RangeMode::exact) const {
    if (!(r >= 0.0)) throw Error("range query radius must be >= 0");
    std::vector<Hit> out;
    if (nodes_.empty()) return out;
    check_query(q);
    const auto qf = features(q);
    range_rec(root_, q, qf, r, mode, out);
    std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) { return a.id < b.id; });
    return out;
  }

  /// Depth of the deepest leaf; for tests and diagnostics.
  std::size_t height() const { return nodes_.empty() ? 0 : height_rec(root_); }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& n : nodes_) fn(n.id, n.state);
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  static constexpr double kAlpha = 0.7;
  // Slack on pruning bounds so that rounding never hides an exact tie.
  static constexpr double kSlack = 1e-12;

  struct Node {
    NodeId id = 0;
    State state;
    std::vector<double> feat;
    std::vector<double> lo, hi;
    std::uint32_t left = kNone, right = kNone;
    std::size_t split = 0;
    std::size_t size = 1;
  };

  void check_query(const State& q) const {
    if (q.size() != spec_.state_dim) throw InvalidStateError("spatial index: query dimension mismatch");
  }

  std::vector<double> features(const State& q) const {
    std::vector<double> f(nf_);
    for (std::size_t j = 0; j < nf_; ++j) f[j] = spec_.terms[j].feature(q.view());
    return f;
  }

  static void grow_box(Node& n, const std::vector<double>& f) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      n.lo[j] = std::min(n.lo[j], f[j]);
      n.hi[j] = std::max(n.hi[j], f[j]);
    }
  }

  // Per-feature lower and upper bounds on |diff| between q and any point
  // whose feature lies in [lo, hi].
  void feature_bounds(std::size_t j, double q, double lo, double hi, double& dmin, double& dmax) const {
    if (spec_.terms[j].kind == TermKind::angle) {
      if (q >= lo && q <= hi) {
        dmin = 0.0;
      } else {
        dmin = std::min(angle_dist(q, lo), angle_dist(q, hi));
      }
      const double antipode = q < 0.0 ? q + kPi : q - kPi;
      if (antipode >= lo && antipode <= hi)
        dmax = kPi;
      else
        dmax = std::max(angle_dist(q, lo), angle_dist(q, hi));
    } else {
      dmin = q < lo ? lo - q : (q > hi ? q - hi : 0.0);
      dmax = std::max(std::abs(q - lo), std::abs(q - hi));
    }
  }

  double box_min_dist(const Node& n, const std::vector<double>& qf) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < nf_; ++j) {
      double dmin, dmax;
      feature_bounds(j, qf[j], n.lo[j], n.hi[j], dmin, dmax);
      const double w = spec_.terms[j].weight * dmin;
      sum += w * w;
    }
    return std::sqrt(sum) * (1.0 - kSlack);
  }

  double box_max_dist(const Node& n, const std::vector<double>& qf) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < nf_; ++j) {
      double dmin, dmax;
      feature_bounds(j, qf[j], n.lo[j], n.hi[j], dmin, dmax);
      const double w = spec_.terms[j].weight * dmax;
      sum += w * w;
    }
    return std::sqrt(sum) * (1.0 + kSlack);
  }

  void nearest_rec(std::uint32_t slot, const State& q, const std::vector<double>& qf, Hit& best) const {
    const Node& n = nodes_[slot];
    const double d = distance(spec_, q.view(), n.state.view());
    if (d < best.dist || (d == best.dist && n.id < best.id)) best = {n.id, d};
    std::uint32_t kids[2] = {n.left, n.right};
    double bounds[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (int k = 0; k < 2; ++k)
      if (kids[k] != kNone) bounds[k] = box_min_dist(nodes_[kids[k]], qf);
    const int first = bounds[0] <= bounds[1] ? 0 : 1;
    for (int pass = 0; pass < 2; ++pass) {
      const int k = pass == 0 ? first : 1 - first;
      if (kids[k] == kNone) continue;
      if (bounds[k] > best.dist) continue;
      nearest_rec(kids[k], q, qf, best);
    }
  }

  void collect(std::uint32_t slot, const State& q, std::vector<Hit>& out) const {
    const Node& n = nodes_[slot];
    out.push_back({n.id, distance(spec_, q.view(), n.state.view())});
    if (n.left != kNone) collect(n.left, q, out);
    if (n.right != kNone) collect(n.right, q, out);
  }

  void range_rec(std::uint32_t slot, const State& q, const std::vector<double>& qf, double r, RangeMode mode,
                 std::vector<Hit>& out) const {
    const Node& n = nodes_[slot];
    if (box_min_dist(n, qf) > r) return;
    if (mode == RangeMode::approximate && box_max_dist(n, qf) <= r * (1.0 + eps_)) {
      collect(slot, q, out);
      return;
    }
    const double d = distance(spec_, q.view(), n.state.view());
    if (d <= r) out.push_back({n.id, d});
    if (n.left != kNone) range_rec(n.left, q, qf, r, mode, out);
    if (n.right != kNone) range_rec(n.right, q, qf, r, mode, out);
  }

  std::size_t height_rec(std::uint32_t slot) const {
    const Node& n = nodes_[slot];
    std::size_t h = 0;
    if (n.left != kNone) h = std::max(h, height_rec(n.left));
    if (n.right != kNone) h = std::max(h, height_rec(n.right));
    return h + 1;
  }

  void gather(std::uint32_t slot, std::vector<std::uint32_t>& slots) const {
    slots.push_back(slot);
    const Node& n = nodes_[slot];
    if (n.left != kNone) gather(n.left, slots);
    if (n.right != kNone) gather(n.right, slots);
  }

  // Rebuilds the subtree rooted at path[k] as a balanced tree, reusing its
  // node slots, and relinks it to its parent.
  void rebuild(const std::vector<std::uint32_t>& path, std::size_t k) {
    std::vector<std::uint32_t> slots;
    gather(path[k], slots);
    const std::uint32_t new_root = build(slots.begin(), slots.end());
    if (k == 0) {
      root_ = new_root;
    } else {
      Node& parent = nodes_[path[k - 1]];
      if (parent.left == path[k])
        parent.left = new_root;
      else
        parent.right = new_root;
    }
  }

  using SlotIt = std::vector<std::uint32_t>::iterator;

  std::uint32_t build(SlotIt first, SlotIt last) {
    if (first == last) return kNone;
    // Split on the feature with the widest spread.
    std::size_t split = 0;
    double widest = -1.0;
    for (std::size_t j = 0; j < nf_; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (auto it = first; it != last; ++it) {
        lo = std::min(lo, nodes_[*it].feat[j]);
        hi = std::max(hi, nodes_[*it].feat[j]);
      }
      const double spread = (hi - lo) * spec_.terms[j].weight;
      if (spread > widest) {
        widest = spread;
        split = j;
      }
    }
    auto mid = first + (last - first) / 2;
    std::nth_element(first, mid, last, [&](std::uint32_t a, std::uint32_t b) {
      return nodes_[a].feat[split] < nodes_[b].feat[split];
    });
    // Everything equal to the median goes right, matching insertion descent.
    const double pivot = nodes_[*mid].feat[split];
    auto eq = std::partition(first, last, [&](std::uint32_t s) { return nodes_[s].feat[split] < pivot; });
    mid = eq;
    const std::uint32_t slot = *mid;
    Node& n = nodes_[slot];
    n.split = split;
    n.left = build(first, mid);
    n.right = build(mid + 1, last);
    refresh(slot);
    return slot;
  }

  void refresh(std::uint32_t slot) {
    Node& n = nodes_[slot];
    n.lo = n.feat;
    n.hi = n.feat;
    n.size = 1;
    for (std::uint32_t c : {n.left, n.right}) {
      if (c == kNone) continue;
      const Node& ch = nodes_[c];
      n.size += ch.size;
      for (std::size_t j = 0; j < nf_; ++j) {
        n.lo[j] = std::min(n.lo[j], ch.lo[j]);
        n.hi[j] = std::max(n.hi[j], ch.hi[j]);
      }
    }
  }

  DistanceSpec spec_;
  double eps_;
  std::size_t nf_;
  std::vector<Node> nodes_;
  std::unordered_map<NodeId, std::uint32_t> slot_of_;
  std::uint32_t root_ = kNone;
};

enum class RadiusExponent { one_over_d, one_over_d_plus_one };

/// Shrinking neighborhood radius r(n) = min(gamma * (ln n / n)^e, cap), with
/// e = 1/d or 1/(d+1).
struct RadiusSchedule {
  double gamma = 1.0;
  std::size_t dim = 1;
  RadiusExponent exponent = RadiusExponent::one_over_d_plus_one;
  double cap = std::numeric_limits<double>::infinity();

  double operator()(std::size_t n) const {
    if (n == 0) throw Error("radius schedule needs n >= 1");
    const double e = exponent == RadiusExponent::one_over_d ? 1.0 / static_cast<double>(dim)
                                                             : 1.0 / static_cast<double>(dim + 1);
    const double nd = static_cast<double>(n);
    return std::min(gamma * std::pow(std::log(nd) / nd, e), cap);
  }
};

}  // namespace gbrrt
