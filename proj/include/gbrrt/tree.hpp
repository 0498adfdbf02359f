#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gbrrt/edge.hpp"
#include "gbrrt/metrics.hpp"
#include "gbrrt/spatial_index.hpp"
#include "gbrrt/types.hpp"

namespace gbrrt {

enum class TreeKind { forward, reverse, reverse_nd };

inline const char* to_string(TreeKind k) {
  switch (k) {
    case TreeKind::forward: return "forward";
    case TreeKind::reverse: return "reverse";
    case TreeKind::reverse_nd: return "reverse-nd";
  }
  return "?";
}

struct TreeNode {
  State state;
  std::optional<NodeId> parent;
  std::optional<Edge> edge;  // incoming edge; none for the root
  double cost = 0.0;         // g for forward trees, h for reverse trees
};

/// Rooted tree of states. Node ids are dense and insertion-ordered. A forward
/// tree's incoming edge ends at the node; a reverse tree's starts at it.
class SearchTree {
 public:
  SearchTree(TreeKind kind, DistanceSpec spec, State root, double range_epsilon = 0.25)
      : kind_(kind), index_(std::move(spec), range_epsilon) {
    nodes_.push_back(TreeNode{root, std::nullopt, std::nullopt, 0.0});
    index_.insert(0, root);
  }

  TreeKind kind() const { return kind_; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode& node(NodeId id) const {
    if (id >= nodes_.size()) throw NotFoundError("tree: unknown node " + std::to_string(id));
    return nodes_[id];
  }
  const State& state(NodeId id) const { return node(id).state; }
  double cost(NodeId id) const { return node(id).cost; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const SpatialIndex& index() const { return index_; }
  const DistanceSpec& spec() const { return index_.spec(); }

  /// Adds the free endpoint of `e` as a child of `parent`. The edge must
  /// attach to the parent at its initial (forward) or final (reverse) state.
  NodeId add_child(NodeId parent, Edge e) {
    if (parent >= nodes_.size()) throw NotFoundError("tree: unknown parent " + std::to_string(parent));
    State s = kind_ == TreeKind::forward ? e.final() : e.initial();
    const double c = nodes_[parent].cost + e.cost;
    const auto id = static_cast<NodeId>(nodes_.size());
    index_.insert(id, s);
    nodes_.push_back(TreeNode{std::move(s), parent, std::move(e), c});
    return id;
  }

  std::optional<SpatialIndex::Hit> nearest(const State& q) const { return index_.nearest(q); }
  std::vector<SpatialIndex::Hit> range(const State& q, double r, RangeMode mode = RangeMode::exact) const {
    return index_.range(q, r, mode);
  }

  double mean_edge_cost() const {
    if (nodes_.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) s += nodes_[i].edge->cost;
    return s / static_cast<double>(nodes_.size() - 1);
  }

  /// Checks parent links, edge attachment, cost accumulation and index size.
  std::string audit(double tol = 1e-9) const {
    if (nodes_.empty() || nodes_[0].parent || nodes_[0].edge || nodes_[0].cost != 0.0) return "bad root";
    if (index_.size() != nodes_.size()) return "index size differs from node count";
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      const TreeNode& n = nodes_[i];
      if (!n.parent || *n.parent >= i) return "node " + std::to_string(i) + " has bad parent";
      if (!n.edge) return "node " + std::to_string(i) + " lacks an incoming edge";
      const State& ps = nodes_[*n.parent].state;
      const bool fwd = kind_ == TreeKind::forward;
      if ((fwd ? n.edge->final() : n.edge->initial()) != n.state) return "node " + std::to_string(i) + " is not the edge's free end";
      if ((fwd ? n.edge->initial() : n.edge->final()) != ps) return "edge of node " + std::to_string(i) + " does not attach to its parent";
      const double expect = nodes_[*n.parent].cost + n.edge->cost;
      if (std::abs(expect - n.cost) > tol * std::max(1.0, expect)) return "cost mismatch at node " + std::to_string(i);
    }
    return {};
  }

 private:
  TreeKind kind_;
  std::vector<TreeNode> nodes_;
  SpatialIndex index_;
};

struct Path {
  std::vector<Edge> edges;
  double cost = 0.0;
  double found_at_s = 0.0;
  std::size_t found_at_iteration = 0;
};

/// Root-to-leaf edges of a forward tree.
inline Path path_reconstruct(const SearchTree& tree, NodeId leaf) {
  if (tree.kind() != TreeKind::forward) throw Error("path_reconstruct needs a forward tree");
  const TreeNode& last = tree.node(leaf);
  Path p;
  p.cost = last.cost;
  for (NodeId cur = leaf; tree.node(cur).parent; cur = *tree.node(cur).parent) p.edges.push_back(*tree.node(cur).edge);
  std::reverse(p.edges.begin(), p.edges.end());
  return p;
}

}  // namespace gbrrt
