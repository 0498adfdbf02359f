#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"

using namespace gbrrt;
using testing_helpers::line_edge;

namespace {

// Shift by whole turns until the value lands in [-pi, pi).
double wrap_by_shifting(double a) {
  while (a >= kPi) a -= 2 * kPi;
  while (a < -kPi) a += 2 * kPi;
  return a;
}

}  // namespace

TEST(WrapAngles, ThreeHalvesPiBecomesMinusHalfPi) {
  const std::vector<DimKind> kinds{DimKind::linear, DimKind::linear, DimKind::angular};
  const State s = wrap_angles(State{0, 0, 3 * kPi / 2}, kinds);
  EXPECT_NEAR(s[2], -kPi / 2, 1e-12);
  EXPECT_EQ(s[0], 0.0);
}

TEST(WrapAngles, ZeroIsUnchanged) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
}

TEST(WrapAngles, MatchesShiftingOracle) {
  EXPECT_NEAR(wrap_angle(-7.5), wrap_by_shifting(-7.5), 1e-12);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-50.0, 50.0);
    const double w = wrap_angle(a);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(w, wrap_by_shifting(a), 1e-9) << a;
  }
}

TEST(WrapAngles, Idempotent) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(rng.uniform(-20, 20));
    EXPECT_EQ(wrap_angle(w), w);
  }
  EXPECT_EQ(wrap_angle(kPi), -kPi);
}

TEST(WrapAngles, NonFiniteRejected) {
  const std::vector<DimKind> k{DimKind::linear, DimKind::angular};
  EXPECT_THROW(wrap_angles(State{0, std::nan("")}, k), InvalidStateError);
  EXPECT_THROW(wrap_angles(State{std::numeric_limits<double>::infinity(), 0}, k), InvalidStateError);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01();
    EXPECT_EQ(x, b.uniform01());
    differs = differs || x != c.uniform01();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, IndexStaysInRange) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(r.index(7), 7u);
}

TEST(Edge, StructureChecks) {
  Edge e = line_edge({0, 0, 0}, {1, 0, 0}, 4, 0.5);
  EXPECT_EQ(check_edge_structure(e, 1.0), "");
  EXPECT_NE(check_edge_structure(e, 0.25), "");
  Edge one(3);
  one.push_sample(0.0, State{0, 0, 0}.view());
  EXPECT_NE(check_edge_structure(one, 1.0), "");
}

TEST(Edge, ReverseSamplesKeepsTimesIncreasing) {
  Edge e = line_edge({0, 0, 0}, {4, 0, 0}, 4, 2.0);
  e.reverse_samples();
  EXPECT_EQ(e.initial(), (State{4, 0, 0}));
  EXPECT_EQ(e.final(), (State{0, 0, 0}));
  EXPECT_EQ(e.time(0), 0.0);
  EXPECT_DOUBLE_EQ(e.time(4), 2.0);
  EXPECT_EQ(check_edge_structure(e, 2.0), "");
}

TEST(PathReconstruct, RootOnlyIsEmpty) {
  auto m = make_bare_system("unicycle");
  SearchTree t(TreeKind::forward, m->distance_spec(), State{0, 0, 0});
  const Path p = path_reconstruct(t, 0);
  EXPECT_TRUE(p.edges.empty());
  EXPECT_EQ(p.cost, 0.0);
}

TEST(PathReconstruct, ThreeNodeChainSumsCosts) {
  auto m = make_bare_system("unicycle");
  SearchTree t(TreeKind::forward, m->distance_spec(), State{0, 0, 0});
  Edge a = line_edge({0, 0, 0}, {1, 0, 0});
  a.cost = 1.0;
  Edge b = line_edge({1, 0, 0}, {3.5, 0, 0});
  b.cost = 2.5;
  const NodeId n1 = t.add_child(0, a);
  const NodeId n2 = t.add_child(n1, b);
  const Path p = path_reconstruct(t, n2);
  ASSERT_EQ(p.edges.size(), 2u);
  EXPECT_DOUBLE_EQ(p.cost, 3.5);
  EXPECT_EQ(p.edges[0].initial(), (State{0, 0, 0}));
  EXPECT_EQ(p.edges[1].final(), (State{3.5, 0, 0}));
  EXPECT_EQ(t.audit(), "");
}

TEST(PathReconstruct, RandomTreeMatchesParentWalk) {
  auto m = make_bare_system("unicycle");
  const auto& spec = m->distance_spec();
  SearchTree t(TreeKind::forward, spec, State{0, 0, 0});
  Rng rng(9);
  for (int i = 1; i < 50; ++i) {
    const auto parent = static_cast<NodeId>(rng.index(t.size()));
    const State& ps = t.state(parent);
    const State child{ps[0] + rng.uniform(-1, 1), ps[1] + rng.uniform(-1, 1), 0};
    Edge e = line_edge(ps, child, 3);
    e.cost = edge_cost(spec, e);
    t.add_child(parent, e);
  }
  EXPECT_EQ(t.audit(), "");
  for (NodeId leaf = 0; leaf < t.size(); ++leaf) {
    double walk = 0.0;
    std::size_t hops = 0;
    for (NodeId cur = leaf; t.node(cur).parent; cur = *t.node(cur).parent, ++hops) walk += t.node(cur).edge->cost;
    const Path p = path_reconstruct(t, leaf);
    EXPECT_EQ(p.edges.size(), hops);
    EXPECT_NEAR(p.cost, walk, 1e-12);
    for (std::size_t i = 0; i + 1 < p.edges.size(); ++i) EXPECT_EQ(p.edges[i].final(), p.edges[i + 1].initial());
  }
}

TEST(PathReconstruct, UnknownIdThrows) {
  auto m = make_bare_system("unicycle");
  SearchTree t(TreeKind::forward, m->distance_spec(), State{0, 0, 0});
  EXPECT_THROW(path_reconstruct(t, 5), NotFoundError);
}

TEST(SearchTree, ReverseTreeAttachesAtFinalState) {
  auto m = make_bare_system("unicycle");
  SearchTree t(TreeKind::reverse, m->distance_spec(), State{5, 5, 0});
  Edge e = line_edge({2, 5, 0}, {5, 5, 0});
  e.cost = 3.0;
  const NodeId id = t.add_child(0, e);
  EXPECT_EQ(t.state(id), (State{2, 5, 0}));
  EXPECT_DOUBLE_EQ(t.cost(id), 3.0);
  EXPECT_EQ(t.audit(), "");
}

TEST(GoalRegion, AsymmetricAndInfiniteTolerances) {
  const double inf = std::numeric_limits<double>::infinity();
  GoalRegion g{State{0, 10, 0}, {1, 7, inf}, {1, inf, inf}, {DimKind::linear, DimKind::linear, DimKind::angular}};
  EXPECT_TRUE(g.contains(State{0.5, 3.5, 2.0}));
  EXPECT_TRUE(g.contains(State{0, 100, -3}));
  EXPECT_FALSE(g.contains(State{0, 2.9, 0}));
  EXPECT_FALSE(g.contains(State{1.5, 10, 0}));
}

TEST(PlannerConfig, RejectsBadValues) {
  PlannerConfig c;
  c.q = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = PlannerConfig{};
  c.delta_hr = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = PlannerConfig{};
  c.n_best = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(PlannerConfig, ScheduleOverridesConstantQ) {
  PlannerConfig c;
  c.q = 0.7;
  EXPECT_EQ(c.exploit_ratio(10), 0.7);
  c.q_schedule = [](std::size_t k) { return k < 5 ? 0.0 : 1.0; };
  EXPECT_EQ(c.exploit_ratio(2), 0.0);
  EXPECT_EQ(c.exploit_ratio(8), 1.0);
}

TEST(Ablations, ParsesLongAndShortNames) {
  const Ablations a = parse_ablations("no_fast_explore,RU");
  EXPECT_TRUE(a.no_fast_explore);
  EXPECT_TRUE(a.range_update);
  EXPECT_FALSE(a.no_exploit);
  EXPECT_EQ(to_string(a), "no_fast_explore,range_update");
  EXPECT_THROW(parse_ablations("no_such_thing"), ValidationError);
}
