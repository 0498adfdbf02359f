#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace gbrrt;
using testing_helpers::empty_unicycle;
using testing_helpers::line_edge;

namespace {

std::shared_ptr<const SystemModel> unicycle() {
  static auto m = std::shared_ptr<const SystemModel>(make_system("unicycle"));
  return m;
}

PlannerConfig unicycle_config(std::uint64_t seed = 1) {
  PlannerConfig c = PlannerConfig::defaults_for(*unicycle());
  c.seed = seed;
  return c;
}

Scenario treaded_scenario() {
  const double inf = std::numeric_limits<double>::infinity();
  Scenario sc;
  sc.id = "treaded_test";
  sc.system = "treaded";
  sc.bounds = {{0, 0, -kPi, -3, -3}, {30, 30, kPi, 3, 3}};
  sc.start = {3, 3, 0, 0, 0};
  sc.goal = {25, 25, 0, 0, 0};
  sc.goal_below = sc.goal_above = {1.5, 1.5, inf, 1, 1};
  return sc;
}

}  // namespace

TEST(ChooseForwardEdge, BranchSelection) {
  Rng rng(1);
  int pops = 0, exploits = 0, fasts = 0, randoms = 0;
  auto run = [&](double q, bool pop_ok, bool exploit_ok, bool fast_ok) {
    return choose_forward_edge<int>(
        rng, q,
        [&]() -> std::optional<NodeId> { ++pops; return pop_ok ? std::optional<NodeId>(0) : std::nullopt; },
        [&](NodeId) -> std::optional<int> { ++exploits; return exploit_ok ? std::optional<int>(1) : std::nullopt; },
        [&]() -> std::optional<int> { ++fasts; return fast_ok ? std::optional<int>(2) : std::nullopt; },
        [&]() -> std::optional<int> { ++randoms; return 3; });
  };
  EXPECT_EQ(run(1.0, true, true, true).second, EdgeSource::exploit);
  EXPECT_EQ(run(1.0, false, true, true).second, EdgeSource::fast);
  EXPECT_EQ(run(1.0, true, false, true).second, EdgeSource::random);
  EXPECT_EQ(run(1.0, false, true, false).second, EdgeSource::random);
  EXPECT_EQ(run(0.0, true, true, true).second, EdgeSource::random);
  EXPECT_EQ(pops, 4);
  EXPECT_EQ(exploits, 2);
  EXPECT_EQ(fasts, 2);
  EXPECT_EQ(randoms, 3);
}

TEST(ChooseForwardEdge, RandomFractionIsOneMinusQ) {
  Rng rng(2);
  const int n = 100000;
  const double q = 0.7;
  int random = 0;
  for (int i = 0; i < n; ++i) {
    const auto src = choose_forward_edge<int>(
                         rng, q, [] { return std::optional<NodeId>(0); }, [](NodeId) { return std::optional<int>(1); },
                         [] { return std::optional<int>(2); }, [] { return std::optional<int>(3); })
                         .second;
    random += src == EdgeSource::random;
  }
  const double sigma = std::sqrt(n * q * (1 - q));
  EXPECT_LE(std::abs(random - n * (1 - q)), 4 * sigma);
}

TEST(PlannerRun, StartInsideGoalSolvesWithEmptyPath) {
  Scenario sc = empty_unicycle();
  sc.goal = sc.start;
  const auto res = run_planner(PlannerKind::gbrrt, unicycle(), sc, unicycle_config());
  ASSERT_TRUE(res.path);
  EXPECT_TRUE(res.path->edges.empty());
  EXPECT_TRUE(res.metrics.success);
  EXPECT_EQ(res.metrics.iterations, 0u);
}

TEST(PlannerRun, SingleIterationBudgetExhausts) {
  PlannerConfig c = unicycle_config();
  c.m_iter = 1;
  for (auto kind : {PlannerKind::gbrrt, PlannerKind::gabrrt, PlannerKind::rrt}) {
    const auto res = run_planner(kind, unicycle(), empty_unicycle(), c);
    EXPECT_FALSE(res.path);
    EXPECT_EQ(res.metrics.iterations, 1u);
    EXPECT_EQ(res.metrics.solution_time_s, c.s_max);
  }
}

TEST(PlannerRun, ZeroTimeBudgetDoesNothing) {
  PlannerConfig c = unicycle_config();
  c.s_max = 0.0;
  const auto res = run_planner(PlannerKind::gbrrt, unicycle(), empty_unicycle(), c);
  EXPECT_FALSE(res.path);
  EXPECT_EQ(res.metrics.iterations, 0u);
}

TEST(PlannerRun, InsertToPriorityQueueKeyIsDistancePlusHeuristic) {
  PlannerRun run(PlannerKind::gbrrt, unicycle(), empty_unicycle(), unicycle_config());
  run.insert_to_priority_queue(0, 3.0);  // reverse root is far away
  EXPECT_TRUE(run.queue.empty());
  Edge f = line_edge({5, 5, 0}, {50, 50, 0});
  f.cost = 1.0;
  const NodeId x_for = run.add_forward(Candidate{0, f});
  Edge r = line_edge({52, 50, 0}, {95, 95, 0});
  r.cost = 5.0;
  run.add_reverse(Candidate{0, r});
  run.insert_to_priority_queue(x_for, 3.0);
  ASSERT_TRUE(run.queue.contains(x_for));
  EXPECT_DOUBLE_EQ(*run.queue.key_of(x_for), 7.0);
  run.insert_to_priority_queue(0, 3.0);
  EXPECT_FALSE(run.queue.contains(0));
}

TEST(PlannerRun, UpdatePriorityQueueOnlyLowers) {
  PlannerRun run(PlannerKind::gbrrt, unicycle(), empty_unicycle(), unicycle_config());
  Edge f = line_edge({5, 5, 0}, {50, 50, 0});
  const NodeId x_for = run.add_forward(Candidate{0, f});
  run.update_priority_queue(0, 3.0);  // nothing queued: no-op
  EXPECT_TRUE(run.queue.empty());
  run.queue.push(x_for, 9.0);
  Edge r1 = line_edge({51, 50, 0}, {95, 95, 0});
  r1.cost = 5.0;
  run.update_priority_queue(run.add_reverse(Candidate{0, r1}), 3.0);
  EXPECT_DOUBLE_EQ(*run.queue.key_of(x_for), 6.0);
  Edge r2 = line_edge({50, 52, 0}, {95, 95, 0});
  r2.cost = 10.0;
  run.update_priority_queue(run.add_reverse(Candidate{0, r2}), 3.0);
  EXPECT_DOUBLE_EQ(*run.queue.key_of(x_for), 6.0);
  Edge r3 = line_edge({60, 60, 0}, {95, 95, 0});
  r3.cost = 0.5;
  run.update_priority_queue(run.add_reverse(Candidate{0, r3}), 3.0);  // beyond r_k
  EXPECT_DOUBLE_EQ(*run.queue.key_of(x_for), 6.0);
}

TEST(PlannerRun, ExploitPicksExhaustiveArgmin) {
  PlannerRun run(PlannerKind::gbrrt, unicycle(), empty_unicycle(), unicycle_config(4));
  Edge f = line_edge({5, 5, 0}, {50, 50, 0});
  f.cost = 3.0;
  const NodeId x_pop = run.add_forward(Candidate{0, f});
  EXPECT_FALSE(run.for_srch_exploit(x_pop, 5.0));  // empty range
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Edge r = line_edge({50 + rng.uniform(-6, 6), 50 + rng.uniform(-6, 6), 0}, {95, 95, 0});
    r.cost = rng.uniform(0, 10);
    run.add_reverse(Candidate{0, r});
  }
  const double r_k = 5.0;
  const State& xs = run.forward.state(x_pop);
  NodeId best = 0;
  double bv = 1e300;
  for (NodeId id = 0; id < run.reverse->size(); ++id) {
    const double d = distance(run.reverse_spec(), xs, run.reverse->state(id));
    if (d > r_k) continue;
    const double v = run.forward.cost(x_pop) + d + run.reverse->cost(id);
    if (v < bv) bv = v, best = id;
  }
  ASSERT_LT(bv, 1e300);
  Rng replay = run.streams.forward;
  const auto got = run.for_srch_exploit(x_pop, r_k);
  const auto want = run.best_input_prop(xs, run.reverse->state(best), Direction::forward, replay, run.reverse_spec());
  ASSERT_TRUE(got && want);
  EXPECT_EQ(got->edge.final(), want->final());
  EXPECT_EQ(got->parent, x_pop);
}

TEST(PlannerRun, BestInputWithOneDrawIsMonteCarlo) {
  auto m = std::shared_ptr<const SystemModel>(make_bare_system("treaded"));
  PlannerConfig c = PlannerConfig::defaults_for(*m);
  c.n_best = 1;
  PlannerRun run(PlannerKind::gbrrt, m, treaded_scenario(), c);
  const State from = run.forward.state(0);
  for (int i = 0; i < 20; ++i) {
    Rng a(i), b(i);
    const auto mc = run.monte_carlo_prop(from, Direction::forward, a);
    const auto bi = run.best_input_prop(from, State{20, 20, 0, 0, 0}, Direction::forward, b, m->distance_spec());
    ASSERT_EQ(mc.has_value(), bi.has_value());
    if (mc) EXPECT_EQ(mc->final(), bi->final());
  }
}

TEST(PlannerRun, BestInputEndpointBeatsEveryCandidate) {
  auto m = std::shared_ptr<const SystemModel>(make_bare_system("treaded"));
  PlannerConfig c = PlannerConfig::defaults_for(*m);
  c.n_best = 50;
  PlannerRun run(PlannerKind::gbrrt, m, treaded_scenario(), c);
  const State from{10, 10, 0, 0, 0}, toward{15, 10, 0, 0, 0};
  Rng rng(6), replay(6);
  const auto got = run.best_input_prop(from, toward, Direction::forward, rng, m->distance_spec());
  ASSERT_TRUE(got);
  const double gd = distance(m->distance_spec(), got->final(), toward);
  for (int i = 0; i < 50; ++i) {
    const double t = sample_duration(replay, c.t_max, c.step);
    const ControlInput u = sample_control(*m, replay);
    const auto e = rk4_propagate(run.context(), from, u, t, Direction::forward);
    if (e) EXPECT_LE(gd, distance(m->distance_spec(), e->final(), toward));
  }
}

TEST(PlannerRun, GabrrtReverseSegmentsRespectEpsilon) {
  PlannerConfig c = unicycle_config(7);
  c.m_iter = 300;
  c.q = 0.0;
  PlannerRun run(PlannerKind::gabrrt, unicycle(), empty_unicycle(), c);
  for (int i = 0; i < 300; ++i) run.step();
  ASSERT_GT(run.reverse->size(), 10u);
  for (NodeId id = 1; id < run.reverse->size(); ++id) {
    const Edge& e = *run.reverse->node(id).edge;
    EXPECT_LE(distance(run.reverse_spec(), e.initial(), e.final()), c.epsilon() + 1e-12);
    EXPECT_EQ(e.sample_count(), 2u);
  }
  EXPECT_EQ(run.audit(), "");
}

TEST(PlannerRun, GabrrtQueueKeyIgnoresVelocity) {
  auto m = std::shared_ptr<const SystemModel>(make_bare_system("treaded"));
  PlannerRun run(PlannerKind::gabrrt, m, treaded_scenario(), PlannerConfig::defaults_for(*m));
  const NodeId a = run.add_forward(Candidate{0, line_edge({3, 3, 0, 0, 0}, {24, 24, 0, 0, 0})});
  const NodeId b = run.add_forward(Candidate{0, line_edge({3, 3, 0, 0, 0}, {24, 24, 0, 2.5, -1.5})});
  run.insert_to_priority_queue(a, 3.0);
  run.insert_to_priority_queue(b, 3.0);
  ASSERT_TRUE(run.queue.contains(a) && run.queue.contains(b));
  EXPECT_EQ(*run.queue.key_of(a), *run.queue.key_of(b));
}

TEST(PlannerRun, NoExploitForwardSideMatchesAcrossVariants) {
  PlannerConfig c = PlannerConfig::defaults_for(*unicycle());
  c.ablations.no_exploit = true;
  c.seed = 11;
  const Scenario sc = load_scenario(testing_helpers::source_path("scenarios/unicycle_maze.json"));
  PlannerRun gb(PlannerKind::gbrrt, unicycle(), sc, c);
  PlannerRun ga(PlannerKind::gabrrt, unicycle(), sc, c);
  // Replay of the forward decisions alone: the queue stays empty, so every
  // exploit draw falls back to fast exploration.
  PlannerRun solo(PlannerKind::gbrrt, unicycle(), sc, c);
  for (int i = 0; i < 400; ++i) {
    const auto o1 = gb.step();
    const auto o2 = ga.step();
    EXPECT_EQ(gb.last_source(), ga.last_source());
    auto [cand, src] = choose_forward_edge<Candidate>(
        solo.streams.forward, c.q, [] { return std::optional<NodeId>(); },
        [&](NodeId) { return std::optional<Candidate>(); }, [&] { return solo.for_srch_fast_explore(); },
        [&] { return solo.for_srch_random_explore(); });
    EXPECT_EQ(src, gb.last_source());
    if (cand && !edge_in_collision(solo.scene(), cand->edge, 0.0, true)) solo.forward.add_child(cand->parent, cand->edge);
    if (o1.status == StepStatus::solved || o2.status == StepStatus::solved) break;
  }
  EXPECT_TRUE(gb.queue.empty());
  ASSERT_EQ(gb.forward.size(), ga.forward.size());
  ASSERT_EQ(gb.forward.size(), solo.forward.size());
  for (NodeId id = 0; id < gb.forward.size(); ++id) {
    EXPECT_EQ(gb.forward.state(id), ga.forward.state(id));
    EXPECT_EQ(gb.forward.state(id), solo.forward.state(id));
  }
}

TEST(PlannerRun, IdenticalSeedsGiveIdenticalRuns) {
  const Scenario sc = load_scenario(testing_helpers::source_path("scenarios/unicycle_maze.json"));
  for (auto kind : {PlannerKind::gbrrt, PlannerKind::gabrrt, PlannerKind::rrt}) {
    PlannerRun a(kind, unicycle(), sc, unicycle_config(3)), b(kind, unicycle(), sc, unicycle_config(3));
    for (int i = 0; i < 200; ++i) {
      a.step();
      b.step();
    }
    ASSERT_EQ(a.forward.size(), b.forward.size());
    for (NodeId id = 0; id < a.forward.size(); ++id) EXPECT_EQ(a.forward.state(id), b.forward.state(id));
    if (a.reverse) {
      ASSERT_EQ(a.reverse->size(), b.reverse->size());
      for (NodeId id = 0; id < a.reverse->size(); ++id) EXPECT_EQ(a.reverse->state(id), b.reverse->state(id));
    }
    ASSERT_EQ(a.queue.size(), b.queue.size());
    for (std::size_t i = 0; i < a.queue.size(); ++i) {
      EXPECT_EQ(a.queue.entries()[i].id, b.queue.entries()[i].id);
      EXPECT_EQ(a.queue.entries()[i].key, b.queue.entries()[i].key);
    }
  }
}

TEST(PlannerRun, TreesStayConsistentAndCollisionFree) {
  const Scenario sc = load_scenario(testing_helpers::source_path("scenarios/unicycle_maze.json"));
  for (auto kind : {PlannerKind::gbrrt, PlannerKind::gabrrt, PlannerKind::rrt}) {
    PlannerRun run(kind, unicycle(), sc, unicycle_config(5));
    for (int i = 0; i < 300; ++i) run.step();
    EXPECT_EQ(run.audit(), "");
    const double fine = run.scene().check_resolution() / 2;
    for (NodeId id = 1; id < run.forward.size(); ++id)
      EXPECT_FALSE(edge_in_collision(run.scene(), *run.forward.node(id).edge, fine));
    if (kind == PlannerKind::gbrrt)
      for (NodeId id = 1; id < run.reverse->size(); ++id)
        EXPECT_FALSE(edge_in_collision(run.scene(), *run.reverse->node(id).edge, fine));
    const auto& k = run.counters;
    EXPECT_EQ(k.iterations, 300u);
    EXPECT_LE(k.exploit_attempts, k.pops);
  }
}

TEST(PlannerRun, EmptyWorldSolvesWithValidPath) {
  for (auto kind : {PlannerKind::gbrrt, PlannerKind::gabrrt, PlannerKind::rrt}) {
    const PlannerConfig c = unicycle_config(8);
    const Scenario sc = empty_unicycle();
    const auto res = run_planner(kind, unicycle(), sc, c);
    ASSERT_TRUE(res.path) << to_string(kind);
    EXPECT_EQ(check_path(*res.path, *unicycle(), sc, c), std::vector<std::string>{});
    EXPECT_NEAR(res.metrics.cost, res.path->cost, 1e-9);
  }
}

TEST(PlannerRun, OnlineIntegrationSystemSolves) {
  auto m = std::shared_ptr<const SystemModel>(make_bare_system("treaded"));
  PlannerConfig c = PlannerConfig::defaults_for(*m);
  c.seed = 2;
  const Scenario sc = treaded_scenario();
  for (auto kind : {PlannerKind::gbrrt, PlannerKind::gabrrt}) {
    const auto res = run_planner(kind, m, sc, c);
    ASSERT_TRUE(res.path);
    EXPECT_EQ(check_path(*res.path, *m, sc, c), std::vector<std::string>{});
  }
}

TEST(CheckPath, DetectsBrokenPaths) {
  const PlannerConfig c = unicycle_config(9);
  const Scenario sc = empty_unicycle();
  auto res = run_planner(PlannerKind::gbrrt, unicycle(), sc, c);
  ASSERT_TRUE(res.path && res.path->edges.size() >= 2);
  Path p = *res.path;
  p.edges.erase(p.edges.begin());
  EXPECT_FALSE(check_path(p, *unicycle(), sc, c).empty());
  Path q = *res.path;
  q.edges.pop_back();
  EXPECT_FALSE(check_path(q, *unicycle(), sc, c).empty());
  Scenario blocked = sc;
  const State mid = res.path->edges[res.path->edges.size() / 2].final();
  blocked.obstacles.push_back(SphereObstacle{{mid[0], mid[1]}, 0.5});
  EXPECT_FALSE(check_path(*res.path, *unicycle(), blocked, c).empty());
}

TEST(Statistics, RatioToXExtentAndDiagonal) {
  const Scenario sc = empty_unicycle(100.0);
  PlannerConfig c = unicycle_config(1);
  c.m_iter = 5;
  const auto res = run_planner(PlannerKind::gbrrt, unicycle(), sc, c);
  EXPECT_DOUBLE_EQ(res.metrics.r_x, 0.07);
  EXPECT_NEAR(res.metrics.r_max, 7.0 / std::sqrt(2.0 * 100.0 * 100.0), 1e-12);
  EXPECT_GE(res.metrics.r_rk, 0.0);
  EXPECT_LE(res.metrics.r_rk, 100.0);
}

TEST(PlannerRun, ConstantRadiusUsesDeltaHr) {
  PlannerConfig c = unicycle_config();
  PlannerRun a(PlannerKind::gbrrt, unicycle(), empty_unicycle(), c);
  EXPECT_EQ(a.radius(), 0.0);  // one reverse node: ln 1 = 0
  c.constant_radius = true;
  PlannerRun b(PlannerKind::gbrrt, unicycle(), empty_unicycle(), c);
  EXPECT_EQ(b.radius(), 7.0);
}
