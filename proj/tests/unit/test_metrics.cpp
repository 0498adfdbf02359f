#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace gbrrt;
using testing_helpers::line_edge;

namespace {

// Smallest |a - b + 2 pi k| over a window of k.
double brute_angle_gap(double a, double b) {
  double best = 1e300;
  for (int k = -4; k <= 4; ++k) best = std::min(best, std::abs(a - b + 2 * kPi * k));
  return best;
}

}  // namespace

TEST(Distance, UnicycleIgnoresHeading) {
  auto m = make_bare_system("unicycle");
  EXPECT_DOUBLE_EQ(distance(m->distance_spec(), State{0, 0, 0}, State{3, 4, kPi}), 5.0);
}

TEST(Distance, CartPoleIdentityIsZero) {
  auto m = make_bare_system("cartpole");
  const State a{1.0, 0.3, -2.0, 0.5};
  EXPECT_EQ(distance(m->distance_spec(), a, a), 0.0);
}

TEST(Distance, CartPoleUsesShortestAngle) {
  auto m = make_bare_system("cartpole");
  const State a{0, 0.1, 0, 0};
  const State b = wrap_angles(State{0, 2 * kPi - 0.1, 0, 0}, m->kinds());
  const double expect = 1.5 * brute_angle_gap(0.1, 2 * kPi - 0.1);
  EXPECT_NEAR(distance(m->distance_spec(), a, b), expect, 1e-12);
  EXPECT_NEAR(expect, 0.3, 1e-12);
}

TEST(Distance, DimensionMismatchThrows) {
  auto m = make_bare_system("unicycle");
  EXPECT_THROW(distance(m->distance_spec(), State{0, 0}, State{0, 0, 0}), Error);
}

TEST(Distance, NoDynamicsIgnoresVelocities) {
  Rng rng(3);
  for (const auto& id : system_ids()) {
    auto m = make_bare_system(id);
    const DistanceSpec nd = m->nd_spec();
    const Bounds& b = m->default_bounds();
    Bounds box = b;
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!std::isfinite(box.lo[i])) box.lo[i] = -50;
      if (!std::isfinite(box.hi[i])) box.hi[i] = 50;
    }
    for (int i = 0; i < 200; ++i) {
      const State a = sample_state(box, m->kinds(), rng);
      const State c = sample_state(box, m->kinds(), rng);
      State a2 = a;
      for (std::size_t d : m->velocity_dims()) a2[d] = rng.uniform(box.lo[d], box.hi[d]);
      EXPECT_NEAR(distance(nd, a, c), distance(nd, a2, c), 1e-12) << id;
    }
  }
}

TEST(EdgeCost, SingleSampleIsZero) {
  auto m = make_bare_system("unicycle");
  Edge e(3);
  e.push_sample(0.0, State{1, 2, 0}.view());
  EXPECT_EQ(edge_cost(m->distance_spec(), e), 0.0);
}

TEST(EdgeCost, StraightLineIndependentOfResolution) {
  auto m = make_bare_system("unicycle");
  for (std::size_t n : {1u, 7u, 100u})
    EXPECT_NEAR(edge_cost(m->distance_spec(), line_edge({0, 0, 0}, {1, 0, 0}, n)), 1.0, 1e-12);
}

TEST(EdgeCost, ArcMatchesFineChordSum) {
  auto m = make_bare_system("unicycle");
  const PropagationContext ctx{m.get(), nullptr, 1e-3};
  const double t = kPi / 2;
  const auto e = rk4_propagate(ctx, State{0, 0, 0}, ControlInput{1, 1}, t, Direction::forward);
  ASSERT_TRUE(e);
  // Unit circle: a chord over heading change a has length 2 sin(a / 2).
  const int n = 10 * static_cast<int>(std::ceil(t / 1e-3));
  const double fine = n * 2.0 * std::sin(t / n / 2.0);
  EXPECT_NEAR(e->cost, fine, 1e-6);
  EXPECT_LE(e->cost, fine + 1e-9);
  EXPECT_NEAR(e->cost, edge_cost(m->distance_spec(), *e), 1e-12);
}

TEST(Distance, AxiomsOnRandomTriples) {
  Rng rng(11);
  for (const auto& id : system_ids()) {
    auto m = make_bare_system(id);
    Bounds box = m->default_bounds();
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!std::isfinite(box.lo[i])) box.lo[i] = -100;
      if (!std::isfinite(box.hi[i])) box.hi[i] = 100;
    }
    for (const DistanceSpec& spec : {m->distance_spec(), m->nd_spec()}) {
      for (int i = 0; i < 2000; ++i) {
        const State a = sample_state(box, m->kinds(), rng), b = sample_state(box, m->kinds(), rng),
                    c = sample_state(box, m->kinds(), rng);
        const double ab = distance(spec, a, b), ba = distance(spec, b, a);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(std::abs(ab - ba), 1e-12);
        EXPECT_LE(distance(spec, a, c), ab + distance(spec, b, c) + 1e-9);
      }
    }
  }
}

TEST(DistanceSpec, ValidateRejectsAllZeroWeights) {
  const DistanceSpec s = DistanceSpec::per_dimension({0, 0}, {DimKind::linear, DimKind::linear});
  EXPECT_THROW(s.validate(), ValidationError);
}
