#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace gbrrt;
using testing_helpers::line_edge;

namespace {

CollisionScene planar_scene(std::vector<Obstacle> obs, double radius = 0.0) {
  CollisionScene s;
  s.positional_dims = {0, 1};
  s.workspace = {{0, 0}, {10, 10}};
  s.obstacles = std::move(obs);
  s.robot_radius = radius;
  return s;
}

// Independent closed forms for each primitive.
double oracle_distance(const Obstacle& o, double x, double y, double z) {
  if (const auto* b = std::get_if<BoxObstacle>(&o)) {
    const double dx = std::max({b->lo[0] - x, 0.0, x - b->hi[0]});
    const double dy = std::max({b->lo[1] - y, 0.0, y - b->hi[1]});
    const double dz = std::max({b->lo[2] - z, 0.0, z - b->hi[2]});
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  if (const auto* c = std::get_if<CylinderObstacle>(&o)) {
    const double radial = std::max(0.0, std::sqrt((x - c->cx) * (x - c->cx) + (y - c->cy) * (y - c->cy)) - c->radius);
    const double axial = z < c->z_lo ? c->z_lo - z : (z > c->z_hi ? z - c->z_hi : 0.0);
    return std::sqrt(radial * radial + axial * axial);
  }
  const auto& s = std::get<SphereObstacle>(o);
  const double d = std::sqrt((x - s.center[0]) * (x - s.center[0]) + (y - s.center[1]) * (y - s.center[1]) +
                             (z - s.center[2]) * (z - s.center[2]));
  return std::max(0.0, d - s.radius);
}

}  // namespace

TEST(Collision, EmptySceneIsFreeInsideBounds) {
  const auto s = planar_scene({});
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(state_in_collision(s, State{rng.uniform(0, 10), rng.uniform(0, 10), 0}));
  EXPECT_TRUE(state_in_collision(s, State{11, 5, 0}));
}

TEST(Collision, PointAtBoxCenterCollides) {
  const auto s = planar_scene({BoxObstacle{{2, 2}, {4, 4}}});
  EXPECT_TRUE(state_in_collision(s, State{3, 3, 0}));
  EXPECT_FALSE(state_in_collision(s, State{5, 3, 0}));
}

TEST(Collision, RobotRadiusInflates) {
  const auto s = planar_scene({SphereObstacle{{5, 5}, 1.0}}, 0.5);
  EXPECT_TRUE(state_in_collision(s, State{6.4, 5, 0}));
  EXPECT_FALSE(state_in_collision(s, State{6.6, 5, 0}));
  EXPECT_TRUE(state_in_collision(s, State{0.3, 1, 0}));
}

TEST(Collision, RandomScenesMatchAnalyticOracle) {
  Rng rng(2);
  std::vector<Obstacle> obs;
  for (int i = 0; i < 20; ++i) {
    const double x = rng.uniform(0, 20), y = rng.uniform(0, 20), z = rng.uniform(0, 20);
    switch (i % 3) {
      case 0:
        obs.push_back(BoxObstacle{{x, y, z}, {x + rng.uniform(0.5, 3), y + rng.uniform(0.5, 3), z + rng.uniform(0.5, 3)}});
        break;
      case 1:
        obs.push_back(CylinderObstacle{x, y, rng.uniform(0.5, 2), z, z + rng.uniform(1, 5)});
        break;
      default:
        obs.push_back(SphereObstacle{{x, y, z}, rng.uniform(0.5, 2)});
    }
  }
  CollisionScene s;
  s.positional_dims = {0, 1, 2};
  s.workspace = {{-1, -1, -1}, {25, 25, 25}};
  s.obstacles = obs;
  s.robot_radius = 0.3;
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(0, 22), y = rng.uniform(0, 22), z = rng.uniform(0, 22);
    bool expect = x - 0.3 < -1 || y - 0.3 < -1 || z - 0.3 < -1 || x + 0.3 > 25 || y + 0.3 > 25 || z + 0.3 > 25;
    for (const auto& o : obs) {
      EXPECT_NEAR(obstacle_distance(o, std::vector<double>{x, y, z}), oracle_distance(o, x, y, z), 1e-12);
      expect = expect || oracle_distance(o, x, y, z) <= 0.3;
    }
    ASSERT_EQ(state_in_collision(s, State{x, y, z}), expect);
  }
}

TEST(Collision, PlanarCylinderIgnoresHeight) {
  const auto s = planar_scene({CylinderObstacle{5, 5, 1, 0, 1}});
  EXPECT_TRUE(state_in_collision(s, State{5.5, 5, 0}));
}

TEST(Collision, EdgeInsideObstacleAndEmptyScene) {
  const Edge inside = line_edge({2.5, 2.5, 0}, {3.5, 3.5, 0});
  EXPECT_TRUE(edge_in_collision(planar_scene({BoxObstacle{{2, 2}, {4, 4}}}), inside));
  EXPECT_FALSE(edge_in_collision(planar_scene({}), inside));
}

TEST(Collision, DensificationCatchesThinWalls) {
  // Two samples on either side of a wall thinner than their spacing.
  const Edge hop = line_edge({1, 5, 0}, {9, 5, 0}, 1);
  EXPECT_TRUE(edge_in_collision(planar_scene({BoxObstacle{{4.99, 0}, {5.01, 10}}}), hop));
}

TEST(Collision, GrazingSphereMatchesFineResampling) {
  Rng rng(3);
  const double res = 0.05;
  for (int k = 0; k < 500; ++k) {
    const SphereObstacle ball{{5, 5}, 1.0};
    auto s = planar_scene({ball});
    s.resolution = res;
    const double y = rng.uniform(3.5, 4.2);
    const Edge e = line_edge({2, y, 0}, {8, y + rng.uniform(-0.3, 0.3), 0}, 3);
    // Fine oracle: 10x denser sampling of the same segments.
    bool fine = false;
    double clearance = 1e300;
    for (std::size_t i = 1; i < e.sample_count(); ++i) {
      const auto a = e.sample(i - 1), b = e.sample(i);
      const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      const int n = static_cast<int>(std::ceil(len / (res / 10)));
      for (int j = 0; j <= n; ++j) {
        const double f = static_cast<double>(j) / n;
        const double d = obstacle_distance(ball, std::vector<double>{a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])});
        clearance = std::min(clearance, d);
        fine = fine || d <= 0.0;
      }
    }
    if (clearance >= res || fine) EXPECT_EQ(edge_in_collision(s, e), fine) << y;
  }
}

TEST(Collision, ConservativeModeCoversWholePolyline) {
  Rng rng(4);
  for (int k = 0; k < 500; ++k) {
    auto s = planar_scene({BoxObstacle{{4, 4}, {6, 6}}});
    const Edge e = line_edge({rng.uniform(0.5, 9.5), rng.uniform(0.5, 9.5), 0},
                             {rng.uniform(0.5, 9.5), rng.uniform(0.5, 9.5), 0}, 5);
    if (!edge_in_collision(s, e, 0.0, true)) EXPECT_FALSE(edge_in_collision(s, e, s.check_resolution() / 8));
  }
}

TEST(Collision, ReversedEdgeSameVerdict) {
  Rng rng(5);
  const auto s = planar_scene({SphereObstacle{{5, 5}, 1.5}, BoxObstacle{{1, 7}, {3, 9}}});
  for (int k = 0; k < 300; ++k) {
    Edge e = line_edge({rng.uniform(0, 10), rng.uniform(0, 10), 0}, {rng.uniform(0, 10), rng.uniform(0, 10), 0}, 4);
    const bool v = edge_in_collision(s, e);
    e.reverse_samples();
    EXPECT_EQ(edge_in_collision(s, e), v);
  }
}

TEST(Collision, MalformedObstaclesReported) {
  EXPECT_NE(check_obstacle(BoxObstacle{{1, 1}, {0, 2}}, 2), "");
  EXPECT_NE(check_obstacle(BoxObstacle{{0}, {1}}, 2), "");
  EXPECT_NE(check_obstacle(SphereObstacle{{0, 0}, 0.0}, 2), "");
  EXPECT_NE(check_obstacle(CylinderObstacle{0, 0, -1}, 3), "");
  EXPECT_EQ(check_obstacle(CylinderObstacle{0, 0, 1}, 3), "");
}
