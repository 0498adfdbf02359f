#pragma once

#include <string>
#include <vector>

#include "gbrrt/bench.hpp"

namespace testing_helpers {

inline std::string source_path(const std::string& rel) { return std::string(GBRRT_SOURCE_DIR) + "/" + rel; }

/// Straight edge from a to b with n+1 evenly spaced samples over `duration`.
inline gbrrt::Edge line_edge(const gbrrt::State& a, const gbrrt::State& b, std::size_t n = 10, double duration = 1.0) {
  gbrrt::Edge e(a.size());
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i <= n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t k = 0; k < a.size(); ++k) s[k] = a[k] + f * (b[k] - a[k]);
    e.push_sample(f * duration, s);
  }
  e.duration = duration;
  return e;
}

inline gbrrt::Scenario empty_unicycle(double extent = 100.0) {
  gbrrt::Scenario sc;
  sc.id = "test_empty";
  sc.system = "unicycle";
  sc.bounds = {{0, 0, -gbrrt::kPi}, {extent, extent, gbrrt::kPi}};
  sc.start = {5, 5, 0};
  sc.goal = {extent - 5, extent - 5, 0};
  const double inf = std::numeric_limits<double>::infinity();
  sc.goal_below = {2, 2, inf};
  sc.goal_above = {2, 2, inf};
  return sc;
}

}  // namespace testing_helpers
