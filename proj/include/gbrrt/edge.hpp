#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gbrrt/types.hpp"

namespace gbrrt {

/// Reference to a maneuver-library template. `reversed` marks a template
/// applied backward from its end state (reverse-tree use).
struct ManeuverRef {
  std::size_t index = 0;
  bool reversed = false;
  friend bool operator==(const ManeuverRef&, const ManeuverRef&) = default;
};

/// Marks a straight-line edge of the no-dynamics reverse tree.
struct StraightLine {
  friend bool operator==(const StraightLine&, const StraightLine&) = default;
};

using EdgeControl = std::variant<ControlInput, ManeuverRef, StraightLine>;

/// A trajectory segment. Samples are stored flat: sample i occupies
/// data[i*dim, (i+1)*dim) and was taken at times[i]. The first sample is the
/// initial state and the last is the final state, whatever the direction the
/// edge was generated in.
class Edge {
 public:
  Edge() = default;
  explicit Edge(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t sample_count() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  void reserve(std::size_t n) {
    times_.reserve(n);
    data_.reserve(n * dim_);
  }

  void push_sample(double t, std::span<const double> s) {
    times_.push_back(t);
    data_.insert(data_.end(), s.begin(), s.end());
  }

  std::span<const double> sample(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * dim_, dim_);
  }
  double time(std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }

  State state_at(std::size_t i) const {
    auto s = sample(i);
    return State(std::vector<double>(s.begin(), s.end()));
  }
  State initial() const { return state_at(0); }
  State final() const { return state_at(sample_count() - 1); }

  /// Reverses sample order in place, keeping times increasing from zero.
  void reverse_samples() {
    const std::size_t n = times_.size();
    std::vector<double> t(n), d(data_.size());
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = times_.back() - times_[n - 1 - i];
      std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>((n - 1 - i) * dim_), dim_,
                  d.begin() + static_cast<std::ptrdiff_t>(i * dim_));
    }
    times_ = std::move(t);
    data_ = std::move(d);
  }

  EdgeControl control = ControlInput{};
  double duration = 0.0;
  double cost = 0.0;
  Direction direction = Direction::forward;
  bool truncated = false;

 private:
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> data_;
};

/// Checks the structural invariants: positive duration, strictly increasing
/// sample times from 0 to duration. Returns an empty string when valid.
inline std::string check_edge_structure(const Edge& e, double t_max) {
  if (e.sample_count() < 2) return "edge needs at least two samples";
  if (!(e.duration > 0.0)) return "edge duration must be positive";
  if (e.duration > t_max * (1.0 + 1e-9)) return "edge duration exceeds t_max";
  if (e.time(0) != 0.0) return "first sample time must be zero";
  for (std::size_t i = 1; i < e.sample_count(); ++i)
    if (!(e.time(i) > e.time(i - 1))) return "sample times must strictly increase";
  if (std::abs(e.time(e.sample_count() - 1) - e.duration) > 1e-9 * std::max(1.0, e.duration))
    return "last sample time must equal duration";
  if (!(e.cost >= 0.0)) return "edge cost must be nonnegative";
  return {};
}

}  // namespace gbrrt
