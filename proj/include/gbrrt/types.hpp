#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbrrt {

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InvalidStateError : public Error {
 public:
  using Error::Error;
};
class NotFoundError : public Error {
 public:
  using Error::Error;
};
class DuplicateIdError : public Error {
 public:
  using Error::Error;
};
class PropagationError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

using NodeId = std::uint32_t;

enum class DimKind { linear, angular };
enum class Direction { forward, reverse };

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle into [-pi, pi).
inline double wrap_angle(double theta) {
  double w = std::fmod(theta + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs like -pi - 2^-52.
  if (w >= kPi) w -= kTwoPi;
  return w;
}

/// Signed shortest difference a - b on the circle, in [-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// Unsigned shortest distance between two angles, in [0, pi].
inline double angle_dist(double a, double b) { return std::abs(angle_diff(a, b)); }

struct State {
  std::vector<double> values;

  State() = default;
  explicit State(std::vector<double> v) : values(std::move(v)) {}
  State(std::initializer_list<double> v) : values(v) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const { return values; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const State&, const State&) = default;
};

struct ControlInput {
  std::vector<double> values;

  ControlInput() = default;
  explicit ControlInput(std::vector<double> v) : values(std::move(v)) {}
  ControlInput(std::initializer_list<double> v) : values(v) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

/// Axis-aligned box, used for state bounds and control bounds.
struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const { return lo.size(); }

  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Normalizes angular components into [-pi, pi). Throws InvalidStateError on
/// non-finite input.
inline State wrap_angles(State s, std::span<const DimKind> kinds) {
  if (s.size() != kinds.size())
    throw InvalidStateError("state has " + std::to_string(s.size()) + " components, expected " +
                            std::to_string(kinds.size()));
  if (!s.all_finite()) throw InvalidStateError("state has non-finite components");
  for (std::size_t i = 0; i < kinds.size(); ++i)
    if (kinds[i] == DimKind::angular) s[i] = wrap_angle(s[i]);
  return s;
}

inline void wrap_in_place(std::span<double> x, std::span<const DimKind> kinds) {
  for (std::size_t i = 0; i < kinds.size(); ++i)
    if (kinds[i] == DimKind::angular) x[i] = wrap_angle(x[i]);
}

inline std::string to_string(const State& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

}  // namespace gbrrt
