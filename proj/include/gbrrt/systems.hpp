#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gbrrt/dynamics.hpp"

namespace gbrrt {

namespace detail {
inline constexpr double kInf = std::numeric_limits<double>::infinity();
}

/// x' = u cos(theta), y' = u sin(theta), theta' = omega.
class Unicycle : public SystemModel {
 public:
  Unicycle() {
    id_ = "unicycle";
    kinds_ = {DimKind::linear, DimKind::linear, DimKind::angular};
    names_ = {"x", "y", "theta"};
    control_bounds_ = {{-5.0, -kPi / 2}, {5.0, kPi / 2}};
    default_bounds_ = {{-detail::kInf, -detail::kInf, -kPi}, {detail::kInf, detail::kInf, kPi}};
    spec_ = DistanceSpec::per_dimension({1.0, 1.0, 0.0}, kinds_);
    positional_ = {0, 1};
    defaults_ = {7.0, 40, 0.8, 14.0, 1.0};
  }

  void derivative(std::span<const double> x, std::span<const double> u, std::span<double> dx) const override {
    dx[0] = u[0] * std::cos(x[2]);
    dx[1] = u[0] * std::sin(x[2]);
    dx[2] = u[1];
  }
};

/// Kinematic quadrotor in position space; the control is a velocity.
class KinematicQuadrotor : public SystemModel {
 public:
  KinematicQuadrotor() {
    id_ = "quadrotor";
    kinds_ = {DimKind::linear, DimKind::linear, DimKind::linear};
    names_ = {"x", "y", "z"};
    control_bounds_ = {{-4.0, -4.0, -4.0}, {4.0, 4.0, 4.0}};
    default_bounds_ = {{-detail::kInf, -detail::kInf, -detail::kInf}, {detail::kInf, detail::kInf, detail::kInf}};
    spec_ = DistanceSpec::per_dimension({1.0, 1.0, 1.0}, kinds_);
    positional_ = {0, 1, 2};
    defaults_ = {8.0, 90, 0.8, 16.0, 2.5};
  }

  void derivative(std::span<const double>, std::span<const double> u, std::span<double> dx) const override {
    dx[0] = u[0];
    dx[1] = u[1];
    dx[2] = u[2];
  }
};

/// Cart with a pendulum; theta is measured from the downward vertical.
/// State (x, theta, v, omega), control force F.
class CartPole : public SystemModel {
 public:
  double I = 10.0, L = 2.5, M = 10.0, m = 5.0, g = 9.8;

  CartPole() {
    id_ = "cartpole";
    kinds_ = {DimKind::linear, DimKind::angular, DimKind::linear, DimKind::linear};
    names_ = {"x", "theta", "v", "omega"};
    control_bounds_ = {{-300.0}, {300.0}};
    default_bounds_ = {{-30.0, -kPi, -40.0, -2.0}, {30.0, kPi, 40.0, 2.0}};
    spec_ = DistanceSpec::per_dimension({1.0, 1.5, 1.0, 1.0}, kinds_, {false, false, true, true});
    positional_ = {0};
    velocity_ = {2, 3};
    defaults_ = {6.0, 7, 0.7, 10.0, 1.0};
  }

  void derivative(std::span<const double> x, std::span<const double> u, std::span<double> dx) const override {
    const double th = x[1], w = x[3], F = u[0];
    const double s = std::sin(th), c = std::cos(th);
    const double mL = m * L;
    const double J = I + m * L * L;
    const double den = (M + m) * J - mL * mL * c * c;
    const double push = F + mL * w * w * s;
    dx[0] = x[2];
    dx[1] = w;
    dx[2] = (J * push + mL * mL * c * s * g) / den;
    dx[3] = (-mL * c * push + (M + m) * (-m * g * L * s)) / den;
  }
};

/// Skid-steer vehicle. State (x, y, theta, vL, vR), control (aL, aR).
/// Body velocities follow the kinematic skid-steer model with track width W.
class Treaded : public SystemModel {
 public:
  double W = 1.0;

  Treaded() {
    id_ = "treaded";
    kinds_ = {DimKind::linear, DimKind::linear, DimKind::angular, DimKind::linear, DimKind::linear};
    names_ = {"x", "y", "theta", "vL", "vR"};
    control_bounds_ = {{-2.0, -2.0}, {2.0, 2.0}};
    default_bounds_ = {{-detail::kInf, -detail::kInf, -kPi, -3.0, -3.0}, {detail::kInf, detail::kInf, kPi, 3.0, 3.0}};
    spec_ = DistanceSpec::per_dimension({1.0, 1.0, 0.0, 0.25, 0.25}, kinds_, {false, false, false, true, true});
    positional_ = {0, 1};
    velocity_ = {3, 4};
    defaults_ = {3.0, 7, 0.7, 7.0, 2.0};
  }

  void derivative(std::span<const double> x, std::span<const double> u, std::span<double> dx) const override {
    const double vx = 0.5 * (x[3] + x[4]);
    const double vy = 0.0;
    const double wz = (x[4] - x[3]) / W;
    const double s = std::sin(x[2]), c = std::cos(x[2]);
    dx[0] = vx * c - vy * s;
    dx[1] = vx * s - vy * c;
    dx[2] = wz;
    dx[3] = u[0];
    dx[4] = u[1];
  }
};

/// Second-order car towing a trailer. State (x, y, theta, v, omega, theta1),
/// control (a, alpha).
class CarTrailer : public SystemModel {
 public:
  CarTrailer() {
    id_ = "cartrailer";
    kinds_ = {DimKind::linear, DimKind::linear, DimKind::angular, DimKind::linear, DimKind::linear, DimKind::angular};
    names_ = {"x", "y", "theta", "v", "omega", "theta1"};
    control_bounds_ = {{-1.0, -1.0}, {1.0, 1.0}};
    default_bounds_ = {{-detail::kInf, -detail::kInf, -kPi, -1.0, -kPi / 3, -kPi},
                       {detail::kInf, detail::kInf, kPi, 3.0, kPi / 3, kPi}};
    spec_ = DistanceSpec::per_dimension({1.0, 1.0, 0.0, 0.25, 0.0, 0.0}, kinds_,
                                        {false, false, false, true, false, false});
    positional_ = {0, 1};
    velocity_ = {3};
    defaults_ = {4.0, 7, 0.7, 8.0, 2.0};
  }

  void derivative(std::span<const double> x, std::span<const double> u, std::span<double> dx) const override {
    const double th = x[2], v = x[3], om = x[4];
    dx[0] = v * std::cos(th) * std::cos(om);
    dx[1] = v * std::sin(th) * std::cos(om);
    dx[2] = v * std::sin(om);
    dx[3] = u[0];
    dx[4] = u[1];
    dx[5] = v * std::sin(th - x[5]);
  }
};

/// Point-mass airplane with first-order thrust, angle-of-attack and roll
/// actuators. State (x, y, z, v, omega, beta, T, alpha, mu) with omega the
/// flight-path angle and beta the heading; control (Tc, alpha_c, mu_c).
class FixedWing : public SystemModel {
 public:
  double g = 9.8;
  double k = 0.2;
  double c_T = 2.0, c_alpha = 4.0, c_mu = 4.0;
  double cl0 = 0.28, cl_alpha = 3.45;
  double cd0 = 0.03, cd_k = 0.05;

  double lift_coeff(double alpha) const { return cl0 + cl_alpha * alpha; }
  double drag_coeff(double alpha) const {
    const double cl = lift_coeff(alpha);
    return cd0 + cd_k * cl * cl;
  }

  FixedWing() {
    id_ = "fixedwing";
    kinds_ = {DimKind::linear, DimKind::linear, DimKind::linear,  DimKind::linear, DimKind::linear,
              DimKind::angular, DimKind::linear, DimKind::linear, DimKind::linear};
    names_ = {"x", "y", "z", "v", "omega", "beta", "T", "alpha", "mu"};
    control_bounds_ = {{0.0, -0.1, -0.7}, {8.0, 0.4, 0.7}};
    default_bounds_ = {{-detail::kInf, -detail::kInf, -detail::kInf, 3.0, -kPi / 4, -kPi, 0.0, -0.1, -0.7},
                       {detail::kInf, detail::kInf, detail::kInf, 25.0, kPi / 4, kPi, 8.0, 0.4, 0.7}};
    spec_.state_dim = 9;
    for (std::size_t i = 0; i < 3; ++i) spec_.terms.push_back({TermKind::coordinate, i, 1.0});
    for (int axis = 0; axis < 3; ++axis) {
      DistanceTerm t;
      t.kind = TermKind::velocity;
      t.weight = 0.9;
      t.axis = axis;
      t.speed_dim = 3;
      t.pitch_dim = 4;
      t.heading_dim = 5;
      t.dynamic = true;
      spec_.terms.push_back(t);
    }
    positional_ = {0, 1, 2};
    velocity_ = {3};
    defaults_ = {6.0, 7, 0.7, 10.0, 1.0};
  }

  void derivative(std::span<const double> x, std::span<const double> u, std::span<double> dx) const override {
    const double v = x[3], om = x[4], be = x[5], T = x[6], al = x[7], mu = x[8];
    const double cw = std::cos(om), sw = std::sin(om);
    const double lift = T * std::sin(al) / v + k * v * lift_coeff(al);
    dx[0] = v * cw * std::cos(be);
    dx[1] = v * cw * std::sin(be);
    dx[2] = v * sw;
    dx[3] = T * std::cos(al) - k * v * v * drag_coeff(al) - g * sw;
    dx[4] = lift * std::cos(mu) - g * cw / v;
    dx[5] = lift * std::sin(mu) / cw;
    dx[6] = c_T * (u[0] - T);
    dx[7] = c_alpha * (u[1] - al);
    dx[8] = c_mu * (u[2] - mu);
  }
};

inline const std::vector<std::string>& system_ids() {
  static const std::vector<std::string> ids = {"unicycle", "quadrotor", "cartpole", "treaded", "cartrailer", "fixedwing"};
  return ids;
}

/// Builds a model without attaching a maneuver library.
inline std::shared_ptr<SystemModel> make_bare_system(const std::string& id) {
  if (id == "unicycle") return std::make_shared<Unicycle>();
  if (id == "quadrotor") return std::make_shared<KinematicQuadrotor>();
  if (id == "cartpole") return std::make_shared<CartPole>();
  if (id == "treaded") return std::make_shared<Treaded>();
  if (id == "cartrailer") return std::make_shared<CarTrailer>();
  if (id == "fixedwing") return std::make_shared<FixedWing>();
  throw ValidationError("unknown system '" + id + "'");
}

}  // namespace gbrrt
