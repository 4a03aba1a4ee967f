#pragma once

// One- and two-stage Rosenbrock (linearly implicit) steps and their
// continuous extensions.
//
//   ros1:  (I - g*tau*J) k1 = tau f(x0),                x1 = x0 + k1
//   ros2:  (I - g*tau*J) k1 = tau f(x0)
//          (I - g*tau*J) k2 = tau f(x0 + k1) - 2 k1,     x1 = x0 + 3/2 k1 + 1/2 k2
//
// with g = 1 for ros1 and g = 1 - sqrt(2)/2 for ros2. The ros2 dense output is
//
//   X(theta) = x0 + c b1(theta) k1 + c b2(theta) k2,   c = 1 / (2 (1 - 2g)),
//   b1(theta) = theta^2 + (2 - 6g) theta,  b2(theta) = theta^2 - 2g theta,
//
// and the ros1 dense output is X(theta) = x0 + theta k1.

#include <array>
#include <cmath>
#include <string>

#include "nsode/linalg.hpp"
#include "nsode/problem.hpp"

namespace nsode {

enum class Method { Ros1, Ros2 };

/// gamma for the two-stage scheme, 1 - sqrt(2)/2 in double precision.
inline const double kRos2Gamma = 1.0 - std::sqrt(2.0) / 2.0;

struct RosMethod {
  int stages = 2;
  double gamma = kRos2Gamma;
  std::string label = "ros2";

  static RosMethod ros1() { return {1, 1.0, "ros1"}; }
  static RosMethod ros2() { return {2, kRos2Gamma, "ros2"}; }
  static RosMethod of(Method m) { return m == Method::Ros1 ? ros1() : ros2(); }
};

/// Coefficients (constant, linear, quadratic) of the dense-output polynomials.
struct DensePolynomials {
  std::array<double, 3> b1{};
  std::array<double, 3> b2{};
  double c = 0.0;

  static DensePolynomials for_gamma(double gamma);
  double eval_b1(double theta) const { return (b1[2] * theta + b1[1]) * theta + b1[0]; }
  double eval_b2(double theta) const { return (b2[2] * theta + b2[1]) * theta + b2[0]; }
};

/// One step of either method: the unit of dense-output evaluation.
/// For ros1, k2 is empty and c is zero.
struct RosenbrockStep {
  Method method = Method::Ros2;
  double gamma = kRos2Gamma;
  Vector x0;
  double tau = 0.0;
  Matrix jacobian;
  Vector k1;
  Vector k2;
  Vector x1;
  double c = 0.0;
  FieldId field = FieldId::One;
};

/// First stage of a ros2 step. Holds the factorization reused by stage two.
struct Ros2Stage1 {
  Vector x0;
  double tau = 0.0;
  Matrix jacobian;
  LuFactors lu;
  Vector k1;

  /// x0 + k1, where stage two evaluates the field.
  Vector internal_state() const { return x0 + k1; }
};

RosenbrockStep ros1_step(const VectorFunction& field, const Vector& x0, double tau, const Matrix& J,
                         double gamma = 1.0);

/// Factorizes (I - g*tau*J) once and solves for k1 given f0 = f(x0).
Ros2Stage1 ros2_stage1(const Vector& f0, const Vector& x0, double tau, const Matrix& J);
/// Evaluates the field at x0 + k1 and finishes the step with the stored LU.
RosenbrockStep ros2_complete(Ros2Stage1 stage, const VectorFunction& field);
RosenbrockStep ros2_step(const VectorFunction& field, const Vector& x0, double tau, const Matrix& J);

/// Recomputes the whole step at size sigma with the same Jacobian.
RosenbrockStep restep(const VectorFunction& field, Method method, const Vector& x0, double sigma,
                      const Matrix& J);

/// Dense output at theta in [0, 1]. Pure polynomial evaluation: no field
/// calls and no linear solves. Exact at both ends: X(0) == x0, X(1) == x1.
Vector dense_eval(const RosenbrockStep& step, double theta);
/// d X / d theta.
Vector dense_derivative(const RosenbrockStep& step, double theta);

}  // namespace nsode
