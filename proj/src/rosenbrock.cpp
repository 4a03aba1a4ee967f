#include "nsode/rosenbrock.hpp"

#include <string>
#include <utility>

#include "nsode/errors.hpp"

namespace nsode {

namespace {

void check_step_size(double tau, const char* who) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument(std::string(who) + ": step size must be positive and finite");
  }
}

void check_theta(double theta, const char* who) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw InvalidArgument(std::string(who) + ": theta " + std::to_string(theta) +
                          " outside [0, 1]");
  }
}

/// I - a*J
Matrix shifted_identity(const Matrix& J, double a) {
  Matrix m = -a * J;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;
  return m;
}

}  // namespace

DensePolynomials DensePolynomials::for_gamma(double gamma) {
  DensePolynomials p;
  p.b1 = {0.0, 2.0 - 6.0 * gamma, 1.0};
  p.b2 = {0.0, -2.0 * gamma, 1.0};
  p.c = 1.0 / (2.0 * (1.0 - 2.0 * gamma));
  return p;
}

RosenbrockStep ros1_step(const VectorFunction& field, const Vector& x0, double tau, const Matrix& J,
                         double gamma) {
  check_step_size(tau, "ros1_step");
  const LuFactors lu = lu_factor(shifted_identity(J, gamma * tau));
  RosenbrockStep s;
  s.method = Method::Ros1;
  s.gamma = gamma;
  s.x0 = x0;
  s.tau = tau;
  s.jacobian = J;
  s.k1 = lu_solve(lu, tau * field(x0));
  s.x1 = x0 + s.k1;
  return s;
}

Ros2Stage1 ros2_stage1(const Vector& f0, const Vector& x0, double tau, const Matrix& J) {
  check_step_size(tau, "ros2_step");
  Ros2Stage1 st{x0, tau, J, lu_factor(shifted_identity(J, kRos2Gamma * tau)), {}};
  st.k1 = lu_solve(st.lu, tau * f0);
  return st;
}

RosenbrockStep ros2_complete(Ros2Stage1 stage, const VectorFunction& field) {
  RosenbrockStep s;
  s.method = Method::Ros2;
  s.gamma = kRos2Gamma;
  s.tau = stage.tau;
  s.c = 1.0 / (2.0 * (1.0 - 2.0 * kRos2Gamma));

  Vector rhs = stage.tau * field(stage.internal_state());
  rhs -= 2.0 * stage.k1;
  s.k2 = lu_solve(stage.lu, rhs);

  const std::size_t n = stage.x0.size();
  s.x1 = Vector(n);
  for (std::size_t i = 0; i < n; ++i) s.x1[i] = stage.x0[i] + 1.5 * stage.k1[i] + 0.5 * s.k2[i];

  s.x0 = std::move(stage.x0);
  s.jacobian = std::move(stage.jacobian);
  s.k1 = std::move(stage.k1);
  return s;
}

RosenbrockStep ros2_step(const VectorFunction& field, const Vector& x0, double tau, const Matrix& J) {
  return ros2_complete(ros2_stage1(field(x0), x0, tau, J), field);
}

RosenbrockStep restep(const VectorFunction& field, Method method, const Vector& x0, double sigma,
                      const Matrix& J) {
  return method == Method::Ros1 ? ros1_step(field, x0, sigma, J) : ros2_step(field, x0, sigma, J);
}

// The ros2 weights c*b1(theta), c*b2(theta) are written as
//   c*b1 = 3/2 theta + c theta (theta - 1),   c*b2 = 1/2 theta + c theta (theta - 1),
// which is the same polynomial (c (3 - 6g) = 3/2, c (1 - 2g) = 1/2) but makes
// theta = 0 and theta = 1 reproduce x0 and x1 bit for bit.

Vector dense_eval(const RosenbrockStep& step, double theta) {
  check_theta(theta, "dense_eval");
  const std::size_t n = step.x0.size();
  Vector x(n);
  if (step.method == Method::Ros1) {
    for (std::size_t i = 0; i < n; ++i) x[i] = step.x0[i] + theta * step.k1[i];
    return x;
  }
  const double bend = step.c * theta * (theta - 1.0);
  const double w1 = 1.5 * theta + bend;
  const double w2 = 0.5 * theta + bend;
  for (std::size_t i = 0; i < n; ++i) x[i] = step.x0[i] + w1 * step.k1[i] + w2 * step.k2[i];
  return x;
}

Vector dense_derivative(const RosenbrockStep& step, double theta) {
  check_theta(theta, "dense_derivative");
  if (step.method == Method::Ros1) return step.k1;
  const double g = step.gamma;
  const double d1 = step.c * (2.0 * theta + 2.0 - 6.0 * g);
  const double d2 = step.c * (2.0 * theta - 2.0 * g);
  const std::size_t n = step.x0.size();
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = d1 * step.k1[i] + d2 * step.k2[i];
  return d;
}

}  // namespace nsode
