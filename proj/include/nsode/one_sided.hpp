#pragma once

// Guards certifying that a step approaches the switching surface from the
// R1 side without doubling back, so f1 is never needed beyond the surface.
// All guards look at the R1 field f1 and the orientation h < 0 -> h > 0.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nsode/linalg.hpp"
#include "nsode/problem.hpp"
#include "nsode/rosenbrock.hpp"

namespace nsode {

enum class GuardMode { Off, Ros1General, Ros1Orthogonal, Ros2Dense };

std::string to_string(GuardMode mode);

struct GuardReport {
  GuardMode mode = GuardMode::Off;
  /// Named coefficients exactly as evaluated (a0, a1, a2 / b0, b1, b2 /
  /// min_derivative, m1, m2).
  std::vector<std::pair<std::string, double>> coefficients;
  bool passed = false;
  /// Largest step certified by the truncated bound; equals tau when passed.
  double certified_sigma = 0.0;
  /// Whether rho(gamma * tau * J) < 1, the hypothesis behind the series.
  bool neumann_ok = false;

  /// NaN when the name is absent.
  double coefficient(const std::string& name) const;
};

/// h_x(x)^T f1(x). Positive values mean h grows along f1 at x.
double transversality(const PiecewiseProblem& p, const Vector& x);

/// One-stage scheme, general J. With every quantity taken at x0:
///   a0 = h_x^T f1
///   a1 = f1^T h_xx f1 + 2g h_x^T J f1
///   a2 = 3g^2 h_x^T J^2 f1 + 2g f1^T h_xx J f1 + g f1^T J^T h_xx f1
/// Passes iff a0 > 0 and a0 - tau max(0, -a1) - tau^2 max(0, -a2) > 0.
/// Abstains (passed = false) when rho(g tau J) >= 1.
GuardReport guard_ros1_general(const PiecewiseProblem& p, const Vector& x0, double tau, double gamma);

/// One-stage scheme when (I - g tau J) is orthogonal:
///   b0 = h_x^T f1
///   b1 = f1^T h_xx^T f1 - 2g h_x^T J^T f1
///   b2 = 2g f1^T h_xx J^T f1 + g f1^T h_xx^T J^T f1   (enters with a minus sign)
/// Passes iff b0 > 0 and b0 - tau max(0, -b1) - tau^2 max(0, b2) > 0.
/// Throws NotOrthogonal when ||M^T M - I||_inf > 1e-8 for M = I - g tau J.
GuardReport guard_ros1_orthogonal(const PiecewiseProblem& p, const Vector& x0, double tau,
                                  double gamma);

inline constexpr double kOrthogonalityTol = 1e-8;

enum class StageCase {
  NoEvent,  ///< internal stage and endpoint both below the surface
  Case1a,   ///< h(x0 + k1) <= 0 <= h(x1)
  Case1b,   ///< h(x0 + k1) > 0: f1 would be needed beyond the surface
};

std::string to_string(StageCase c);

/// Requires a two-stage step.
StageCase classify_stage(const PiecewiseProblem& p, const RosenbrockStep& step);

struct Case1bOptions {
  double h_tol = 1e-12;
  /// Bisection stops once the sigma bracket is below bracket_tol * tau.
  double bracket_tol = 1e-12;
  int max_iter = 200;
};

struct StepReduction {
  double sigma_bar = 0.0;
  RosenbrockStep step;
  int iterations = 0;
};

/// Bisection on g(sigma) = h(x0 + k1(sigma)) over (0, tau]. Each trial sigma
/// re-factorizes (I - g sigma J) because k1 depends on the step size. The
/// returned sigma_bar is the lower bracket end, so h(x0 + k1(sigma_bar)) <= 0
/// and the finishing stage never evaluates f1 beyond the surface.
StepReduction resolve_case_1b(const PiecewiseProblem& p, const Vector& x0, double tau,
                              const Case1bOptions& opts = {});
/// Same, reusing a Jacobian and f1(x0) the caller already has.
StepReduction resolve_case_1b(const PiecewiseProblem& p, const Vector& x0, double tau,
                              const Matrix& J, const Vector& f0, const Case1bOptions& opts = {});

inline constexpr std::size_t kDefaultGuardGrid = 64;

/// Checks d(theta) = h_x(X(theta))^T X'(theta) > 0 on theta_j = j / (n_grid - 1).
/// Also reports m1 = min_j h_x(X(theta_j))^T c[(2 - 6g) k1 - 2g k2] and
/// m2 = min_j h_x(X(theta_j))^T 2c (k1 + k2) as diagnostics (ros2 only).
/// Needs only h_x along the dense output; never calls the vector field.
GuardReport guard_ros2_dense(const PiecewiseProblem& p, const RosenbrockStep& step,
                             std::size_t n_grid = kDefaultGuardGrid);

}  // namespace nsode
