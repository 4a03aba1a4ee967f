#include "nsode/one_sided.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsode/errors.hpp"

namespace nsode {

std::string to_string(GuardMode mode) {
  switch (mode) {
    case GuardMode::Off: return "off";
    case GuardMode::Ros1General: return "ros1";
    case GuardMode::Ros1Orthogonal: return "ros1-orth";
    case GuardMode::Ros2Dense: return "ros2-dense";
  }
  return "unknown";
}

std::string to_string(StageCase c) {
  switch (c) {
    case StageCase::NoEvent: return "no-event";
    case StageCase::Case1a: return "case-1a";
    case StageCase::Case1b: return "case-1b";
  }
  return "unknown";
}

double GuardReport::coefficient(const std::string& name) const {
  for (const auto& [key, value] : coefficients)
    if (key == name) return value;
  return std::numeric_limits<double>::quiet_NaN();
}

double transversality(const PiecewiseProblem& p, const Vector& x) {
  return dot(p.event_gradient(x), eval_field(p, FieldId::One, x));
}

namespace {

/// Positive root of rho_hi s^2 + rho_lo s - c0 = 0, the step where the
/// truncated bound c0 - rho_lo s - rho_hi s^2 reaches zero.
double degeneration_step(double c0, double rho_lo, double rho_hi) {
  if (c0 <= 0.0) return 0.0;
  if (rho_lo == 0.0 && rho_hi == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * c0 / (rho_lo + std::sqrt(rho_lo * rho_lo + 4.0 * rho_hi * c0));
}

void check_tau(double tau, const char* who) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument(std::string(who) + ": tau must be positive");
  }
}

void require_analytic_or_fd(const PiecewiseProblem& p, const char* who) {
  if (!p.h) throw MissingDerivative(std::string(who) + ": problem has no event function");
}

}  // namespace

GuardReport guard_ros1_general(const PiecewiseProblem& p, const Vector& x0, double tau, double gamma) {
  check_tau(tau, "guard_ros1_general");
  require_analytic_or_fd(p, "guard_ros1_general");
  const Vector f = eval_field(p, FieldId::One, x0);
  const Matrix J = p.jacobian(FieldId::One, x0);
  const Vector hx = p.event_gradient(x0);
  const Matrix H = p.event_hessian(x0);

  const Vector Jf = J * f;
  const double a0 = dot(hx, f);
  const double a1 = bilinear(f, H, f) + 2.0 * gamma * dot(hx, Jf);
  const double a2 = 3.0 * gamma * gamma * dot(hx, J * Jf) + 2.0 * gamma * bilinear(f, H, Jf) +
                    gamma * bilinear(Jf, H, f);

  GuardReport r;
  r.mode = GuardMode::Ros1General;
  r.coefficients = {{"a0", a0}, {"a1", a1}, {"a2", a2}};
  r.neumann_ok = spectral_radius_bound(gamma * tau * J) < 1.0;

  const double rho2 = std::max(0.0, -a1);
  const double rho3 = std::max(0.0, -a2);
  const bool bound_holds = a0 > 0.0 && a0 - tau * rho2 - tau * tau * rho3 > 0.0;
  r.passed = r.neumann_ok && bound_holds;
  r.certified_sigma = bound_holds ? tau : std::min(tau, degeneration_step(a0, rho2, rho3));
  return r;
}

GuardReport guard_ros1_orthogonal(const PiecewiseProblem& p, const Vector& x0, double tau,
                                  double gamma) {
  check_tau(tau, "guard_ros1_orthogonal");
  require_analytic_or_fd(p, "guard_ros1_orthogonal");
  const Matrix J = p.jacobian(FieldId::One, x0);
  const std::size_t n = J.rows();

  Matrix m = Matrix::identity(n) - gamma * tau * J;
  const double defect = norm_inf(m.transpose() * m - Matrix::identity(n));
  if (!(defect <= kOrthogonalityTol)) {
    throw NotOrthogonal("guard_ros1_orthogonal: ||M^T M - I|| = " + std::to_string(defect));
  }

  const Vector f = eval_field(p, FieldId::One, x0);
  const Vector hx = p.event_gradient(x0);
  const Matrix H = p.event_hessian(x0);
  const Matrix Ht = H.transpose();
  const Vector Jtf = J.transpose() * f;

  const double b0 = dot(hx, f);
  const double b1 = bilinear(f, Ht, f) - 2.0 * gamma * dot(hx, Jtf);
  const double b2 = 2.0 * gamma * bilinear(f, H, Jtf) + gamma * bilinear(f, Ht, Jtf);

  GuardReport r;
  r.mode = GuardMode::Ros1Orthogonal;
  r.coefficients = {{"b0", b0}, {"b1", b1}, {"b2", b2}};
  r.neumann_ok = spectral_radius_bound(gamma * tau * J) < 1.0;

  const double rho1 = std::max(0.0, -b1);
  const double rho2 = std::max(0.0, b2);
  r.passed = b0 > 0.0 && b0 - tau * rho1 - tau * tau * rho2 > 0.0;
  r.certified_sigma = r.passed ? tau : std::min(tau, degeneration_step(b0, rho1, rho2));
  return r;
}

StageCase classify_stage(const PiecewiseProblem& p, const RosenbrockStep& step) {
  if (step.method != Method::Ros2) {
    throw InvalidArgument("classify_stage: needs a two-stage step");
  }
  const double h_stage = p.event(step.x0 + step.k1);
  if (h_stage > 0.0) return StageCase::Case1b;
  if (p.event(step.x1) >= 0.0) return StageCase::Case1a;
  return StageCase::NoEvent;
}

StepReduction resolve_case_1b(const PiecewiseProblem& p, const Vector& x0, double tau,
                              const Case1bOptions& opts) {
  const Matrix J = p.jacobian(FieldId::One, x0);
  const Vector f0 = eval_field(p, FieldId::One, x0);
  return resolve_case_1b(p, x0, tau, J, f0, opts);
}

StepReduction resolve_case_1b(const PiecewiseProblem& p, const Vector& x0, double tau,
                              const Matrix& J, const Vector& f0, const Case1bOptions& opts) {
  check_tau(tau, "resolve_case_1b");
  auto stage_h = [&](double sigma) { return p.event(ros2_stage1(f0, x0, sigma, J).internal_state()); };

  double lo = 0.0;
  double g_lo = p.event(x0);
  double hi = tau;
  const double g_hi = stage_h(tau);
  if (!(g_lo < 0.0) || !(g_hi > 0.0)) {
    throw NoBracket("resolve_case_1b: h(x0) = " + std::to_string(g_lo) +
                    ", h(x0 + k1(tau)) = " + std::to_string(g_hi));
  }

  int it = 0;
  while (g_lo < -opts.h_tol && hi - lo > opts.bracket_tol * tau) {
    if (++it > opts.max_iter) {
      throw MaxIterations("resolve_case_1b: no convergence after " + std::to_string(opts.max_iter) +
                          " bisections");
    }
    const double mid = 0.5 * (lo + hi);
    const double g_mid = stage_h(mid);
    if (g_mid <= 0.0) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  if (lo == 0.0) {
    throw NoBracket("resolve_case_1b: internal stage leaves R1 for every admissible step");
  }

  StepReduction out;
  out.sigma_bar = lo;
  out.iterations = it;
  out.step = ros2_complete(ros2_stage1(f0, x0, lo, J),
                           [&p](const Vector& x) { return eval_field(p, FieldId::One, x); });
  out.step.field = FieldId::One;
  return out;
}

GuardReport guard_ros2_dense(const PiecewiseProblem& p, const RosenbrockStep& step,
                             std::size_t n_grid) {
  if (n_grid < 2) throw InvalidArgument("guard_ros2_dense: need at least two grid points");
  require_analytic_or_fd(p, "guard_ros2_dense");

  const bool two_stage = step.method == Method::Ros2;
  Vector split_a;
  Vector split_b;
  if (two_stage) {
    const double g = step.gamma;
    split_a = step.c * ((2.0 - 6.0 * g) * step.k1 - 2.0 * g * step.k2);
    split_b = 2.0 * step.c * (step.k1 + step.k2);
  }

  double min_d = std::numeric_limits<double>::infinity();
  double m1 = std::numeric_limits<double>::infinity();
  double m2 = std::numeric_limits<double>::infinity();
  std::size_t first_fail = n_grid;
  for (std::size_t j = 0; j < n_grid; ++j) {
    const double theta = static_cast<double>(j) / static_cast<double>(n_grid - 1);
    const Vector hx = p.event_gradient(dense_eval(step, theta));
    const double d = dot(hx, dense_derivative(step, theta));
    min_d = std::min(min_d, d);
    if (!(d > 0.0) && first_fail == n_grid) first_fail = j;
    if (two_stage) {
      m1 = std::min(m1, dot(hx, split_a));
      m2 = std::min(m2, dot(hx, split_b));
    }
  }

  GuardReport r;
  r.mode = GuardMode::Ros2Dense;
  r.coefficients = {{"min_derivative", min_d}};
  if (two_stage) {
    r.coefficients.emplace_back("m1", m1);
    r.coefficients.emplace_back("m2", m2);
  }
  r.passed = first_fail == n_grid;
  if (r.passed) {
    r.certified_sigma = step.tau;
  } else if (first_fail == 0) {
    r.certified_sigma = 0.0;
  } else {
    r.certified_sigma =
        step.tau * static_cast<double>(first_fail - 1) / static_cast<double>(n_grid - 1);
  }
  r.neumann_ok = spectral_radius_bound(step.gamma * step.tau * step.jacobian) < 1.0;
  return r;
}

}  // namespace nsode
