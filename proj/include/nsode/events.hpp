#pragma once

// Event-driven integration: fixed-step Rosenbrock steps, sign-change detection,
// root finding in theta on the dense output, and field switching.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsode/filippov.hpp"
#include "nsode/linalg.hpp"
#include "nsode/one_sided.hpp"
#include "nsode/problem.hpp"
#include "nsode/rosenbrock.hpp"

namespace nsode {

enum class RootFinder { Bisection, Secant };
enum class Direction { R1toR2, R2toR1 };

std::string to_string(Direction d);

struct IntegratorConfig {
  Method method = Method::Ros2;
  double tau = 1e-3;
  double t0 = 0.0;
  double t_end = 1.0;
  double theta_tol = 1e-12;
  double h_tol = 1e-12;
  double sigma_tol = kSigmaTol;
  int max_bisect = 200;
  RootFinder root_finder = RootFinder::Bisection;
  bool locate_events = true;
  /// Ros1General / Ros1Orthogonal need Method::Ros1, Ros2Dense needs
  /// Method::Ros2. Ros2Dense also turns on the internal-stage step reduction.
  GuardMode guard_mode = GuardMode::Off;
  std::size_t max_events = 1000;
  std::size_t guard_grid = kDefaultGuardGrid;
  double classify_tol = kClassifyTol;
  std::size_t max_steps = 100'000'000;

  /// Throws InvalidArgument.
  void validate() const;
};

struct EventRecord {
  std::size_t step_index = 0;
  double theta_star = 0.0;
  double t_star = 0.0;
  Vector x_star;
  double residual = 0.0;
  Direction direction = Direction::R1toR2;
  int root_iterations = 0;
  /// False when the root finder hit max_bisect, or when the event was not
  /// located at all (naive stepping).
  bool converged = true;
  std::optional<SurfaceClassification> classification;
  std::optional<GuardReport> guard;
  /// Set when the step into the surface was shortened by the internal-stage rule.
  std::optional<double> sigma_bar;
};

enum class Termination {
  ReachedTEnd,
  SlidingEncountered,
  TangentialContact,
  GuardFailure,
  SolverFailure,
  MaxEventsReached,
  MaxStepsReached,
};

std::string to_string(Termination t);

struct MeshPoint {
  double t = 0.0;
  Vector x;
};

struct IntegrationStats {
  std::array<std::uint64_t, 2> field_evals{};
  std::array<std::uint64_t, 2> domain_violations{};
  std::uint64_t lu_factorizations = 0;
  std::uint64_t linear_solves = 0;
  std::uint64_t steps = 0;
  std::uint64_t reduced_steps = 0;
};

struct TrajectoryResult {
  std::vector<MeshPoint> mesh;
  std::vector<EventRecord> events;
  IntegrationStats stats;
  Termination termination = Termination::ReachedTEnd;
  FieldId final_field = FieldId::One;
  std::string message;

  const MeshPoint& final_point() const { return mesh.back(); }
};

/// True iff h0 and h1 are nonzero with opposite signs. Compares sign bits, so
/// tiny magnitudes never underflow to a false negative.
bool detect_sign_change(double h0, double h1);

/// Root of h(X(theta)) on [0, 1] using dense_eval only. Requires a sign change
/// between theta = 0 and theta = 1 (NoBracket otherwise). The returned state
/// lies on the closed side of X(0): residual-based termination only accepts
/// such points, and width-based termination returns the near bracket end.
/// Hitting max_bisect yields a record with converged = false.
/// t_star is t0 + theta_star * step.tau.
EventRecord locate_event(const RosenbrockStep& step, const ScalarFunction& h,
                         const IntegratorConfig& cfg, double t0 = 0.0);

/// Event-driven integration from x0, which must satisfy |h(x0)| > sigma_tol.
/// After each crossing the loop restarts from the event state with a full step.
/// Sliding and tangential contacts end the run. DomainViolation is rethrown
/// with step context; a singular iteration matrix ends the run with
/// SolverFailure.
TrajectoryResult integrate(const PiecewiseProblem& p, const Vector& x0, const IntegratorConfig& cfg);

/// integrate with locate_events = false: the step across the surface is kept
/// as is and the field switches from the next mesh point on.
TrajectoryResult integrate_naive(const PiecewiseProblem& p, const Vector& x0, IntegratorConfig cfg);

}  // namespace nsode
