#pragma once

// Convergence studies under step halving, measured at the first surface hit.

#include <optional>
#include <vector>

#include "nsode/linalg.hpp"
#include "nsode/problem.hpp"
#include "nsode/rosenbrock.hpp"

namespace nsode {

struct OrderStudyRow {
  double tau = 0.0;
  double eps = 0.0;
  double global_error = 0.0;
  /// previous_error / global_error; absent on the first row.
  std::optional<double> reduction_factor;

  bool operator==(const OrderStudyRow&) const = default;
};

struct ReferenceConfig {
  /// Reference step = smallest study step / refinement.
  int refinement = 64;
  double h_tol_ref = 1e-13;

  void validate() const;
};

struct ReferenceState {
  double t = 0.0;
  Vector x;
};

/// First located event of a ros2 run with step tau_ref. Throws
/// NoEventBeforeHorizon when the run reaches t_end without one.
ReferenceState reference_event_state(const PiecewiseProblem& p, const Vector& x0, double tau_ref,
                                     double t_end, const ReferenceConfig& ref = {});

struct OrderStudyConfig {
  Method method = Method::Ros2;
  double tau0 = 1e-3;
  int halvings = 4;
  bool locate = true;
  /// Horizon for the search of the first event.
  double t_end = 1.0;
  /// Reported in the eps column; 0 for problems without one.
  double eps = 0.0;
  ReferenceConfig reference;
};

/// Rows for tau = tau0 / 2^k, k = 0..halvings. Error is the Euclidean norm of
/// the difference from the reference.
///   locate = true:  at the first located event, against reference_event_state.
///   locate = false: at t_meas, the first point of the tau0 mesh strictly past
///                   the reference event time (shared by every row), against a
///                   located ros2 reference run to t_meas.
std::vector<OrderStudyRow> run_order_study(const PiecewiseProblem& p, const Vector& x0,
                                           const OrderStudyConfig& cfg);

/// Mean of log2(reduction_factor) over the rows that have one.
double mean_observed_order(const std::vector<OrderStudyRow>& rows);

}  // namespace nsode
