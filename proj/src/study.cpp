#include "nsode/study.hpp"

#include <cmath>
#include <string>

#include "nsode/errors.hpp"
#include "nsode/events.hpp"

namespace nsode {

void ReferenceConfig::validate() const {
  if (refinement < 16) throw InvalidArgument("reference refinement must be at least 16");
  if (!(h_tol_ref > 0.0)) throw InvalidArgument("reference h_tol must be positive");
}

namespace {

IntegratorConfig reference_config(double tau_ref, double t_end, const ReferenceConfig& ref) {
  IntegratorConfig cfg;
  cfg.method = Method::Ros2;
  cfg.tau = tau_ref;
  cfg.t_end = t_end;
  cfg.h_tol = ref.h_tol_ref;
  cfg.theta_tol = 1e-15;
  return cfg;
}

}  // namespace

ReferenceState reference_event_state(const PiecewiseProblem& p, const Vector& x0, double tau_ref,
                                     double t_end, const ReferenceConfig& ref) {
  ref.validate();
  IntegratorConfig cfg = reference_config(tau_ref, t_end, ref);
  cfg.max_events = 1;
  const TrajectoryResult run = integrate(p, x0, cfg);
  if (run.events.empty()) {
    throw NoEventBeforeHorizon("no event on '" + p.label + "' before t = " + std::to_string(t_end) +
                               " (" + to_string(run.termination) + ")");
  }
  return {run.events.front().t_star, run.events.front().x_star};
}

std::vector<OrderStudyRow> run_order_study(const PiecewiseProblem& p, const Vector& x0,
                                           const OrderStudyConfig& cfg) {
  if (cfg.halvings < 2) throw InvalidArgument("an order study needs at least 2 halvings");
  if (!(cfg.tau0 > 0.0) || !std::isfinite(cfg.tau0)) throw InvalidArgument("tau0 must be positive");
  cfg.reference.validate();

  const double tau_min = std::ldexp(cfg.tau0, -cfg.halvings);
  const double tau_ref = tau_min / cfg.reference.refinement;
  const ReferenceState ref = reference_event_state(p, x0, tau_ref, cfg.t_end, cfg.reference);

  double t_meas = 0.0;
  Vector x_meas;
  if (!cfg.locate) {
    const double m = std::floor(ref.t / cfg.tau0) + 1.0;
    t_meas = m * cfg.tau0;
    IntegratorConfig rc = reference_config(tau_ref, t_meas, cfg.reference);
    const TrajectoryResult run = integrate(p, x0, rc);
    if (run.termination != Termination::ReachedTEnd) {
      throw NoEventBeforeHorizon("reference run to t = " + std::to_string(t_meas) + " ended with " +
                                 to_string(run.termination));
    }
    x_meas = run.final_point().x;
  }

  std::vector<OrderStudyRow> rows;
  for (int k = 0; k <= cfg.halvings; ++k) {
    IntegratorConfig ic;
    ic.method = cfg.method;
    ic.tau = std::ldexp(cfg.tau0, -k);
    double err = 0.0;
    if (cfg.locate) {
      ic.t_end = cfg.t_end;
      ic.max_events = 1;
      const TrajectoryResult run = integrate(p, x0, ic);
      if (run.events.empty()) {
        throw NoEventBeforeHorizon("study run with tau = " + std::to_string(ic.tau) +
                                   " found no event");
      }
      err = norm2(run.events.front().x_star - ref.x);
    } else {
      ic.t_end = t_meas;
      const TrajectoryResult run = integrate_naive(p, x0, ic);
      err = norm2(run.final_point().x - x_meas);
    }
    OrderStudyRow row{ic.tau, cfg.eps, err, std::nullopt};
    if (!rows.empty()) row.reduction_factor = rows.back().global_error / err;
    rows.push_back(row);
  }
  return rows;
}

double mean_observed_order(const std::vector<OrderStudyRow>& rows) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (!r.reduction_factor) continue;
    sum += std::log2(*r.reduction_factor);
    ++count;
  }
  if (count == 0) throw InvalidArgument("no reduction factors to average");
  return sum / count;
}

}  // namespace nsode
