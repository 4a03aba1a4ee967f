#include "nsode/events.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nsode/errors.hpp"

namespace nsode {

std::string to_string(Direction d) { return d == Direction::R1toR2 ? "R1toR2" : "R2toR1"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTEnd: return "reached-t-end";
    case Termination::SlidingEncountered: return "sliding-encountered";
    case Termination::TangentialContact: return "tangential-contact";
    case Termination::GuardFailure: return "guard-failure";
    case Termination::SolverFailure: return "solver-failure";
    case Termination::MaxEventsReached: return "max-events-reached";
    case Termination::MaxStepsReached: return "max-steps-reached";
  }
  return "unknown";
}

void IntegratorConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(tau)) throw InvalidArgument("tau must be positive and finite");
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0)) {
    throw InvalidArgument("t_end must be finite and greater than t0");
  }
  if (!positive(theta_tol) || !positive(h_tol) || !positive(sigma_tol) || !positive(classify_tol)) {
    throw InvalidArgument("tolerances must be positive");
  }
  if (max_bisect <= 0) throw InvalidArgument("max_bisect must be positive");
  if (max_events == 0) throw InvalidArgument("max_events must be positive");
  if (guard_grid < 2) throw InvalidArgument("guard_grid must be at least 2");
  const bool ros1_guard = guard_mode == GuardMode::Ros1General || guard_mode == GuardMode::Ros1Orthogonal;
  if (ros1_guard && method != Method::Ros1) {
    throw InvalidArgument("guard '" + to_string(guard_mode) + "' needs method ros1");
  }
  if (guard_mode == GuardMode::Ros2Dense && method != Method::Ros2) {
    throw InvalidArgument("guard 'ros2-dense' needs method ros2");
  }
}

bool detect_sign_change(double h0, double h1) {
  if (h0 == 0.0 || h1 == 0.0 || std::isnan(h0) || std::isnan(h1)) return false;
  return std::signbit(h0) != std::signbit(h1);
}

namespace {

/// near_negative: the step starts on the h <= 0 side.
EventRecord locate_from_side(const RosenbrockStep& step, const ScalarFunction& h,
                             const IntegratorConfig& cfg, bool near_negative, double h_far) {
  auto on_near_side = [near_negative](double v) { return near_negative ? v <= 0.0 : v >= 0.0; };
  auto eval = [&](double theta) { return h(dense_eval(step, theta)); };

  EventRecord ev;
  ev.direction = near_negative ? Direction::R1toR2 : Direction::R2toR1;

  double lo = 0.0;
  double hi = 1.0;
  double h_lo = near_negative ? -std::abs(h(step.x0)) : std::abs(h(step.x0));
  double h_hi = h_far;
  double theta = -1.0;
  double last_width = hi - lo;
  int it = 0;
  while (hi - lo > cfg.theta_tol) {
    if (it >= cfg.max_bisect) {
      ev.converged = false;
      theta = 0.5 * (lo + hi);
      break;
    }
    ++it;
    double mid = 0.5 * (lo + hi);
    // Secant on the bracket ends, with a bisection step whenever the last
    // update shrank the bracket by less than half.
    if (cfg.root_finder == RootFinder::Secant && hi - lo <= 0.5 * last_width && h_hi != h_lo) {
      const double cand = lo - h_lo * (hi - lo) / (h_hi - h_lo);
      if (cand > lo && cand < hi) mid = cand;
    }
    last_width = hi - lo;
    const double hm = eval(mid);
    if (on_near_side(hm)) {
      lo = mid;
      h_lo = hm;
      if (std::abs(hm) <= cfg.h_tol) {
        theta = mid;
        break;
      }
    } else {
      hi = mid;
      h_hi = hm;
    }
  }
  if (theta < 0.0) theta = lo;

  ev.theta_star = theta;
  ev.x_star = dense_eval(step, theta);
  ev.residual = std::abs(h(ev.x_star));
  ev.root_iterations = it;
  return ev;
}

}  // namespace

EventRecord locate_event(const RosenbrockStep& step, const ScalarFunction& h,
                         const IntegratorConfig& cfg, double t0) {
  const double h0 = h(dense_eval(step, 0.0));
  const double h1 = h(dense_eval(step, 1.0));
  if (!detect_sign_change(h0, h1)) {
    throw NoBracket("locate_event: h(X(0)) = " + std::to_string(h0) +
                    " and h(X(1)) = " + std::to_string(h1) + " do not bracket a root");
  }
  EventRecord ev = locate_from_side(step, h, cfg, h0 < 0.0, h1);
  ev.t_star = t0 + ev.theta_star * step.tau;
  return ev;
}

namespace {

GuardReport run_guard(const PiecewiseProblem& p, const RosenbrockStep& step,
                      const IntegratorConfig& cfg) {
  switch (cfg.guard_mode) {
    case GuardMode::Ros1General: return guard_ros1_general(p, step.x0, step.tau, step.gamma);
    case GuardMode::Ros1Orthogonal: return guard_ros1_orthogonal(p, step.x0, step.tau, step.gamma);
    case GuardMode::Ros2Dense: return guard_ros2_dense(p, step, cfg.guard_grid);
    case GuardMode::Off: break;
  }
  return {};
}

void fill_stats(IntegrationStats& s, const PiecewiseProblem& p, const EvalCounters& eval0,
                const LinalgCounters& lin0) {
  for (std::size_t i = 0; i < 2; ++i) {
    s.field_evals[i] = p.counters.calls[i] - eval0.calls[i];
    s.domain_violations[i] = p.counters.domain_violations[i] - eval0.domain_violations[i];
  }
  s.lu_factorizations = linalg_counters().factorizations - lin0.factorizations;
  s.linear_solves = linalg_counters().solves - lin0.solves;
}

}  // namespace

TrajectoryResult integrate(const PiecewiseProblem& p, const Vector& x0, const IntegratorConfig& cfg) {
  cfg.validate();
  p.validate();
  if (x0.size() != p.dim) {
    throw DimensionMismatch("integrate: x0 has " + std::to_string(x0.size()) + " entries, problem '" +
                            p.label + "' has dimension " + std::to_string(p.dim));
  }
  const double h_start = p.event(x0);
  if (!(std::abs(h_start) > cfg.sigma_tol)) {
    throw InvalidArgument("integrate: x0 lies on the switching surface (h = " +
                          std::to_string(h_start) + ")");
  }

  const EvalCounters eval0 = p.counters;
  const LinalgCounters lin0 = linalg_counters();
  const bool reduce_stage = cfg.guard_mode == GuardMode::Ros2Dense;

  TrajectoryResult out;
  out.mesh.push_back({cfg.t0, x0});
  FieldId active = h_start < 0.0 ? FieldId::One : FieldId::Two;
  Vector x = x0;
  double t = cfg.t0;
  // Mesh times are base + n * tau so that no rounding accumulates along the run.
  double base = cfg.t0;
  std::uint64_t n = 0;
  out.termination = Termination::ReachedTEnd;

  try {
    while (t < cfg.t_end) {
      if (out.stats.steps >= cfg.max_steps) {
        out.termination = Termination::MaxStepsReached;
        break;
      }
      double t_next = base + static_cast<double>(n + 1) * cfg.tau;
      double tau_step = cfg.tau;
      if (t_next >= cfg.t_end || cfg.t_end - t_next < 1e-9 * cfg.tau) {
        t_next = cfg.t_end;
        tau_step = cfg.t_end - t;
      }

      const FieldId a = active;
      const VectorFunction field = [&p, a](const Vector& u) { return eval_field(p, a, u); };
      const Matrix J = p.jacobian(a, x);

      RosenbrockStep step;
      std::optional<double> sigma_bar;
      if (cfg.method == Method::Ros1) {
        step = ros1_step(field, x, tau_step, J);
      } else {
        const Vector f0 = field(x);
        Ros2Stage1 stage = ros2_stage1(f0, x, tau_step, J);
        if (reduce_stage && a == FieldId::One && p.event(stage.internal_state()) > 0.0) {
          const Case1bOptions opts{cfg.h_tol, cfg.theta_tol, cfg.max_bisect};
          StepReduction red = resolve_case_1b(p, x, tau_step, J, f0, opts);
          step = std::move(red.step);
          sigma_bar = red.sigma_bar;
          t_next = t + red.sigma_bar;
          ++out.stats.reduced_steps;
        } else {
          step = ros2_complete(std::move(stage), field);
        }
      }
      step.field = a;
      const std::size_t step_index = out.stats.steps++;

      const double h1 = p.event(step.x1);
      const bool stays_inside = a == FieldId::One ? h1 < -cfg.sigma_tol : h1 > cfg.sigma_tol;
      if (stays_inside) {
        x = step.x1;
        t = t_next;
        if (sigma_bar) {
          base = t;
          n = 0;
        } else {
          ++n;
        }
        out.mesh.push_back({t, x});
        continue;
      }

      const bool near_negative = a == FieldId::One;

      if (!cfg.locate_events) {
        EventRecord ev;
        ev.step_index = step_index;
        ev.theta_star = 1.0;
        ev.t_star = t_next;
        ev.x_star = step.x1;
        ev.residual = std::abs(h1);
        ev.direction = near_negative ? Direction::R1toR2 : Direction::R2toR1;
        ev.converged = false;
        out.events.push_back(std::move(ev));
        x = step.x1;
        t = t_next;
        ++n;
        out.mesh.push_back({t, x});
        active = other(a);
        if (out.events.size() >= cfg.max_events) {
          out.termination = Termination::MaxEventsReached;
          break;
        }
        continue;
      }

      std::optional<GuardReport> guard;
      if (cfg.guard_mode != GuardMode::Off && a == FieldId::One) {
        try {
          guard = run_guard(p, step, cfg);
        } catch (const NotOrthogonal& e) {
          out.termination = Termination::GuardFailure;
          out.message = "step " + std::to_string(step_index) + ": " + e.what();
          break;
        }
        if (!guard->passed) {
          out.termination = Termination::GuardFailure;
          out.message = "step " + std::to_string(step_index) + " at t = " + std::to_string(t) +
                        ": guard '" + to_string(cfg.guard_mode) + "' failed";
          break;
        }
      }

      EventRecord ev;
      const bool in_band_near = near_negative ? h1 <= 0.0 : h1 >= 0.0;
      if (in_band_near) {
        ev.theta_star = 1.0;
        ev.x_star = step.x1;
        ev.residual = std::abs(h1);
        ev.direction = near_negative ? Direction::R1toR2 : Direction::R2toR1;
        ev.t_star = t_next;
      } else {
        ev = locate_from_side(step, p.h, cfg, near_negative, h1);
        ev.t_star = ev.theta_star == 1.0 ? t_next : t + ev.theta_star * step.tau;
      }
      ev.step_index = step_index;
      ev.guard = std::move(guard);
      ev.sigma_bar = sigma_bar;
      ev.classification = classify_surface(p, ev.x_star, cfg.classify_tol,
                                           std::max(cfg.sigma_tol, ev.residual));
      const SurfaceKind kind = ev.classification->kind;

      x = ev.x_star;
      if (ev.t_star > t) out.mesh.push_back({ev.t_star, x});
      t = ev.t_star;
      base = t;
      n = 0;
      out.events.push_back(std::move(ev));

      if (kind == SurfaceKind::SlidingAttractive || kind == SurfaceKind::SlidingRepulsive) {
        out.termination = Termination::SlidingEncountered;
        break;
      }
      if (kind == SurfaceKind::Tangential) {
        out.termination = Termination::TangentialContact;
        break;
      }
      active = other(a);
      if (out.events.size() >= cfg.max_events) {
        out.termination = Termination::MaxEventsReached;
        break;
      }
    }
  } catch (const SingularMatrix& e) {
    out.termination = Termination::SolverFailure;
    out.message = std::string("singular iteration matrix at t = ") + std::to_string(t) + ": " + e.what();
  } catch (const DomainViolation& e) {
    throw DomainViolation("step " + std::to_string(out.stats.steps) + " from t = " + std::to_string(t) +
                          " (field f" + std::to_string(index_of(active) + 1) + "): " + e.what());
  }

  out.final_field = active;
  fill_stats(out.stats, p, eval0, lin0);
  return out;
}

TrajectoryResult integrate_naive(const PiecewiseProblem& p, const Vector& x0, IntegratorConfig cfg) {
  cfg.locate_events = false;
  return integrate(p, x0, cfg);
}

}  // namespace nsode
