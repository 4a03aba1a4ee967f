#include "nsode/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nsode/builtins.hpp"
#include "nsode/csv.hpp"
#include "nsode/errors.hpp"
#include "nsode/events.hpp"
#include "nsode/filippov.hpp"
#include "nsode/one_sided.hpp"
#include "nsode/study.hpp"

namespace nsode {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

/// Thrown for bad flag values found after CLI11 has accepted the command line.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct ProblemFlags {
  std::string name;
  std::optional<double> theta;
  std::optional<double> eps;
  std::optional<double> lambda;

  void attach(CLI::App* cmd) {
    cmd->add_option("--problem", name, "builtin problem name (see list-problems)")->required();
    cmd->add_option("--theta", theta, "kowalczyk surface parameter");
    cmd->add_option("--eps", eps, "singular perturbation parameter");
    cmd->add_option("--lambda", lambda, "linear_test rate");
  }

  BuiltinProblem build() const {
    ParamMap params;
    if (theta) params["theta"] = *theta;
    if (eps) params["eps"] = *eps;
    if (lambda) params["lambda"] = *lambda;
    try {
      return builtin(name, params);
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("--problem: ") + e.what());
    }
  }
};

Vector parse_state(const std::string& text, const char* flag) {
  std::vector<double> v;
  try {
    for (const auto& field : csv::split_line(text)) v.push_back(csv::parse_double(field));
    return Vector(std::move(v));
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

Method parse_method(const std::string& s) { return s == "ros1" ? Method::Ros1 : Method::Ros2; }

GuardMode parse_guard(const std::string& s) {
  if (s == "ros1") return GuardMode::Ros1General;
  if (s == "ros1-orth") return GuardMode::Ros1Orthogonal;
  if (s == "ros2-dense") return GuardMode::Ros2Dense;
  return GuardMode::Off;
}

std::ofstream open_output(const std::string& path, const char* flag) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError(std::string(flag) + ": cannot open '" + path + "' for writing");
  return f;
}

double problem_eps(const BuiltinProblem& b) {
  const auto spp = b.spp();
  return spp ? spp->eps : 0.0;
}

void print_stats(std::ostream& out, const TrajectoryResult& r) {
  out << "termination: " << to_string(r.termination) << '\n';
  if (!r.message.empty()) out << "message: " << r.message << '\n';
  out << "t_final: " << csv::format_double(r.final_point().t) << '\n';
  out << "steps: " << r.stats.steps << '\n';
  out << "reduced_steps: " << r.stats.reduced_steps << '\n';
  out << "events: " << r.events.size() << '\n';
  out << "f1_evaluations: " << r.stats.field_evals[0] << '\n';
  out << "f2_evaluations: " << r.stats.field_evals[1] << '\n';
  out << "f1_domain_violations: " << r.stats.domain_violations[0] << '\n';
  out << "f2_domain_violations: " << r.stats.domain_violations[1] << '\n';
  out << "lu_factorizations: " << r.stats.lu_factorizations << '\n';
  out << "linear_solves: " << r.stats.linear_solves << '\n';
}

void print_report(std::ostream& out, const GuardReport& g) {
  out << "mode: " << to_string(g.mode) << '\n';
  for (const auto& [name, value] : g.coefficients) out << name << ": " << csv::format_double(value) << '\n';
  out << "passed: " << (g.passed ? "true" : "false") << '\n';
  out << "certified_sigma: " << csv::format_double(g.certified_sigma) << '\n';
  out << "neumann_ok: " << (g.neumann_ok ? "true" : "false") << '\n';
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rosenbrock integration of piecewise smooth ODEs with event location"};
  app.require_subcommand(1);

  const std::vector<std::string> methods{"ros1", "ros2"};
  const std::vector<std::string> switches{"on", "off"};

  // integrate
  ProblemFlags ip;
  double i_tau = 1e-3;
  std::optional<double> i_t_end;
  std::string i_method = "ros2";
  std::string i_guard = "off";
  std::string i_locate = "on";
  std::string i_root = "bisection";
  std::optional<std::string> i_x0;
  std::size_t i_max_events = 1000;
  std::string i_out;
  std::string i_events;
  auto* integ = app.add_subcommand("integrate", "integrate a builtin problem and write CSV output");
  ip.attach(integ);
  integ->add_option("--tau", i_tau, "fixed step size")->check(CLI::PositiveNumber);
  integ->add_option("--t-end", i_t_end, "horizon (default: the problem's)");
  integ->add_option("--method", i_method)->check(CLI::IsMember(methods));
  integ->add_option("--guard", i_guard)->check(CLI::IsMember({"off", "ros1", "ros1-orth", "ros2-dense"}));
  integ->add_option("--locate", i_locate)->check(CLI::IsMember(switches));
  integ->add_option("--root-finder", i_root)->check(CLI::IsMember({"bisection", "secant"}));
  integ->add_option("--x0", i_x0, "initial state, comma separated");
  integ->add_option("--max-events", i_max_events)->check(CLI::PositiveNumber);
  integ->add_option("--out", i_out, "trajectory CSV path");
  integ->add_option("--events", i_events, "events CSV path");

  // order-study
  ProblemFlags sp;
  std::string s_method = "ros2";
  double s_tau0 = 1e-3;
  int s_halvings = 4;
  std::string s_locate = "on";
  std::optional<double> s_t_end;
  int s_refinement = 64;
  std::string s_out;
  auto* study = app.add_subcommand("order-study", "global error and reduction factors under step halving");
  sp.attach(study);
  study->add_option("--method", s_method)->check(CLI::IsMember(methods));
  study->add_option("--tau0", s_tau0, "coarsest step")->check(CLI::PositiveNumber);
  study->add_option("--halvings", s_halvings)->check(CLI::Range(2, 30));
  study->add_option("--locate", s_locate)->check(CLI::IsMember(switches));
  study->add_option("--t-end", s_t_end, "horizon for the first event");
  study->add_option("--refinement", s_refinement, "reference step divisor")->check(CLI::Range(16, 1 << 20));
  study->add_option("--out", s_out, "CSV path (default: stdout)");

  // classify
  ProblemFlags cp;
  std::string c_state;
  double c_tol = kClassifyTol;
  auto* classify = app.add_subcommand("classify", "classify a state on the switching surface");
  cp.attach(classify);
  classify->add_option("--state", c_state, "state on the surface, comma separated")->required();
  classify->add_option("--tol", c_tol)->check(CLI::PositiveNumber);

  // guard-check
  ProblemFlags gp;
  std::string g_state;
  double g_tau = 1e-3;
  std::string g_mode = "ros2-dense";
  std::size_t g_grid = kDefaultGuardGrid;
  auto* guard = app.add_subcommand("guard-check", "evaluate a one-sidedness guard at a state");
  gp.attach(guard);
  guard->add_option("--state", g_state, "state in R1, comma separated")->required();
  guard->add_option("--tau", g_tau)->check(CLI::PositiveNumber);
  guard->add_option("--mode", g_mode)->check(CLI::IsMember({"ros1", "ros1-orth", "ros2-dense"}));
  guard->add_option("--grid", g_grid)->check(CLI::Range(2, 1 << 20));

  auto* list = app.add_subcommand("list-problems", "list builtin problems and parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*list) {
      for (const auto& info : builtin_catalog()) {
        out << info.name << ": " << info.description << '\n';
        for (const auto& p : info.params) {
          out << "  --" << p.name << " (default " << csv::format_double(p.default_value) << ")\n";
        }
      }
      return kExitOk;
    }

    if (*integ) {
      const BuiltinProblem b = ip.build();
      const PiecewiseProblem p = b.piecewise();
      const Vector x0 = i_x0 ? parse_state(*i_x0, "--x0") : b.default_x0;
      if (x0.size() != p.dim) throw UsageError("--x0: expected " + std::to_string(p.dim) + " entries");
      IntegratorConfig cfg;
      cfg.method = parse_method(i_method);
      cfg.tau = i_tau;
      cfg.t_end = i_t_end.value_or(b.default_t_end);
      cfg.guard_mode = parse_guard(i_guard);
      cfg.locate_events = i_locate == "on";
      cfg.root_finder = i_root == "secant" ? RootFinder::Secant : RootFinder::Bisection;
      cfg.max_events = i_max_events;
      try {
        cfg.validate();
      } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
      }
      const TrajectoryResult r = integrate(p, x0, cfg);
      if (!i_out.empty()) {
        auto f = open_output(i_out, "--out");
        csv::write_trajectory(f, r.mesh);
      }
      if (!i_events.empty()) {
        auto f = open_output(i_events, "--events");
        csv::write_events(f, r.events, p.dim);
      }
      print_stats(out, r);
      const bool failed = r.termination == Termination::GuardFailure ||
                          r.termination == Termination::SolverFailure ||
                          r.termination == Termination::MaxStepsReached;
      return failed ? kExitNumerical : kExitOk;
    }

    if (*study) {
      const BuiltinProblem b = sp.build();
      OrderStudyConfig cfg;
      cfg.method = parse_method(s_method);
      cfg.tau0 = s_tau0;
      cfg.halvings = s_halvings;
      cfg.locate = s_locate == "on";
      cfg.t_end = s_t_end.value_or(b.default_t_end);
      cfg.eps = problem_eps(b);
      cfg.reference.refinement = s_refinement;
      const auto rows = run_order_study(b.piecewise(), b.default_x0, cfg);
      if (s_out.empty()) {
        csv::write_order_study(out, rows);
      } else {
        auto f = open_output(s_out, "--out");
        csv::write_order_study(f, rows);
        out << "mean_observed_order: " << csv::format_double(mean_observed_order(rows)) << '\n';
      }
      return kExitOk;
    }

    if (*classify) {
      const BuiltinProblem b = cp.build();
      const PiecewiseProblem p = b.piecewise();
      const Vector u = parse_state(c_state, "--state");
      if (u.size() != p.dim) throw UsageError("--state: expected " + std::to_string(p.dim) + " entries");
      if (!(std::abs(p.event(u)) <= kSigmaTol)) {
        throw UsageError("--state: not on the switching surface (h = " + csv::format_double(p.event(u)) + ")");
      }
      if (const auto spp = b.spp()) {
        const FilippovCoeffs c = filippov_coeffs(*spp, spp->slow_part(u), spp->fast_part(u));
        out << "A: " << csv::format_double(c.A) << '\n';
        out << "B: " << csv::format_double(c.B) << '\n';
        out << "Csq: " << csv::format_double(c.Csq) << '\n';
        out << "eps: " << csv::format_double(spp->eps) << '\n';
        out << "quadratic: " << csv::format_double(c.quadratic(spp->eps)) << '\n';
        const auto eps2 = sliding_sufficient(c);
        out << "sliding_sufficient: " << (eps2 ? "eps > " + csv::format_double(*eps2) : "none") << '\n';
        out << "crossing_sufficient: " << (crossing_sufficient(c) ? "true" : "false") << '\n';
      }
      const SurfaceClassification s = classify_surface(p, u, c_tol);
      out << "normal_products: " << csv::format_double(s.normal_products.first) << ','
          << csv::format_double(s.normal_products.second) << '\n';
      out << "classification: " << to_string(s.kind) << '\n';
      return kExitOk;
    }

    if (*guard) {
      const BuiltinProblem b = gp.build();
      const PiecewiseProblem p = b.piecewise();
      const Vector x = parse_state(g_state, "--state");
      if (x.size() != p.dim) throw UsageError("--state: expected " + std::to_string(p.dim) + " entries");
      if (!(p.event(x) < -kSigmaTol)) throw UsageError("--state: must lie in R1 (h < 0)");
      const GuardMode mode = parse_guard(g_mode);
      GuardReport report;
      if (mode == GuardMode::Ros2Dense) {
        const Matrix J = p.jacobian(FieldId::One, x);
        const Ros2Stage1 stage = ros2_stage1(eval_field(p, FieldId::One, x), x, g_tau, J);
        if (p.event(stage.internal_state()) > 0.0) {
          out << "stage_case: " << to_string(StageCase::Case1b) << '\n';
          const StepReduction red = resolve_case_1b(p, x, g_tau);
          out << "sigma_bar: " << csv::format_double(red.sigma_bar) << '\n';
          report = guard_ros2_dense(p, red.step, g_grid);
        } else {
          const RosenbrockStep step = ros2_complete(stage, [&p](const Vector& v) {
            return eval_field(p, FieldId::One, v);
          });
          out << "stage_case: " << to_string(classify_stage(p, step)) << '\n';
          report = guard_ros2_dense(p, step, g_grid);
        }
      } else if (mode == GuardMode::Ros1General) {
        report = guard_ros1_general(p, x, g_tau, 1.0);
      } else {
        report = guard_ros1_orthogonal(p, x, g_tau, 1.0);
      }
      print_report(out, report);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace nsode
