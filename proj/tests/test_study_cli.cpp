#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nsode/builtins.hpp"
#include "nsode/cli.hpp"
#include "nsode/csv.hpp"
#include "nsode/errors.hpp"
#include "nsode/events.hpp"
#include "nsode/study.hpp"
#include "support.hpp"

using namespace nsode;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nsode");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

PiecewiseProblem unit_drift() {
  PiecewiseProblem p;
  p.label = "unit_drift";
  p.dim = 1;
  p.fields[0] = [](const Vector&) { return Vector{1.0}; };
  p.fields[1] = p.fields[0];
  p.jacobians[0] = [](const Vector&) { return Matrix(1); };
  p.jacobians[1] = p.jacobians[0];
  p.h = [](const Vector& x) { return x[0] - 0.5; };
  return p;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nsode_test_" + name);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("reference event state") {
  const ReferenceState r = reference_event_state(unit_drift(), Vector{0.0}, 0.003, 1.0);
  CHECK(std::abs(r.t - 0.5) <= 1e-12);
  CHECK(std::abs(r.x[0] - 0.5) <= 1e-12);

  CHECK_THROWS_AS(reference_event_state(builtin("linear_test").piecewise(), Vector{1.0}, 0.01, 1.0),
                  NoEventBeforeHorizon);
  ReferenceConfig coarse;
  coarse.refinement = 8;
  CHECK_THROWS_AS(reference_event_state(unit_drift(), Vector{0.0}, 0.01, 1.0, coarse), InvalidArgument);
}

TEST_CASE("kowalczyk reference is stable under refinement doubling") {
  const BuiltinProblem b = builtin("kowalczyk", {{"eps", 1e-2}});
  const double tau_min = 1e-3 / 16.0;
  ReferenceConfig a;
  ReferenceConfig c;
  c.refinement = 2 * a.refinement;
  const ReferenceState ra = reference_event_state(b.piecewise(), b.default_x0, tau_min / a.refinement, 1.0, a);
  const ReferenceState rc = reference_event_state(b.piecewise(), b.default_x0, tau_min / c.refinement, 1.0, c);
  CHECK(norm2(ra.x - rc.x) < 1e-10);
  CHECK(std::abs(ra.t - rc.t) < 1e-10);
}

TEST_CASE("order study rows and their invariants") {
  const BuiltinProblem b = builtin("kowalczyk", {{"eps", 1e-2}});
  OrderStudyConfig cfg;
  cfg.tau0 = 1e-3;
  cfg.halvings = 4;
  cfg.eps = 1e-2;
  for (Method m : {Method::Ros1, Method::Ros2}) {
    cfg.method = m;
    const auto rows = run_order_study(b.piecewise(), b.default_x0, cfg);
    REQUIRE(rows.size() == 5);
    CHECK_FALSE(rows.front().reduction_factor.has_value());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      CHECK(rows[k].tau == std::ldexp(1e-3, -static_cast<int>(k)));
      CHECK(rows[k].eps == 1e-2);
      if (k == 0) continue;
      CHECK(*rows[k].reduction_factor == rows[k - 1].global_error / rows[k].global_error);
      CHECK(rows[k].global_error < rows[k - 1].global_error);
      const double f = *rows[k].reduction_factor;
      if (m == Method::Ros1) {
        CHECK(f >= 1.85);
        CHECK(f <= 2.15);
      } else {
        CHECK(f >= 3.4);
        CHECK(f <= 4.3);
      }
    }
  }

  cfg.halvings = 1;
  CHECK_THROWS_AS(run_order_study(b.piecewise(), b.default_x0, cfg), InvalidArgument);
  cfg.halvings = 3;
  cfg.tau0 = -1.0;
  CHECK_THROWS_AS(run_order_study(b.piecewise(), b.default_x0, cfg), InvalidArgument);
}

TEST_CASE("property: error decreases down every ladder") {
  struct Case {
    const char* name;
    double tau0;
    bool locate;
  };
  for (const Case c : {Case{"kowalczyk", 1e-3, true}, Case{"teixeira", 1e-3, true},
                       Case{"ostermann_modified", 1e-2, true}, Case{"tent", 0.5 / 10.01, false},
                       Case{"najafi", 0.0625, true}}) {
    const BuiltinProblem b = builtin(c.name);
    for (Method m : {Method::Ros1, Method::Ros2}) {
      OrderStudyConfig cfg;
      cfg.method = m;
      cfg.tau0 = c.tau0;
      cfg.halvings = 3;
      cfg.locate = c.locate;
      cfg.t_end = b.default_t_end;
      const auto rows = run_order_study(b.piecewise(), b.default_x0, cfg);
      for (std::size_t k = 1; k < rows.size(); ++k) {
        INFO(std::string(c.name) << " row " << k);
        CHECK(rows[k].global_error < rows[k - 1].global_error);
      }
    }
  }
}

TEST_CASE("naive tent study is first order") {
  const BuiltinProblem b = builtin("tent");
  OrderStudyConfig cfg;
  // The kink sits just past a coarse mesh point, so every halving moves the
  // first mesh point past it.
  cfg.tau0 = 0.5 / 10.01;
  cfg.halvings = 4;
  cfg.locate = false;
  const auto rows = run_order_study(b.piecewise(), b.default_x0, cfg);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(*rows[k].reduction_factor > 1.9);
  const double p = mean_observed_order(rows);
  CHECK(p >= 0.8);
  CHECK(p <= 1.3);
  CHECK_THROWS_AS(mean_observed_order({rows.front()}), InvalidArgument);
}

TEST_CASE("number formatting round-trips") {
  auto rng = testing::make_rng(61);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(testing::uniform(rng, -1.0, 1.0), static_cast<int>(testing::uniform(rng, -1070, 1020)));
    CHECK(csv::parse_double(csv::format_double(v)) == v);
  }
  CHECK(csv::parse_double(csv::format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
  CHECK_THROWS_AS(csv::parse_double("1.5x"), InvalidArgument);
  CHECK_THROWS_AS(csv::parse_double(""), InvalidArgument);
  CHECK(csv::split_line("a,,b") == std::vector<std::string>{"a", "", "b"});
}

TEST_CASE("order study CSV round-trip") {
  auto rng = testing::make_rng(62);
  std::vector<OrderStudyRow> rows;
  for (int k = 0; k < 6; ++k) {
    OrderStudyRow r{std::ldexp(1e-3, -k), 1e-2, testing::uniform(rng, 1e-12, 1e-3), std::nullopt};
    if (k > 0) r.reduction_factor = rows.back().global_error / r.global_error;
    rows.push_back(r);
  }
  std::stringstream ss;
  csv::write_order_study(ss, rows);
  CHECK(ss.str().rfind("tau,epsilon,global_error,reduction_factor\n", 0) == 0);
  CHECK(csv::read_order_study(ss) == rows);

  std::istringstream bad_header("tau,eps,global_error,reduction_factor\n1,2,3,\n");
  CHECK_THROWS_AS(csv::read_order_study(bad_header), InvalidArgument);
  std::istringstream short_row("tau,epsilon,global_error,reduction_factor\n1,2,3\n");
  CHECK_THROWS_AS(csv::read_order_study(short_row), InvalidArgument);
}

TEST_CASE("trajectory and events CSV round-trip") {
  const BuiltinProblem b = builtin("kowalczyk");
  IntegratorConfig cfg;
  cfg.tau = 1e-3;
  cfg.t_end = b.default_t_end;
  const TrajectoryResult r = integrate(b.piecewise(), b.default_x0, cfg);

  std::stringstream traj;
  csv::write_trajectory(traj, r.mesh);
  CHECK(traj.str().rfind("t,x0,x1\n", 0) == 0);
  const auto mesh = csv::read_trajectory(traj);
  REQUIRE(mesh.size() == r.mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    CHECK(mesh[i].t == r.mesh[i].t);
    CHECK(mesh[i].x == r.mesh[i].x);
  }

  std::stringstream ev;
  csv::write_events(ev, r.events, 2);
  CHECK(ev.str().rfind("index,t,theta,direction,residual,x0,x1\n", 0) == 0);
  CHECK(csv::read_events(ev) == csv::event_rows(r.events));

  std::istringstream bad("index,t,theta,direction,residual,x0\n0,1,0.5,sideways,0,1\n");
  CHECK_THROWS_AS(csv::read_events(bad), InvalidArgument);
}

TEST_CASE("guard columns appear only when a guard ran") {
  const BuiltinProblem b = builtin("najafi");
  IntegratorConfig cfg;
  cfg.tau = 0.07;
  cfg.t_end = 2.0;
  cfg.guard_mode = GuardMode::Ros2Dense;
  const TrajectoryResult r = integrate(b.piecewise(), b.default_x0, cfg);
  REQUIRE(r.events.size() == 1);
  REQUIRE(r.events.front().guard.has_value());

  std::stringstream ss;
  csv::write_events(ss, r.events, 2);
  CHECK(contains(ss.str(), ",guard_mode,guard_passed,certified_sigma,g0,g1,g2\n"));
  CHECK(contains(ss.str(), ",ros2-dense,true,"));
  const auto back = csv::read_events(ss);
  CHECK(back == csv::event_rows(r.events));
  CHECK(back.front().guard_coefficients.size() == 3);

  CHECK_THROWS_AS(csv::write_events(ss, r.events, 3), DimensionMismatch);
}

TEST_CASE("cli: usage errors exit with 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"integrate"}).code == 2);
  CHECK(run_cli({"integrate", "--problem", "nope"}).code == 2);
  CHECK(run_cli({"integrate", "--problem", "tent", "--method", "ros3"}).code == 2);
  CHECK(run_cli({"integrate", "--problem", "tent", "--tau", "-1"}).code == 2);
  CHECK(run_cli({"integrate", "--problem", "tent", "--guard", "ros1"}).code == 2);
  CHECK(run_cli({"integrate", "--problem", "tent", "--x0", "1,a"}).code == 2);
  CHECK(run_cli({"classify", "--problem", "ostermann_modified", "--state", "1,2,3"}).code == 2);
  CHECK(run_cli({"order-study", "--problem", "kowalczyk", "--halvings", "1"}).code == 2);
  const CliRun r = run_cli({"bogus-command"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(contains(run_cli({"integrate", "--problem", "tent", "--theta", "0.2"}).err, "theta"));
}

TEST_CASE("cli: list-problems") {
  const CliRun r = run_cli({"list-problems"});
  CHECK(r.code == 0);
  for (const auto& info : builtin_catalog()) CHECK(contains(r.out, info.name + ":"));
}

TEST_CASE("cli: classify the ostermann example") {
  const CliRun r = run_cli({"classify", "--problem", "ostermann_modified", "--eps", "1e-3", "--state", "0,-1,2"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "A: 4\n"));
  CHECK(contains(r.out, "B: 0\n"));
  CHECK(contains(r.out, "Csq: 0\n"));
  // Discriminant exactly 0 with B = 0: the sufficient condition is silent here.
  CHECK(contains(r.out, "crossing_sufficient: false\n"));
  CHECK(contains(r.out, "classification: crossing\n"));
}

TEST_CASE("cli: guarded najafi run reports no violations") {
  const CliRun r = run_cli({"integrate", "--problem", "najafi", "--guard", "ros2-dense", "--tau", "0.125", "--t-end", "2"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "f1_domain_violations: 0\n"));
  CHECK(contains(r.out, "termination: reached-t-end\n"));

  const CliRun bare = run_cli({"integrate", "--problem", "najafi", "--tau", "0.3", "--t-end", "2"});
  CHECK(bare.code == 1);
  CHECK(contains(bare.err, "numerical failure"));
}

TEST_CASE("cli: integrate writes readable CSV") {
  const auto traj = scratch("traj.csv");
  const auto events = scratch("events.csv");
  const CliRun r = run_cli({"integrate", "--problem", "kowalczyk", "--tau", "1e-3", "--out", traj.string(),
                            "--events", events.string()});
  CHECK(r.code == 0);
  std::ifstream tf(traj);
  CHECK(csv::read_trajectory(tf).size() > 1000);
  std::ifstream ef(events);
  CHECK(csv::read_events(ef).size() >= 4);
  std::filesystem::remove(traj);
  std::filesystem::remove(events);

  CHECK(run_cli({"integrate", "--problem", "tent", "--out", "/nonexistent-dir/x.csv"}).code == 2);
}

TEST_CASE("cli: order-study output is deterministic") {
  const std::vector<std::string> args = {"order-study", "--problem", "kowalczyk", "--method", "ros2",
                                         "--eps",       "1e-2",      "--tau0",    "1e-3",    "--halvings", "4"};
  const CliRun a = run_cli(args);
  const CliRun b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream in(a.out);
  const auto rows = csv::read_order_study(in);
  CHECK(rows.size() == 5);

  const auto path = scratch("study.csv");
  std::vector<std::string> to_file = args;
  to_file.push_back("--out");
  to_file.push_back(path.string());
  const CliRun c = run_cli(to_file);
  CHECK(c.code == 0);
  CHECK(slurp(path) == a.out);
  CHECK(contains(c.out, "mean_observed_order: "));
  std::filesystem::remove(path);
}

TEST_CASE("cli: guard-check") {
  const CliRun a = run_cli({"guard-check", "--problem", "najafi", "--state", "1,0.9", "--tau", "0.3"});
  CHECK(a.code == 0);
  CHECK(contains(a.out, "stage_case: case-1b\n"));
  CHECK(contains(a.out, "passed: true\n"));

  const CliRun b = run_cli({"guard-check", "--problem", "najafi", "--state", "1,0.5", "--tau", "0.1",
                            "--mode", "ros1"});
  CHECK(b.code == 0);
  CHECK(contains(b.out, "a0: 1\n"));

  CHECK(run_cli({"guard-check", "--problem", "najafi", "--state", "1,1.5"}).code == 2);
}
