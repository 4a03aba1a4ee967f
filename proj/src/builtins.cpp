#include "nsode/builtins.hpp"

#include <cmath>
#include <utility>

#include "nsode/errors.hpp"

namespace nsode {

std::shared_ptr<const SppProblem> BuiltinProblem::spp() const {
  if (const auto* p = std::get_if<std::shared_ptr<const SppProblem>>(&problem)) return *p;
  return nullptr;
}

PiecewiseProblem BuiltinProblem::piecewise() const {
  if (const auto* p = std::get_if<PiecewiseProblem>(&problem)) return *p;
  return spp_flatten(std::get<std::shared_ptr<const SppProblem>>(problem));
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"najafi", "x' = x*sqrt(1-t) for t <= 1, x' = 0 after; state (x, t), h = t - 1", {}},
      {"kowalczyk",
       "x' = -sign(theta*x + (1-theta)*y), eps*y' = x - y; h = theta*x + (1-theta)*y",
       {{"theta", -0.9}, {"eps", 1e-2}}},
      {"teixeira", "y1' = -sign(2z - y1), y2' = -y1 - y2, eps*z' = y1 - z; h = 2z - y1",
       {{"eps", 1e-2}}},
      {"ostermann_modified", "y1' = z, y2' = -sign(y1)*y1, eps*z' = y2 - z - eps*y1; h = y1",
       {{"eps", 1e-3}}},
      {"linear_test", "x' = lambda*x, h = -1 (smooth control, no events)", {{"lambda", -1.0}}},
      {"tent", "x' = 1 for t < 0.5, x' = -1 after; state (x, t), h = t - 0.5", {}},
  };
  return catalog;
}

namespace {

const BuiltinInfo& lookup(const std::string& name) {
  for (const auto& info : builtin_catalog())
    if (info.name == name) return info;
  throw InvalidArgument("unknown problem '" + name + "'");
}

ParamMap resolve_params(const BuiltinInfo& info, const ParamMap& given) {
  ParamMap out;
  for (const auto& p : info.params) out[p.name] = p.default_value;
  for (const auto& [key, value] : given) {
    if (!out.contains(key)) {
      throw InvalidArgument("problem '" + info.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw InvalidArgument("parameter '" + key + "' is not finite");
    out[key] = value;
  }
  if (out.contains("eps") && !(out["eps"] > 0.0)) {
    throw InvalidArgument("problem '" + info.name + "': eps must be positive");
  }
  return out;
}

BuiltinProblem make_najafi() {
  PiecewiseProblem p;
  p.label = "najafi";
  p.dim = 2;
  p.fields[0] = [](const Vector& u) { return Vector{u[0] * std::sqrt(1.0 - u[1]), 1.0}; };
  p.fields[1] = [](const Vector&) { return Vector{0.0, 1.0}; };
  p.jacobians[0] = [](const Vector& u) {
    const double s = std::sqrt(1.0 - u[1]);
    return Matrix{{s, -u[0] / (2.0 * s)}, {0.0, 0.0}};
  };
  p.jacobians[1] = [](const Vector&) { return Matrix(2); };
  p.domains[0] = [](const Vector& u) { return u[1] <= 1.0; };
  p.h = [](const Vector& u) { return u[1] - 1.0; };
  p.grad_h = [](const Vector&) { return Vector{0.0, 1.0}; };
  p.hess_h = [](const Vector&) { return Matrix(2); };
  return {"najafi", std::move(p), Vector{1.0, 0.0}, 2.0};
}

BuiltinProblem make_tent() {
  PiecewiseProblem p;
  p.label = "tent";
  p.dim = 2;
  p.fields[0] = [](const Vector&) { return Vector{1.0, 1.0}; };
  p.fields[1] = [](const Vector&) { return Vector{-1.0, 1.0}; };
  p.jacobians[0] = [](const Vector&) { return Matrix(2); };
  p.jacobians[1] = [](const Vector&) { return Matrix(2); };
  p.h = [](const Vector& u) { return u[1] - 0.5; };
  p.grad_h = [](const Vector&) { return Vector{0.0, 1.0}; };
  p.hess_h = [](const Vector&) { return Matrix(2); };
  return {"tent", std::move(p), Vector{0.0, 0.0}, 1.0};
}

BuiltinProblem make_linear_test(double lambda) {
  PiecewiseProblem p;
  p.label = "linear_test";
  p.dim = 1;
  for (std::size_t k = 0; k < 2; ++k) {
    p.fields[k] = [lambda](const Vector& x) { return Vector{lambda * x[0]}; };
    p.jacobians[k] = [lambda](const Vector&) { return Matrix{{lambda}}; };
  }
  p.h = [](const Vector&) { return -1.0; };
  p.grad_h = [](const Vector&) { return Vector{0.0}; };
  p.hess_h = [](const Vector&) { return Matrix(1); };
  return {"linear_test", std::move(p), Vector{1.0}, 1.0};
}

// Slow x, fast y.
BuiltinProblem make_kowalczyk(double theta, double eps) {
  SppProblem p;
  p.label = "kowalczyk";
  p.slow_dim = 1;
  p.fast_dim = 1;
  p.eps = eps;
  // -sign(h): +1 below the surface, -1 above.
  p.slow_fields[0] = [](const Vector&, const Vector&) { return Vector{1.0}; };
  p.slow_fields[1] = [](const Vector&, const Vector&) { return Vector{-1.0}; };
  p.fast_field = [](const Vector& y, const Vector& z) { return Vector{y[0] - z[0]}; };
  p.h = [theta](const Vector& y, const Vector& z) { return theta * y[0] + (1.0 - theta) * z[0]; };
  p.grad_h = [theta](const Vector&) { return Vector{theta, 1.0 - theta}; };
  p.hess_h = [](const Vector&) { return Matrix(2); };
  p.slow_jacobians[0] = [](const Vector&) { return Matrix(1, 2); };
  p.slow_jacobians[1] = [](const Vector&) { return Matrix(1, 2); };
  p.fast_jacobian = [](const Vector&) { return Matrix{{1.0, -1.0}}; };
  // Long enough to settle onto the switching orbit around x = 0, reached near t = 1.
  return {"kowalczyk", std::make_shared<const SppProblem>(std::move(p)), Vector{1.0, 0.0}, 1.5};
}

// Slow (y1, y2), fast z.
BuiltinProblem make_teixeira(double eps) {
  SppProblem p;
  p.label = "teixeira";
  p.slow_dim = 2;
  p.fast_dim = 1;
  p.eps = eps;
  p.slow_fields[0] = [](const Vector& y, const Vector&) { return Vector{1.0, -y[0] - y[1]}; };
  p.slow_fields[1] = [](const Vector& y, const Vector&) { return Vector{-1.0, -y[0] - y[1]}; };
  p.fast_field = [](const Vector& y, const Vector& z) { return Vector{y[0] - z[0]}; };
  p.h = [](const Vector& y, const Vector& z) { return 2.0 * z[0] - y[0]; };
  p.grad_h = [](const Vector&) { return Vector{-1.0, 0.0, 2.0}; };
  p.hess_h = [](const Vector&) { return Matrix(3); };
  for (std::size_t k = 0; k < 2; ++k) {
    p.slow_jacobians[k] = [](const Vector&) { return Matrix{{0.0, 0.0, 0.0}, {-1.0, -1.0, 0.0}}; };
  }
  p.fast_jacobian = [](const Vector&) { return Matrix{{1.0, 0.0, -1.0}}; };
  return {"teixeira", std::make_shared<const SppProblem>(std::move(p)), Vector{1.0, 0.0, 0.0},
          40.0 * eps};
}

// Slow (y1, y2), fast z.
BuiltinProblem make_ostermann_modified(double eps) {
  SppProblem p;
  p.label = "ostermann_modified";
  p.slow_dim = 2;
  p.fast_dim = 1;
  p.eps = eps;
  // -sign(y1) * y1 is y1 below the surface and -y1 above it.
  p.slow_fields[0] = [](const Vector& y, const Vector& z) { return Vector{z[0], y[0]}; };
  p.slow_fields[1] = [](const Vector& y, const Vector& z) { return Vector{z[0], -y[0]}; };
  p.fast_field = [eps](const Vector& y, const Vector& z) {
    return Vector{y[1] - z[0] - eps * y[0]};
  };
  p.h = [](const Vector& y, const Vector&) { return y[0]; };
  p.grad_h = [](const Vector&) { return Vector{1.0, 0.0, 0.0}; };
  p.hess_h = [](const Vector&) { return Matrix(3); };
  p.slow_jacobians[0] = [](const Vector&) { return Matrix{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}; };
  p.slow_jacobians[1] = [](const Vector&) { return Matrix{{0.0, 0.0, 1.0}, {-1.0, 0.0, 0.0}}; };
  p.fast_jacobian = [eps](const Vector&) { return Matrix{{-eps, 1.0, -1.0}}; };
  return {"ostermann_modified", std::make_shared<const SppProblem>(std::move(p)),
          Vector{1.0, -1.0, 0.0}, 3.0};
}

}  // namespace

BuiltinProblem builtin(const std::string& name, const ParamMap& params) {
  const BuiltinInfo& info = lookup(name);
  const ParamMap p = resolve_params(info, params);
  if (name == "najafi") return make_najafi();
  if (name == "tent") return make_tent();
  if (name == "linear_test") return make_linear_test(p.at("lambda"));
  if (name == "kowalczyk") return make_kowalczyk(p.at("theta"), p.at("eps"));
  if (name == "teixeira") return make_teixeira(p.at("eps"));
  return make_ostermann_modified(p.at("eps"));
}

}  // namespace nsode
