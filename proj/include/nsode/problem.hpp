#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "nsode/linalg.hpp"

namespace nsode {

/// Which side of the switching surface a field belongs to: One on R1 = {h < 0},
/// Two on R2 = {h > 0}.
enum class FieldId { One = 1, Two = 2 };

constexpr std::size_t index_of(FieldId id) noexcept { return id == FieldId::One ? 0 : 1; }
constexpr FieldId other(FieldId id) noexcept {
  return id == FieldId::One ? FieldId::Two : FieldId::One;
}

enum class Region { InR1, InR2, OnSigma };

/// Width of the band |h| <= tol treated as lying on the switching surface.
inline constexpr double kSigmaTol = 1e-12;

using MatrixFunction = std::function<Matrix(const Vector&)>;

struct EvalCounters {
  std::array<std::uint64_t, 2> calls{};
  std::array<std::uint64_t, 2> domain_violations{};

  std::uint64_t total_calls() const noexcept { return calls[0] + calls[1]; }
};

struct SppProblem;

/// x' = f1(x) on R1, f2(x) on R2, with the surface given by the zero set of h.
///
/// Optional members (empty std::function) fall back to finite differences.
/// A domain predicate, when present, must hold at least on the closure of its
/// field's region; evaluating a field outside it raises DomainViolation.
///
/// Evaluation counters are mutable state. Concurrent integrations must use
/// distinct problem instances.
struct PiecewiseProblem {
  std::string label;
  std::size_t dim = 0;
  std::array<VectorFunction, 2> fields;
  std::array<MatrixFunction, 2> jacobians;
  std::array<DomainPredicate, 2> domains;
  ScalarFunction h;
  VectorFunction grad_h;
  MatrixFunction hess_h;
  /// Set when this problem is the flattened form of a singularly perturbed one.
  std::shared_ptr<const SppProblem> spp;

  mutable EvalCounters counters;

  bool in_domain(FieldId which, const Vector& x) const;
  double event(const Vector& x) const { return h(x); }
  Vector event_gradient(const Vector& x) const;
  Matrix event_hessian(const Vector& x) const;
  /// Analytic Jacobian when available, otherwise finite differences that
  /// respect the field's domain.
  Matrix jacobian(FieldId which, const Vector& x) const;
  /// Throws InvalidArgument when a mandatory member is missing.
  void validate() const;
};

Region region_of(const PiecewiseProblem& p, const Vector& x, double sigma_tol = kSigmaTol);

/// Evaluates f_which at x, counting the call. Raises DomainViolation (and
/// counts it) when the field's domain excludes x, NonFiniteValue when the
/// field returns NaN or infinity.
Vector eval_field(const PiecewiseProblem& p, FieldId which, const Vector& x);

using SlowFastField = std::function<Vector(const Vector& y, const Vector& z)>;
using SlowFastScalar = std::function<double(const Vector& y, const Vector& z)>;
/// Derivatives taken with respect to the stacked state u = (y, z).
using StackedMatrixFunction = std::function<Matrix(const Vector& u)>;

/// y' = f_i(y, z) (switching on the sign of h), eps * z' = g(y, z).
struct SppProblem {
  std::string label;
  std::size_t slow_dim = 0;
  std::size_t fast_dim = 0;
  std::array<SlowFastField, 2> slow_fields;
  SlowFastField fast_field;
  double eps = 0.0;
  SlowFastScalar h;
  /// Gradient of h on the stacked state, ordered (h_y, h_z).
  std::function<Vector(const Vector& u)> grad_h;
  StackedMatrixFunction hess_h;
  /// slow_dim x (slow_dim + fast_dim) Jacobians of f1, f2.
  std::array<StackedMatrixFunction, 2> slow_jacobians;
  /// fast_dim x (slow_dim + fast_dim) Jacobian of g.
  StackedMatrixFunction fast_jacobian;

  std::size_t dim() const noexcept { return slow_dim + fast_dim; }
  Vector stack(const Vector& y, const Vector& z) const;
  Vector slow_part(const Vector& u) const { return u.slice(0, slow_dim); }
  Vector fast_part(const Vector& u) const { return u.slice(slow_dim, fast_dim); }

  double event(const Vector& y, const Vector& z) const { return h(y, z); }
  Vector event_gradient(const Vector& u) const;
  Vector h_y(const Vector& y, const Vector& z) const;
  Vector h_z(const Vector& y, const Vector& z) const;
  void validate() const;
};

/// Stacks u = (y, z) with F_i(u) = [f_i(y, z); g(y, z) / eps].
PiecewiseProblem spp_flatten(std::shared_ptr<const SppProblem> p);
PiecewiseProblem spp_flatten(const SppProblem& p);

/// Residual bound for the slow-manifold map in reduced_order_model.
inline constexpr double kReductionResidualTol = 1e-8;

/// ||g(y, g0(y))||_inf at y; ResidualTooLarge above kReductionResidualTol.
void check_reduction(const SppProblem& p, const VectorFunction& g0, const Vector& y);

/// The eps = 0 limit y' = f_i(y, g0(y)) switching on h(y, g0(y)). Every field
/// evaluation re-checks the residual of g0.
PiecewiseProblem reduced_order_model(std::shared_ptr<const SppProblem> p, VectorFunction g0);

}  // namespace nsode
