#include "nsode/problem.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nsode/errors.hpp"

namespace nsode {

// ---------------------------------------------------------------------------
// PiecewiseProblem

bool PiecewiseProblem::in_domain(FieldId which, const Vector& x) const {
  const auto& d = domains[index_of(which)];
  return !d || d(x);
}

Vector PiecewiseProblem::event_gradient(const Vector& x) const {
  if (grad_h) return grad_h(x);
  return fd_gradient(h, x);
}

Matrix PiecewiseProblem::event_hessian(const Vector& x) const {
  if (hess_h) return hess_h(x);
  return fd_hessian(h, x);
}

Matrix PiecewiseProblem::jacobian(FieldId which, const Vector& x) const {
  if (const auto& jac = jacobians[index_of(which)]) return jac(x);
  return fd_jacobian([&](const Vector& y) { return eval_field(*this, which, y); }, x,
                     domains[index_of(which)]);
}

void PiecewiseProblem::validate() const {
  if (dim == 0) throw InvalidArgument(label + ": dimension must be positive");
  if (!fields[0] || !fields[1]) throw InvalidArgument(label + ": both vector fields are required");
  if (!h) throw InvalidArgument(label + ": event function is required");
}

Region region_of(const PiecewiseProblem& p, const Vector& x, double sigma_tol) {
  const double hx = p.event(x);
  if (std::abs(hx) <= sigma_tol) return Region::OnSigma;
  return hx < 0.0 ? Region::InR1 : Region::InR2;
}

Vector eval_field(const PiecewiseProblem& p, FieldId which, const Vector& x) {
  const std::size_t k = index_of(which);
  if (!p.in_domain(which, x)) {
    ++p.counters.domain_violations[k];
    throw DomainViolation(p.label + ": field " + std::to_string(k + 1) +
                          " evaluated outside its domain");
  }
  ++p.counters.calls[k];
  Vector v = p.fields[k](x);
  if (!all_finite(v.values())) {
    throw NonFiniteValue(p.label + ": field " + std::to_string(k + 1) + " returned a non-finite value");
  }
  return v;
}

// ---------------------------------------------------------------------------
// SppProblem

Vector SppProblem::stack(const Vector& y, const Vector& z) const {
  if (y.size() != slow_dim || z.size() != fast_dim) {
    throw DimensionMismatch(label + ": slow/fast state sizes do not match the problem");
  }
  return y.concat(z);
}

Vector SppProblem::event_gradient(const Vector& u) const {
  if (grad_h) return grad_h(u);
  return fd_gradient([this](const Vector& v) { return h(slow_part(v), fast_part(v)); }, u);
}

Vector SppProblem::h_y(const Vector& y, const Vector& z) const {
  return event_gradient(stack(y, z)).slice(0, slow_dim);
}

Vector SppProblem::h_z(const Vector& y, const Vector& z) const {
  return event_gradient(stack(y, z)).slice(slow_dim, fast_dim);
}

void SppProblem::validate() const {
  if (slow_dim == 0 || fast_dim == 0) throw InvalidArgument(label + ": empty slow or fast block");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument(label + ": eps must be a positive finite number");
  }
  if (!slow_fields[0] || !slow_fields[1] || !fast_field || !h) {
    throw InvalidArgument(label + ": f1, f2, g and h are all required");
  }
}

PiecewiseProblem spp_flatten(std::shared_ptr<const SppProblem> p) {
  p->validate();
  PiecewiseProblem out;
  out.label = p->label;
  out.dim = p->dim();
  const SppProblem* sp = p.get();

  for (std::size_t k = 0; k < 2; ++k) {
    out.fields[k] = [sp, k](const Vector& u) {
      const Vector y = sp->slow_part(u);
      const Vector z = sp->fast_part(u);
      Vector fast = sp->fast_field(y, z);
      for (std::size_t i = 0; i < fast.size(); ++i) fast[i] /= sp->eps;
      return sp->slow_fields[k](y, z).concat(fast);
    };
    if (sp->slow_jacobians[k] && sp->fast_jacobian) {
      out.jacobians[k] = [sp, k](const Vector& u) {
        Matrix j(sp->dim());
        j.set_block(0, 0, sp->slow_jacobians[k](u));
        Matrix g = sp->fast_jacobian(u);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) g(r, c) /= sp->eps;
        j.set_block(sp->slow_dim, 0, g);
        return j;
      };
    }
  }
  out.h = [sp](const Vector& u) { return sp->h(sp->slow_part(u), sp->fast_part(u)); };
  if (sp->grad_h) out.grad_h = sp->grad_h;
  if (sp->hess_h) out.hess_h = sp->hess_h;
  out.spp = std::move(p);
  return out;
}

PiecewiseProblem spp_flatten(const SppProblem& p) {
  return spp_flatten(std::make_shared<const SppProblem>(p));
}

void check_reduction(const SppProblem& p, const VectorFunction& g0, const Vector& y) {
  const Vector z = g0(y);
  const double residual = norm_inf(p.fast_field(y, z));
  if (!(residual <= kReductionResidualTol)) {
    throw ResidualTooLarge(p.label + ": ||g(y, g0(y))|| = " + std::to_string(residual) +
                           " exceeds " + std::to_string(kReductionResidualTol));
  }
}

PiecewiseProblem reduced_order_model(std::shared_ptr<const SppProblem> p, VectorFunction g0) {
  p->validate();
  PiecewiseProblem out;
  out.label = p->label + "_reduced";
  out.dim = p->slow_dim;
  const SppProblem* sp = p.get();
  auto shared_g0 = std::make_shared<const VectorFunction>(std::move(g0));

  for (std::size_t k = 0; k < 2; ++k) {
    out.fields[k] = [sp, shared_g0, k, keep = p](const Vector& y) {
      check_reduction(*sp, *shared_g0, y);
      return sp->slow_fields[k](y, (*shared_g0)(y));
    };
  }
  out.h = [sp, shared_g0, keep = p](const Vector& y) { return sp->h(y, (*shared_g0)(y)); };
  return out;
}

}  // namespace nsode
