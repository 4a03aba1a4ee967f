#include "nsode/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsode/errors.hpp"

namespace nsode {

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Crossing: return "crossing";
    case SurfaceKind::SlidingAttractive: return "sliding-attractive";
    case SurfaceKind::SlidingRepulsive: return "sliding-repulsive";
    case SurfaceKind::Tangential: return "tangential";
  }
  return "unknown";
}

std::string to_string(SppVerdict v) {
  switch (v) {
    case SppVerdict::Crossing: return "crossing";
    case SppVerdict::Sliding: return "sliding";
    case SppVerdict::Tangential: return "tangential";
  }
  return "unknown";
}

namespace {

void require_on_surface(double h, double sigma_tol, const char* who) {
  if (!(std::abs(h) <= sigma_tol)) {
    throw InvalidArgument(std::string(who) + ": state is not on the switching surface (h = " +
                          std::to_string(h) + ")");
  }
}

SurfaceKind sign_pattern(double p1, double p2, double tol) {
  if (std::min(std::abs(p1), std::abs(p2)) <= tol) return SurfaceKind::Tangential;
  if ((p1 > 0.0) == (p2 > 0.0)) return SurfaceKind::Crossing;
  return p1 > 0.0 ? SurfaceKind::SlidingAttractive : SurfaceKind::SlidingRepulsive;
}

}  // namespace

SurfaceClassification classify_general(const PiecewiseProblem& p, const Vector& x, double tol,
                                       double sigma_tol) {
  require_on_surface(p.event(x), sigma_tol, "classify_general");
  const Vector n = p.event_gradient(x);
  const double p1 = dot(n, eval_field(p, FieldId::One, x));
  const double p2 = dot(n, eval_field(p, FieldId::Two, x));
  SurfaceClassification out;
  out.kind = sign_pattern(p1, p2, tol);
  out.quadratic_value = std::numeric_limits<double>::quiet_NaN();
  out.normal_products = {p1, p2};
  return out;
}

FilippovCoeffs filippov_coeffs(const SppProblem& p, const Vector& y, const Vector& z,
                               double sigma_tol) {
  require_on_surface(p.event(y, z), sigma_tol, "filippov_coeffs");
  const Vector hy = p.h_y(y, z);
  const Vector hz = p.h_z(y, z);
  const double s1 = dot(hy, p.slow_fields[0](y, z));
  const double s2 = dot(hy, p.slow_fields[1](y, z));
  const double fast = dot(hz, p.fast_field(y, z));
  FilippovCoeffs c;
  c.A = s1 * s2;
  c.B = s1 * fast + s2 * fast;
  c.Csq = fast * fast;
  if (!std::isfinite(c.A) || !std::isfinite(c.B) || !std::isfinite(c.Csq)) {
    throw NonFiniteValue("filippov_coeffs: non-finite coefficient");
  }
  return c;
}

SppVerdict classify_spp(const FilippovCoeffs& c, double eps, double tol) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("classify_spp: eps must be positive");
  }
  const double q = c.quadratic(eps);
  // q = eps^2 (n^T F1)(n^T F2): the band shrinks with eps^2 so small eps
  // does not push clear crossings into it.
  const double band = tol * std::min(1.0, eps * eps);
  if (q < -band) return SppVerdict::Sliding;
  if (q > band) return SppVerdict::Crossing;
  return SppVerdict::Tangential;
}

std::optional<double> sliding_sufficient(const FilippovCoeffs& c) {
  if (!(c.A < 0.0)) return std::nullopt;
  return (-c.B - std::sqrt(c.B * c.B + 4.0 * std::abs(c.A) * c.Csq)) / (2.0 * c.A);
}

bool crossing_sufficient(const FilippovCoeffs& c) {
  if (!(c.A > 0.0)) return false;
  const double disc = c.discriminant();
  return disc < 0.0 || c.B > 0.0;
}

SurfaceClassification classify_spp_state(const SppProblem& p, const Vector& u, double tol,
                                         double sigma_tol) {
  if (u.size() != p.dim()) {
    throw DimensionMismatch("classify_spp_state: state has " + std::to_string(u.size()) +
                            " entries, problem has " + std::to_string(p.dim()));
  }
  const Vector y = p.slow_part(u);
  const Vector z = p.fast_part(u);
  const FilippovCoeffs c = filippov_coeffs(p, y, z, sigma_tol);
  const SppVerdict verdict = classify_spp(c, p.eps, tol);

  const PiecewiseProblem flat = spp_flatten(p);
  const Vector n = flat.event_gradient(u);
  const double p1 = dot(n, flat.fields[0](u));
  const double p2 = dot(n, flat.fields[1](u));

  SurfaceClassification out;
  out.quadratic_value = c.quadratic(p.eps);
  out.normal_products = {p1, p2};
  switch (verdict) {
    case SppVerdict::Crossing: out.kind = SurfaceKind::Crossing; break;
    case SppVerdict::Tangential: out.kind = SurfaceKind::Tangential; break;
    case SppVerdict::Sliding:
      out.kind = p1 > p2 ? SurfaceKind::SlidingAttractive : SurfaceKind::SlidingRepulsive;
      break;
  }
  return out;
}

SurfaceClassification classify_surface(const PiecewiseProblem& p, const Vector& x, double tol,
                                       double sigma_tol) {
  if (!p.spp) return classify_general(p, x, tol, sigma_tol);
  return classify_spp_state(*p.spp, x, tol, sigma_tol);
}

}  // namespace nsode
