#pragma once

// Crossing / sliding classification where a trajectory hits the switching
// surface, for general piecewise problems and singularly perturbed ones.

#include <optional>
#include <string>
#include <utility>

#include "nsode/linalg.hpp"
#include "nsode/problem.hpp"

namespace nsode {

enum class SurfaceKind { Crossing, SlidingAttractive, SlidingRepulsive, Tangential };

std::string to_string(SurfaceKind kind);

inline constexpr double kClassifyTol = 1e-10;

struct SurfaceClassification {
  SurfaceKind kind = SurfaceKind::Tangential;
  /// A eps^2 + B eps + Csq; NaN when the classification came from the general test.
  double quadratic_value = 0.0;
  /// (n^T F1, n^T F2) with n = grad h.
  std::pair<double, double> normal_products{0.0, 0.0};
};

/// Filippov sign test with n = grad h(x):
///   Tangential when min(|n^T f1|, |n^T f2|) <= tol, otherwise Crossing on equal
///   signs, SlidingAttractive when n^T f1 > 0 > n^T f2, SlidingRepulsive when
///   n^T f1 < 0 < n^T f2.
/// Throws InvalidArgument when |h(x)| > sigma_tol.
SurfaceClassification classify_general(const PiecewiseProblem& p, const Vector& x,
                                       double tol = kClassifyTol, double sigma_tol = kSigmaTol);

struct FilippovCoeffs {
  double A = 0.0;    ///< (h_y^T f1)(h_y^T f2)
  double B = 0.0;    ///< (h_y^T f1 + h_y^T f2)(h_z^T g)
  double Csq = 0.0;  ///< (h_z^T g)^2

  double quadratic(double eps) const { return (A * eps + B) * eps + Csq; }
  double discriminant() const { return B * B - 4.0 * A * Csq; }
};

/// Evaluated at a surface state (y, z); eps plays no part.
FilippovCoeffs filippov_coeffs(const SppProblem& p, const Vector& y, const Vector& z,
                               double sigma_tol = kSigmaTol);

enum class SppVerdict { Crossing, Sliding, Tangential };

std::string to_string(SppVerdict v);

/// Sign of q = A eps^2 + B eps + Csq: Sliding below -band, Crossing above
/// band, band = tol * min(1, eps^2). Rejects eps <= 0.
SppVerdict classify_spp(const FilippovCoeffs& c, double eps, double tol = kClassifyTol);

/// For A < 0 returns eps2 = (-B - sqrt(B^2 + 4|A| Csq)) / (2A), the larger
/// root of q; q < 0 for every eps > eps2. Empty when A >= 0.
std::optional<double> sliding_sufficient(const FilippovCoeffs& c);

/// (A > 0 and disc < 0) or (A > 0 and B > 0 and disc >= 0).
bool crossing_sufficient(const FilippovCoeffs& c);

/// Classification of a surface state of an SPP problem: the verdict of the
/// quadratic, refined to attractive / repulsive by the sign pattern on the
/// flattened problem. normal_products are those of the flattened fields.
SurfaceClassification classify_spp_state(const SppProblem& p, const Vector& u,
                                         double tol = kClassifyTol, double sigma_tol = kSigmaTol);

/// Dispatches to classify_spp_state when p is a flattened SPP problem and to
/// classify_general otherwise.
SurfaceClassification classify_surface(const PiecewiseProblem& p, const Vector& x,
                                       double tol = kClassifyTol, double sigma_tol = kSigmaTol);

}  // namespace nsode
