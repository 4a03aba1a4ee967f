#pragma once

// Random generators and independent reference computations shared by tests.
// Nothing here calls into the library's numerics beyond the value types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "nsode/linalg.hpp"

namespace testing {

using nsode::Matrix;
using nsode::Vector;

inline std::mt19937 make_rng(std::uint32_t seed) { return std::mt19937(seed); }

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector random_vector(std::mt19937& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

inline Matrix random_matrix(std::mt19937& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = uniform(rng, lo, hi);
  return m;
}

/// Strictly diagonally dominant, hence invertible with modest condition number.
inline Matrix random_dominant(std::mt19937& rng, std::size_t n) {
  Matrix m = random_matrix(rng, n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(m(i, j));
    m(i, i) = (m(i, i) < 0 ? -1.0 : 1.0) * (s + uniform(rng, 0.5, 2.0));
  }
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Solution of a 2x2 system by Cramer's rule.
inline std::vector<double> cramer2(double a, double b, double c, double d, double r0, double r1) {
  const double det = a * d - b * c;
  return {(r0 * d - b * r1) / det, (a * r1 - r0 * c) / det};
}

/// Eigenvalues of [[a, b], [c, d]].
inline std::pair<std::complex<double>, std::complex<double>> eig2(double a, double b, double c, double d) {
  const std::complex<double> tr = a + d;
  const std::complex<double> disc = std::sqrt(std::complex<double>((a - d) * (a - d) + 4.0 * b * c));
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

inline const double kGamma2 = 1.0 - std::sqrt(0.5);

/// Two-stage scalar recurrences for x' = lambda x, written out by hand.
struct ScalarRos2 {
  double k1, k2, x1;
};

inline ScalarRos2 scalar_ros2(double lambda, double x0, double tau, double gamma = kGamma2) {
  const double m = 1.0 - gamma * tau * lambda;
  const double k1 = tau * lambda * x0 / m;
  const double k2 = (tau * lambda * (x0 + k1) - 2.0 * k1) / m;
  return {k1, k2, x0 + 1.5 * k1 + 0.5 * k2};
}

/// The rational amplification factor (1 + (1 - 2g) z) / (1 - g z)^2.
inline double ros2_amplification(double z, double gamma = kGamma2) {
  return (1.0 + (1.0 - 2.0 * gamma) * z) / ((1.0 - gamma * z) * (1.0 - gamma * z));
}

/// Continuous extension written from its defining polynomials.
inline double scalar_dense(const ScalarRos2& s, double x0, double theta, double gamma = kGamma2) {
  const double c = 1.0 / (2.0 * (1.0 - 2.0 * gamma));
  const double b1 = theta * theta + (2.0 - 6.0 * gamma) * theta;
  const double b2 = theta * theta - 2.0 * gamma * theta;
  return x0 + c * b1 * s.k1 + c * b2 * s.k2;
}

/// Number of sign changes of samples[i] along the sequence, zeros skipped.
inline int count_sign_changes(const std::vector<double>& samples) {
  int changes = 0;
  int last = 0;
  for (double v : samples) {
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline double ulp_of(double x) { return std::nextafter(std::abs(x), INFINITY) - std::abs(x); }

}  // namespace testing
