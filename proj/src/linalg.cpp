#include "nsode/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "nsode/errors.hpp"

namespace nsode {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  if (!all_finite(values)) {
    throw NonFiniteValue(std::string(what) + ": non-finite entry");
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": sizes " + std::to_string(a) + " and " +
                            std::to_string(b));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vector

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "Vector");
}

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
  require_finite(data_, "Vector");
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(size(), other.size(), "Vector +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(size(), other.size(), "Vector -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Vector Vector::concat(const Vector& tail) const {
  Vector out(size() + tail.size());
  std::copy(data_.begin(), data_.end(), out.data_.begin());
  std::copy(tail.data_.begin(), tail.data_.end(), out.data_.begin() + static_cast<long>(size()));
  return out;
}

Vector Vector::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > size()) {
    throw DimensionMismatch("Vector::slice out of range");
  }
  Vector out(count);
  std::copy_n(data_.begin() + static_cast<long>(offset), count, out.data_.begin());
  return out;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double s, Vector v) { return v *= s; }
Vector operator*(Vector v, double s) { return v *= s; }
Vector operator-(Vector v) { return v *= -1.0; }

double dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

bool all_finite(std::span<const double> values) noexcept {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require_same_size(r.size(), cols_, "Matrix rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector Matrix::row(std::size_t i) const {
  Vector r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
  return r;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_size(rows_, other.rows_, "Matrix += rows");
  require_same_size(cols_, other.cols_, "Matrix += cols");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_size(rows_, other.rows_, "Matrix -= rows");
  require_same_size(cols_, other.cols_, "Matrix -= cols");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void Matrix::set_block(std::size_t row, std::size_t col, const Matrix& block) {
  if (row + block.rows() > rows_ || col + block.cols() > cols_) {
    throw DimensionMismatch("Matrix::set_block out of range");
  }
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) (*this)(row + i, col + j) = block(i, j);
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_size(a.cols(), b.rows(), "Matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& m, const Vector& v) {
  require_same_size(m.cols(), v.size(), "Matrix-vector product");
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double norm_inf(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.values()) best = std::max(best, std::abs(v));
  return best;
}

double bilinear(const Vector& u, const Matrix& m, const Vector& v) { return dot(u, m * v); }

// ---------------------------------------------------------------------------
// LU

LinalgCounters& linalg_counters() noexcept {
  thread_local LinalgCounters counters;
  return counters;
}

Matrix LuFactors::lower() const {
  const std::size_t n = size();
  Matrix l = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) l(i, j) = combined(i, j);
  return l;
}

Matrix LuFactors::upper() const {
  const std::size_t n = size();
  Matrix u(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) u(i, j) = combined(i, j);
  return u;
}

Matrix LuFactors::reconstruct() const {
  const Matrix pa = lower() * upper();
  Matrix a(size());
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) a(pivots[i], j) = pa(i, j);
  return a;
}

LuFactors lu_factor(const Matrix& m) {
  if (!m.square()) {
    throw DimensionMismatch("lu_factor: matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  }
  require_finite(m.values(), "lu_factor");
  const std::size_t n = m.rows();
  const double tol = kSingularTolerance * max_abs(m);

  LuFactors f{m, std::vector<std::size_t>(n)};
  std::iota(f.pivots.begin(), f.pivots.end(), std::size_t{0});
  Matrix& a = f.combined;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;

    const double pivot = std::abs(a(p, k));
    if (pivot == 0.0 || pivot < tol) {
      throw SingularMatrix("lu_factor: pivot " + std::to_string(pivot) + " in column " +
                           std::to_string(k) + " below tolerance");
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
      std::swap(f.pivots[p], f.pivots[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      a(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  ++linalg_counters().factorizations;
  return f;
}

Vector lu_solve(const LuFactors& f, const Vector& b) {
  const std::size_t n = f.size();
  require_same_size(n, b.size(), "lu_solve");
  const Matrix& a = f.combined;

  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[f.pivots[i]];
    for (std::size_t j = 0; j < i; ++j) s -= a(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  ++linalg_counters().solves;
  return x;
}

// ---------------------------------------------------------------------------
// Spectral radius

double spectral_radius_bound(const Matrix& m) {
  if (!m.square()) throw DimensionMismatch("spectral_radius_bound: matrix not square");
  const double gershgorin = norm_inf(m);
  if (gershgorin == 0.0) return 0.0;

  // rho(M) <= ||M^k||^(1/k) for every k; the powers are renormalized each
  // round and the scale is carried in log form.
  constexpr int kPowers = 50;
  Matrix p = m;
  double log_norm = 0.0;
  for (int k = 1; k <= kPowers; ++k) {
    if (k > 1) p = p * m;
    const double nrm = norm_inf(p);
    if (nrm == 0.0) return 0.0;
    log_norm += std::log(nrm);
    p *= 1.0 / nrm;
  }
  const double gelfand = std::exp(log_norm / kPowers);
  return std::min(gershgorin, 1.05 * gelfand);
}

// ---------------------------------------------------------------------------
// Finite differences

double fd_step(double xj) noexcept {
  static const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  return root_eps * std::max(1.0, std::abs(xj));
}

namespace {

double hessian_step(double xj) noexcept {
  static const double quart_eps = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
  return quart_eps * std::max(1.0, std::abs(xj));
}

bool inside(const DomainPredicate& domain, const Vector& x) { return !domain || domain(x); }

Vector shifted(const Vector& x, std::size_t j, double dj) {
  Vector y = x;
  y[j] += dj;
  return y;
}

enum class Stencil { Central, Forward, Backward };

Stencil pick_stencil(const DomainPredicate& domain, const Vector& x, std::size_t j, double step,
                     const char* who) {
  const bool plus = inside(domain, shifted(x, j, step));
  const bool minus = inside(domain, shifted(x, j, -step));
  if (plus && minus) return Stencil::Central;
  if (plus) return Stencil::Forward;
  if (minus) return Stencil::Backward;
  throw DomainViolation(std::string(who) + ": no stencil fits the domain in coordinate " +
                        std::to_string(j));
}

}  // namespace

Matrix fd_jacobian(const VectorFunction& f, const Vector& x, const DomainPredicate& domain) {
  if (!inside(domain, x)) throw DomainViolation("fd_jacobian: base point outside the domain");
  const std::size_t n = x.size();
  Vector f0;
  Matrix jac;
  for (std::size_t j = 0; j < n; ++j) {
    const double step = fd_step(x[j]);
    const Stencil s = pick_stencil(domain, x, j, step, "fd_jacobian");
    Vector column;
    if (s == Stencil::Central) {
      column = (f(shifted(x, j, step)) - f(shifted(x, j, -step))) * (0.5 / step);
    } else {
      if (f0.empty()) f0 = f(x);
      const double signed_step = s == Stencil::Forward ? step : -step;
      column = (f(shifted(x, j, signed_step)) - f0) * (1.0 / signed_step);
    }
    if (j == 0) jac = Matrix(column.size(), n);
    for (std::size_t i = 0; i < column.size(); ++i) jac(i, j) = column[i];
  }
  require_finite(jac.values(), "fd_jacobian");
  return jac;
}

Vector fd_gradient(const ScalarFunction& h, const Vector& x, const DomainPredicate& domain) {
  if (!inside(domain, x)) throw DomainViolation("fd_gradient: base point outside the domain");
  const std::size_t n = x.size();
  Vector g(n);
  double h0 = 0.0;
  bool have_h0 = false;
  for (std::size_t j = 0; j < n; ++j) {
    const double step = fd_step(x[j]);
    const Stencil s = pick_stencil(domain, x, j, step, "fd_gradient");
    if (s == Stencil::Central) {
      g[j] = (h(shifted(x, j, step)) - h(shifted(x, j, -step))) * (0.5 / step);
    } else {
      if (!have_h0) {
        h0 = h(x);
        have_h0 = true;
      }
      const double signed_step = s == Stencil::Forward ? step : -step;
      g[j] = (h(shifted(x, j, signed_step)) - h0) / signed_step;
    }
  }
  require_finite(g.values(), "fd_gradient");
  return g;
}

Matrix fd_hessian(const ScalarFunction& h, const Vector& x, const DomainPredicate& domain) {
  if (!inside(domain, x)) throw DomainViolation("fd_hessian: base point outside the domain");
  const std::size_t n = x.size();
  std::vector<double> step(n);
  std::vector<double> dir(n, 1.0);
  bool central = true;
  for (std::size_t j = 0; j < n; ++j) {
    step[j] = hessian_step(x[j]);
    const Stencil s = pick_stencil(domain, x, j, 2.0 * step[j], "fd_hessian");
    if (s != Stencil::Central) central = false;
    if (s == Stencil::Backward) dir[j] = -1.0;
  }

  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    Vector y = x;
    y[i] += di;
    y[j] += dj;
    if (!inside(domain, y)) throw DomainViolation("fd_hessian: stencil point outside the domain");
    return h(y);
  };

  Matrix hess(n);
  const double h0 = h(x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double hi = step[i];
      const double hj = step[j];
      double v = 0.0;
      if (central) {
        if (i == j) {
          v = (at(i, hi, i, 0.0) - 2.0 * h0 + at(i, -hi, i, 0.0)) / (hi * hi);
        } else {
          v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) /
              (4.0 * hi * hj);
        }
      } else {
        // One-sided: all stencil points lie on the admissible side of x.
        const double si = dir[i] * hi;
        const double sj = dir[j] * hj;
        if (i == j) {
          v = (at(i, 2.0 * si, i, 0.0) - 2.0 * at(i, si, i, 0.0) + h0) / (si * si);
        } else {
          v = (at(i, si, j, sj) - at(i, si, j, 0.0) - at(j, sj, j, 0.0) + h0) / (si * sj);
        }
      }
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  Matrix sym = 0.5 * (hess + hess.transpose());
  require_finite(sym.values(), "fd_hessian");
  return sym;
}

}  // namespace nsode
