#pragma once

// Dense real linear algebra sized for small ODE systems (n up to ~20):
// vectors, row-major matrices, LU with partial pivoting and finite-difference
// derivative kernels.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace nsode {

class Vector {
 public:
  Vector() = default;
  /// Zero vector of length n.
  explicit Vector(std::size_t n) : data_(n, 0.0) {}
  /// Throws NonFiniteValue if any entry is NaN or infinite.
  Vector(std::initializer_list<double> values);
  explicit Vector(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  /// Appends the entries of `tail` (used to stack slow and fast states).
  Vector concat(const Vector& tail) const;
  /// Entries [offset, offset + count).
  Vector slice(std::size_t offset, std::size_t count) const;

  bool operator==(const Vector& other) const = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector v);
Vector operator*(Vector v, double s);
Vector operator-(Vector v);

double dot(const Vector& a, const Vector& b);
double norm_inf(const Vector& v);
double norm2(const Vector& v);
bool all_finite(std::span<const double> values) noexcept;

/// Row-major dense matrix. Square in every use by the integrators; the
/// rectangular form only appears when stacking Jacobian blocks.
class Matrix {
 public:
  Matrix() = default;
  /// Square zero matrix.
  explicit Matrix(std::size_t n) : Matrix(n, n) {}
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  /// Rows given explicitly; throws NonFiniteValue or DimensionMismatch on ragged input.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> values() const noexcept { return data_; }

  Matrix transpose() const;
  Vector row(std::size_t i) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  /// Places `block` with its top-left corner at (row, col).
  void set_block(std::size_t row, std::size_t col, const Matrix& block);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& m, const Vector& v);

/// Max absolute row sum.
double norm_inf(const Matrix& m);
double max_abs(const Matrix& m);
/// u^T M v.
double bilinear(const Vector& u, const Matrix& m, const Vector& v);

/// Packed L\U with unit lower diagonal and the row permutation applied to
/// the input (row i of P*M is row pivots[i] of M).
struct LuFactors {
  Matrix combined;
  std::vector<std::size_t> pivots;

  std::size_t size() const noexcept { return pivots.size(); }
  Matrix lower() const;
  Matrix upper() const;
  /// P^T * L * U, i.e. the factored matrix in its original row order.
  Matrix reconstruct() const;
};

/// Relative pivot tolerance: a pivot below kSingularTolerance * max|M| is singular.
inline constexpr double kSingularTolerance = 1e-13;

LuFactors lu_factor(const Matrix& m);
Vector lu_solve(const LuFactors& f, const Vector& b);

/// Per-thread tallies of factorizations and solves. Integrations running on
/// different threads never share counters.
struct LinalgCounters {
  std::uint64_t factorizations = 0;
  std::uint64_t solves = 0;
};
LinalgCounters& linalg_counters() noexcept;

/// Upper bound on the spectral radius:
/// min(Gershgorin row bound, 1.05 * ||M^50||_inf^(1/50)).
double spectral_radius_bound(const Matrix& m);

using VectorFunction = std::function<Vector(const Vector&)>;
using ScalarFunction = std::function<double(const Vector&)>;
/// Marks where a field may be evaluated. An empty predicate means everywhere.
using DomainPredicate = std::function<bool(const Vector&)>;

/// Finite-difference step used for first derivatives in coordinate j.
double fd_step(double xj) noexcept;

/// Central-difference Jacobian. Where the central stencil would leave the
/// domain, the offending column uses a forward or backward stencil instead;
/// if neither fits, DomainViolation is thrown.
Matrix fd_jacobian(const VectorFunction& f, const Vector& x, const DomainPredicate& domain = {});
Vector fd_gradient(const ScalarFunction& h, const Vector& x, const DomainPredicate& domain = {});
/// Second-difference Hessian, symmetrized as (H + H^T)/2 so it is exactly symmetric.
Matrix fd_hessian(const ScalarFunction& h, const Vector& x, const DomainPredicate& domain = {});

}  // namespace nsode
