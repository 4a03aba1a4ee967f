#include <doctest.h>

#include <cmath>
#include <limits>

#include "nsode/errors.hpp"
#include "nsode/linalg.hpp"
#include "support.hpp"

using namespace nsode;
using testing::max_abs_diff;

TEST_CASE("vector construction rejects non-finite entries") {
  CHECK_THROWS_AS(Vector({1.0, std::numeric_limits<double>::quiet_NaN()}), NonFiniteValue);
  CHECK_THROWS_AS(Vector(std::vector<double>{std::numeric_limits<double>::infinity()}), NonFiniteValue);
  CHECK_THROWS_AS((Matrix{{1.0, 0.0}, {0.0, std::numeric_limits<double>::infinity()}}), NonFiniteValue);
  CHECK_THROWS_AS((Matrix{{1.0, 0.0}, {0.0}}), DimensionMismatch);
}

TEST_CASE("vector helpers") {
  const Vector a{1.0, -2.0, 3.0};
  const Vector b{0.5, 0.5, 0.5};
  CHECK(dot(a, b) == doctest::Approx(1.0));
  CHECK(norm_inf(a) == 3.0);
  CHECK(norm2(Vector{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(a.concat(b).size() == 6);
  CHECK(a.concat(b).slice(3, 3) == b);
  CHECK_THROWS_AS(dot(a, Vector{1.0}), DimensionMismatch);
}

TEST_CASE("lu of the identity is trivial") {
  const LuFactors f = lu_factor(Matrix::identity(3));
  CHECK(f.lower() == Matrix::identity(3));
  CHECK(f.upper() == Matrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i) CHECK(f.pivots[i] == i);
  const Vector b{1.5, -2.0, 7.0};
  CHECK(lu_solve(f, b) == b);
}

TEST_CASE("2x2 solve agrees with Cramer's rule") {
  const Matrix m{{2.0, 1.0}, {1.0, 3.0}};
  const Vector x = lu_solve(lu_factor(m), Vector{3.0, 4.0});
  const auto want = testing::cramer2(2.0, 1.0, 1.0, 3.0, 3.0, 4.0);
  CHECK(x[0] == doctest::Approx(want[0]).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(want[1]).epsilon(1e-15));
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("diagonal solve") {
  const Vector x = lu_solve(lu_factor(Matrix{{2.0, 0.0}, {0.0, 4.0}}), Vector{2.0, 8.0});
  CHECK(x == Vector{1.0, 2.0});
}

TEST_CASE("singular and malformed inputs") {
  CHECK_THROWS_AS(lu_factor(Matrix{{1.0, 2.0}, {2.0, 4.0}}), SingularMatrix);
  CHECK_THROWS_AS(lu_factor(Matrix(2)), SingularMatrix);
  CHECK_THROWS_AS(lu_factor(Matrix(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(lu_solve(lu_factor(Matrix::identity(2)), Vector{1.0, 2.0, 3.0}), DimensionMismatch);
  // A pivot far below 1e-13 * max|M| counts as singular.
  CHECK_THROWS_AS(lu_factor(Matrix{{1.0, 1.0}, {1.0, 1.0 + 1e-15}}), SingularMatrix);
}

TEST_CASE("property: P L U reconstructs M") {
  auto rng = testing::make_rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const Matrix m = testing::random_matrix(rng, n, -5.0, 5.0);
    LuFactors f;
    try {
      f = lu_factor(m);
    } catch (const SingularMatrix&) {
      continue;
    }
    CHECK(max_abs_diff(f.reconstruct(), m) <= 1e-12 * norm_inf(m));
  }
}

TEST_CASE("property: solve residual and recovery") {
  auto rng = testing::make_rng(202);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const Matrix m = testing::random_dominant(rng, n);
    const Vector x = testing::random_vector(rng, n, -3.0, 3.0);
    const Vector b = m * x;
    const Vector got = lu_solve(lu_factor(m), b);
    const double residual = norm_inf(m * got - b);
    CHECK(residual <= 1e-10 * (norm_inf(m) * norm_inf(got) + norm_inf(b)));
    CHECK(max_abs_diff(got, x) <= 1e-9 * norm_inf(x));
  }
}

TEST_CASE("random well-conditioned 5x5 residual bound") {
  auto rng = testing::make_rng(5);
  const Matrix m = testing::random_dominant(rng, 5);
  const Vector b = testing::random_vector(rng, 5);
  const Vector x = lu_solve(lu_factor(m), b);
  CHECK(norm_inf(m * x - b) <= 1e-10 * (norm_inf(m) * norm_inf(x) + norm_inf(b)));
}

TEST_CASE("factorization and solve counters") {
  const LinalgCounters before = linalg_counters();
  const LuFactors f = lu_factor(Matrix::identity(2));
  lu_solve(f, Vector{1.0, 1.0});
  lu_solve(f, Vector{1.0, 2.0});
  CHECK(linalg_counters().factorizations - before.factorizations == 1);
  CHECK(linalg_counters().solves - before.solves == 2);
}

TEST_CASE("spectral radius bound examples") {
  const double diag = spectral_radius_bound(Matrix::diagonal(Vector{0.5, -0.25}));
  CHECK(diag >= 0.5);
  CHECK(diag <= 0.525);
  CHECK(spectral_radius_bound(Matrix(3)) == 0.0);
  const double nil = spectral_radius_bound(Matrix{{0.0, 1.0}, {0.0, 0.0}});
  CHECK(nil >= 0.0);
  CHECK(nil <= 1.0);
}

TEST_CASE("property: spectral radius bound dominates 2x2 eigenvalues") {
  auto rng = testing::make_rng(303);
  for (int trial = 0; trial < 2000; ++trial) {
    const Matrix m = testing::random_matrix(rng, 2, -4.0, 4.0);
    const auto [l1, l2] = testing::eig2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    const double rho = std::max(std::abs(l1), std::abs(l2));
    CHECK(spectral_radius_bound(m) >= rho * (1.0 - 1e-12));
  }
}

TEST_CASE("property: bound dominates the spectrum of similar diagonal matrices") {
  auto rng = testing::make_rng(304);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const Vector d = testing::random_vector(rng, n, -3.0, 3.0);
    const Matrix s = testing::random_dominant(rng, n);
    Matrix sinv(n);
    const LuFactors f = lu_factor(s);
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n);
      e[j] = 1.0;
      const Vector col = lu_solve(f, e);
      for (std::size_t i = 0; i < n; ++i) sinv(i, j) = col[i];
    }
    const Matrix m = s * Matrix::diagonal(d) * sinv;
    CHECK(spectral_radius_bound(m) >= norm_inf(d) * (1.0 - 1e-9));
  }
}

TEST_CASE("finite-difference jacobian") {
  const VectorFunction id = [](const Vector& x) { return x; };
  CHECK(max_abs_diff(fd_jacobian(id, Vector{0.3, -2.0, 5.0}), Matrix::identity(3)) <= 1e-8);

  const VectorFunction sq = [](const Vector& x) { return Vector{x[0] * x[0], x[1]}; };
  CHECK(max_abs_diff(fd_jacobian(sq, Vector{1.0, 1.0}), Matrix{{2.0, 0.0}, {0.0, 1.0}}) <= 1e-6);

  const VectorFunction constant = [](const Vector&) { return Vector{4.0, -1.0}; };
  CHECK(max_abs_diff(fd_jacobian(constant, Vector{1.0, 2.0}), Matrix(2)) <= 1e-8);
}

TEST_CASE("finite-difference jacobian respects a domain boundary") {
  int outside = 0;
  const DomainPredicate dom = [](const Vector& x) { return x[1] <= 1.0; };
  const VectorFunction f = [&](const Vector& x) {
    if (x[1] > 1.0) ++outside;
    return Vector{x[0] * std::sqrt(1.0 - x[1]), 1.0};
  };
  const Vector at{2.0, 1.0 - 1e-3};
  const Matrix J = fd_jacobian(f, at, dom);
  CHECK(outside == 0);
  const double s = std::sqrt(1.0 - at[1]);
  CHECK(J(0, 0) == doctest::Approx(s).epsilon(1e-6));
  CHECK(J(0, 1) == doctest::Approx(-at[0] / (2.0 * s)).epsilon(1e-4));

  const DomainPredicate nowhere = [](const Vector& x) { return x[0] == 0.5; };
  CHECK_THROWS_AS(fd_jacobian(f, Vector{0.5, 0.0}, nowhere), DomainViolation);
}

TEST_CASE("finite-difference gradient and hessian") {
  const ScalarFunction lin = [](const Vector& x) { return x[0]; };
  CHECK(max_abs_diff(fd_gradient(lin, Vector{0.4, 1.0}), Vector{1.0, 0.0}) <= 1e-8);
  CHECK(max_abs_diff(fd_hessian(lin, Vector{0.4, 1.0}), Matrix(2)) <= 1e-6);

  const ScalarFunction prod = [](const Vector& x) { return x[0] * x[1]; };
  CHECK(max_abs_diff(fd_gradient(prod, Vector{2.0, 3.0}), Vector{3.0, 2.0}) <= 1e-7);
  CHECK(max_abs_diff(fd_hessian(prod, Vector{2.0, 3.0}), Matrix{{0.0, 1.0}, {1.0, 0.0}}) <= 1e-5);

  const ScalarFunction half_sq = [](const Vector& x) { return 0.5 * dot(x, x); };
  const Vector x{0.7, -1.2, 2.5};
  CHECK(max_abs_diff(fd_gradient(half_sq, x), x) <= 1e-7);
  CHECK(max_abs_diff(fd_hessian(half_sq, x), Matrix::identity(3)) <= 1e-5);
}

TEST_CASE("property: fd hessian is exactly symmetric") {
  auto rng = testing::make_rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector c = testing::random_vector(rng, 3);
    const ScalarFunction h = [c](const Vector& x) {
      return std::sin(c[0] * x[0] + x[1]) * std::exp(c[1] * x[2]) + c[2] * x[0] * x[1] * x[2];
    };
    const Matrix H = fd_hessian(h, testing::random_vector(rng, 3));
    CHECK(H == H.transpose());
  }
}

TEST_CASE("property: fd jacobian matches analytic derivatives of smooth fields") {
  auto rng = testing::make_rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = testing::random_vector(rng, 2, -2.0, 2.0);
    const VectorFunction f = [](const Vector& u) {
      return Vector{std::sin(u[0]) * u[1], std::exp(0.3 * u[0]) + u[1] * u[1]};
    };
    const Matrix want{{std::cos(x[0]) * x[1], std::sin(x[0])},
                      {0.3 * std::exp(0.3 * x[0]), 2.0 * x[1]}};
    CHECK(max_abs_diff(fd_jacobian(f, x), want) <= 1e-7);
  }
}
