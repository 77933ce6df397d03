#include <doctest.h>

#include <random>

#include "hpl/error.hpp"
#include "hpl/kernels.hpp"
#include "support.hpp"

using namespace hpl;
using namespace hpl::kernels;

TEST_CASE("sylvester: scalar case 2P + 3P = 10") {
  Matrix a(1, 1), b(1, 1), r(1, 1);
  a << 2;
  b << 3;
  r << 10;
  CHECK(solve_sylvester_spd(a, b, r)(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sylvester: zero A and identity B return R") {
  std::mt19937_64 rng(1);
  const Matrix r = test::random_matrix(3, 3, rng);
  const Matrix p = solve_sylvester_spd(Matrix::Zero(3, 3), Matrix::Identity(3, 3), r);
  CHECK((p - r).norm() <= 1e-14);
}

TEST_CASE("sylvester: seeded 5x4 residual oracle") {
  std::mt19937_64 rng(5);
  const Matrix m = test::random_matrix(5, 5, rng);
  const Matrix a = m.transpose() * m;
  const Matrix b = Vector::LinSpaced(4, 1, 4).asDiagonal();
  const Matrix r = test::random_matrix(5, 4, rng);
  const Matrix p = solve_sylvester_spd(0.5 * (a + a.transpose()), b, r);
  CHECK((a * p + p * b - r).norm() <= 1e-8 * r.norm());
}

TEST_CASE("sylvester: residual on 100 random SPD instances up to 50x50") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 50);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = size(rng);
    const int c = size(rng);
    const Matrix ma = test::random_matrix(d, d, rng);
    const Matrix mb = test::random_matrix(c, c, rng);
    const Matrix a = gram(ma);
    const Matrix b = gram(mb) + Matrix::Identity(c, c);
    const Matrix r = test::random_matrix(d, c, rng);
    const Matrix p = solve_sylvester_spd(a, b, r);
    CHECK((a * p + p * b - r).norm() <= 1e-8 * std::max(1.0, r.norm()));
  }
}

TEST_CASE("sylvester: diagonal B agrees with the general solver") {
  std::mt19937_64 rng(3);
  const Matrix a = gram(test::random_matrix(6, 9, rng));
  Vector diag(3);
  diag << 1.5, 4.0, 0.25;
  const Matrix r = test::random_matrix(6, 3, rng);
  const Matrix p1 = solve_sylvester_diagonal(symmetric_eigen(a), diag, r);
  const Matrix p2 = solve_sylvester_spd(a, Matrix(diag.asDiagonal()), r);
  CHECK((p1 - p2).norm() <= 1e-12 * std::max(1.0, p2.norm()));
}

TEST_CASE("sylvester: errors") {
  Matrix nonsym(2, 2);
  nonsym << 1, 2, 0, 1;
  CHECK_THROWS_AS(solve_sylvester_spd(nonsym, Matrix::Identity(2, 2), Matrix::Ones(2, 2)), ValidationError);
  CHECK_THROWS_AS(solve_sylvester_spd(Matrix::Identity(2, 2), Matrix::Identity(3, 3), Matrix::Ones(2, 2)),
                  ValidationError);
  CHECK_THROWS_AS(solve_sylvester_spd(Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Ones(2, 2)), SingularityError);
  try {
    solve_sylvester_spd(Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  } catch (const SingularityError& e) {
    CHECK(std::string(e.what()).find("(0, 0)") != std::string::npos);
  }
}

TEST_CASE("gram_ridge_solve: identity and hand-checked cases") {
  std::mt19937_64 rng(2);
  const Matrix r = test::random_matrix(3, 2, rng);
  CHECK((gram_ridge_solve(Matrix::Identity(3, 3), r, 0.0) - r).norm() <= 1e-15);

  Matrix g(2, 2), r2(2, 1), expected(2, 1);
  g << 1, 0, 0, 0;
  r2 << 2, 3;
  expected << 1, 3;
  CHECK((gram_ridge_solve(g, r2, 1.0) - expected).norm() <= 1e-15);
}

TEST_CASE("gram_ridge_solve: seeded residual and singular system") {
  std::mt19937_64 rng(4);
  const Matrix m = test::random_matrix(4, 4, rng);
  const Matrix g = gram(m.transpose());
  const Matrix r = test::random_matrix(4, 3, rng);
  const Matrix z = gram_ridge_solve(g, r, 1e-6);
  CHECK(((g + 1e-6 * Matrix::Identity(4, 4)) * z - r).norm() <= 1e-10 * std::max(1.0, r.norm()));

  Matrix singular(2, 2);
  singular << 1, 0, 0, 0;
  CHECK_THROWS_AS(gram_ridge_solve(singular, Matrix::Ones(2, 1), 0.0), SingularityError);
}

TEST_CASE("project_columns_unit_ball: examples and properties") {
  Matrix m(2, 3);
  m << 0.3, 3, 0, 0.4, 4, 0;
  const Matrix p = project_columns_unit_ball(m);
  CHECK(p(0, 0) == 0.3);
  CHECK(p(1, 0) == 0.4);
  CHECK(p(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p(1, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p.col(2).norm() == 0.0);
  CHECK((project_columns_unit_ball(p) - p).norm() == 0.0);

  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = 2.0 * test::random_matrix(4, 1, rng);
    const Matrix b = 2.0 * test::random_matrix(4, 1, rng);
    CHECK((project_columns_unit_ball(a) - project_columns_unit_ball(b)).norm() <= (a - b).norm() + 1e-15);
  }
}

TEST_CASE("normalize_columns: examples") {
  Matrix m(2, 1);
  m << 3, 4;
  const Matrix n = normalize_columns(m);
  CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(n(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK((normalize_columns(n) - n).norm() <= 1e-15);
  CHECK_THROWS_AS(normalize_columns(Matrix::Zero(2, 2)), ValidationError);
  try {
    Matrix z(2, 2);
    z << 1, 0, 0, 0;
    normalize_columns(z);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

namespace {

DescentResult fit_target(const Matrix& target, const Matrix& x0, const LineSearchParams& ls = {}) {
  auto f = [&](const Matrix& x) { return (x - target).squaredNorm(); };
  auto g = [&](const Matrix& x) -> Matrix { return 2.0 * (x - target); };
  return projected_descent(f, g, x0, [](const Matrix& x) { return project_columns_unit_ball(x); }, ls);
}

}  // namespace

TEST_CASE("projected_descent: feasible target is reached") {
  Matrix t(2, 1);
  t << 0.3, -0.2;
  LineSearchParams ls;
  ls.tol = 1e-12;
  const DescentResult r = fit_target(t, Matrix::Zero(2, 1), ls);
  CHECK((r.x - t).norm() <= 1e-6);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("projected_descent: infeasible target lands on the unit sphere") {
  Matrix t(2, 1);
  t << 2.0 * std::cos(0.7), 2.0 * std::sin(0.7);
  LineSearchParams ls;
  ls.tol = 1e-14;
  ls.max_steps = 500;
  const DescentResult r = fit_target(t, Matrix::Zero(2, 1), ls);
  CHECK((r.x - t / 2.0).norm() <= 1e-6);

  // Dense grid over the feasible disc agrees.
  double best = std::numeric_limits<double>::infinity();
  for (int i = -400; i <= 400; ++i) {
    for (int j = -400; j <= 400; ++j) {
      Vector x(2);
      x << i / 400.0, j / 400.0;
      if (x.norm() > 1.0) continue;
      best = std::min(best, (x - t.col(0)).squaredNorm());
    }
  }
  CHECK((r.x - t).squaredNorm() <= best + 1e-9);
}

TEST_CASE("projected_descent: stationary start returns x0") {
  Matrix t(2, 2);
  t << 0.1, 0.2, 0.3, 0.4;
  const DescentResult r = fit_target(t, t);
  CHECK(r.stationary);
  CHECK(r.steps == 0);
  CHECK((r.x - t).norm() == 0.0);
}

TEST_CASE("projected_descent: ascent direction stalls") {
  Matrix t(2, 1);
  t << 0.5, 0.0;
  auto f = [&](const Matrix& x) { return (x - t).squaredNorm(); };
  auto wrong = [&](const Matrix& x) -> Matrix { return -2.0 * (x - t); };
  const DescentResult r = projected_descent(f, wrong, Matrix::Zero(2, 1), [](const Matrix& x) { return x; });
  CHECK(r.stalled);
  CHECK(r.x.norm() == 0.0);
}

TEST_CASE("projected_descent: parameter validation") {
  LineSearchParams ls;
  ls.shrink = 1.0;
  CHECK_THROWS_AS(fit_target(Matrix::Ones(1, 1), Matrix::Zero(1, 1), ls), ValidationError);
  ls = {};
  ls.c1 = 0.0;
  CHECK_THROWS_AS(fit_target(Matrix::Ones(1, 1), Matrix::Zero(1, 1), ls), ValidationError);
}
