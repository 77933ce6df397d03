#pragma once

// Dense linear-algebra primitives shared by every block update: symmetric
// Sylvester solves, ridge-regularized Gram solves, column projections and a
// projected gradient descent with backtracking.
//
// All functions are pure; they may be called concurrently.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hpl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace kernels {

// Eigendecomposition A = U diag(values) U^T of a symmetric matrix.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Symmetric product X X^T, exactly symmetric (upper copied from lower).
Matrix gram(const Matrix& x);

/// Relative symmetry defect ||A - A^T||_F / max(1, ||A||_F).
double symmetry_defect(const Matrix& a);

/// Throws ValidationError if `a` is not square or its symmetry defect exceeds 1e-10.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Solves A P + P B = R for symmetric PSD A (d x d) and symmetric PD B (c x c).
///
/// Uses A = U L U^T, B = V S V^T and P = U ((U^T R V) ./ (l_i + s_j)) V^T.
/// Throws ValidationError for non-symmetric operands or shape mismatch, and
/// SingularityError when some l_i + s_j <= 1e-12.
Matrix solve_sylvester_spd(const Matrix& a, const Matrix& b, const Matrix& r);

/// Same, with both eigendecompositions precomputed.
Matrix solve_sylvester_spd(const SymmetricEigen& a, const SymmetricEigen& b, const Matrix& r);

/// Same, for diagonal B = diag(b_diag). V is the identity so only A is rotated.
Matrix solve_sylvester_diagonal(const SymmetricEigen& a, const Vector& b_diag, const Matrix& r);

/// Solves (G + tau I) Z = R through an LDL^T factorization.
/// Throws SingularityError if G + tau I is numerically singular.
Matrix gram_ridge_solve(const Matrix& g, const Matrix& r, double tau);

/// Scales every column with Euclidean norm above 1 back onto the unit sphere.
Matrix project_columns_unit_ball(Matrix m);

/// Rescales every column to unit norm. Columns with norm below 1e-12 are rejected.
Matrix normalize_columns(Matrix m);

struct LineSearchParams {
  double step0 = 1.0;
  double shrink = 0.5;
  double c1 = 1e-4;
  int max_steps = 50;
  double tol = 1e-6;
  int max_shrinks = 20;
};

struct DescentResult {
  Matrix x;
  // Objective at x0 followed by the objective after every accepted step.
  std::vector<double> trace;
  int steps = 0;
  bool stalled = false;
  bool stationary = false;
};

using Objective = std::function<double(const Matrix&)>;
using Gradient = std::function<Matrix(const Matrix&)>;
using Projection = std::function<Matrix(const Matrix&)>;

/// Projected gradient descent with Armijo backtracking.
///
/// Each step tries s = step0 * shrink^i, i = 0..max_shrinks, and accepts the
/// first candidate X+ = project(X - s g) with
///   f(X+) <= f(X) - c1 / s * ||X+ - X||_F^2,
/// which is the usual c1 s ||g||^2 test whenever the projection is inactive.
/// Stops when the relative decrease falls below tol, the projected step is
/// zero (stationary), or max_steps is reached. If no trial step decreases the
/// objective the current iterate is returned with `stalled` set.
DescentResult projected_descent(const Objective& objective, const Gradient& gradient, const Matrix& x0,
                                const Projection& project, const LineSearchParams& params = {});

}  // namespace kernels
}  // namespace hpl
