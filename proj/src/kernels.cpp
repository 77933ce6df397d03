#include "hpl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hpl/error.hpp"

namespace hpl::kernels {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSingularTol = 1e-12;

void require_square(const Matrix& a, const char* name) {
  if (a.rows() != a.cols()) {
    std::ostringstream msg;
    msg << name << " must be square, got " << a.rows() << "x" << a.cols();
    throw ValidationError(msg.str());
  }
}

Matrix rotate_and_divide(const Matrix& rotated, const Vector& lhs, const Vector& rhs) {
  Matrix out = rotated;
  for (Eigen::Index j = 0; j < rhs.size(); ++j) {
    for (Eigen::Index i = 0; i < lhs.size(); ++i) {
      const double denom = lhs(i) + rhs(j);
      if (!(denom > kSingularTol)) {
        std::ostringstream msg;
        msg << "Sylvester system is singular: eigenvalue pair (" << i << ", " << j << ") sums to " << denom;
        throw SingularityError(msg.str());
      }
      out(i, j) /= denom;
    }
  }
  return out;
}

}  // namespace

Matrix gram(const Matrix& x) {
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

double symmetry_defect(const Matrix& a) {
  return (a - a.transpose()).norm() / std::max(1.0, a.norm());
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  require_square(a, "symmetric operand");
  if (const double defect = symmetry_defect(a); defect > kSymmetryTol) {
    std::ostringstream msg;
    msg << "operand is not symmetric (relative defect " << defect << ")";
    throw ValidationError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw SingularityError("symmetric eigendecomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix solve_sylvester_spd(const SymmetricEigen& a, const SymmetricEigen& b, const Matrix& r) {
  if (r.rows() != a.values.size() || r.cols() != b.values.size()) {
    std::ostringstream msg;
    msg << "Sylvester right-hand side is " << r.rows() << "x" << r.cols() << ", expected " << a.values.size()
        << "x" << b.values.size();
    throw ValidationError(msg.str());
  }
  const Matrix rotated = a.vectors.transpose() * r * b.vectors;
  return a.vectors * rotate_and_divide(rotated, a.values, b.values) * b.vectors.transpose();
}

Matrix solve_sylvester_spd(const Matrix& a, const Matrix& b, const Matrix& r) {
  return solve_sylvester_spd(symmetric_eigen(a), symmetric_eigen(b), r);
}

Matrix solve_sylvester_diagonal(const SymmetricEigen& a, const Vector& b_diag, const Matrix& r) {
  if (r.rows() != a.values.size() || r.cols() != b_diag.size()) {
    std::ostringstream msg;
    msg << "Sylvester right-hand side is " << r.rows() << "x" << r.cols() << ", expected " << a.values.size()
        << "x" << b_diag.size();
    throw ValidationError(msg.str());
  }
  const Matrix rotated = a.vectors.transpose() * r;
  return a.vectors * rotate_and_divide(rotated, a.values, b_diag);
}

Matrix gram_ridge_solve(const Matrix& g, const Matrix& r, double tau) {
  require_square(g, "Gram matrix");
  if (r.rows() != g.rows()) {
    throw ValidationError("ridge right-hand side has " + std::to_string(r.rows()) + " rows, expected " +
                          std::to_string(g.rows()));
  }
  if (!(tau >= 0.0)) throw ValidationError("ridge parameter tau must be nonnegative");
  if (const double defect = symmetry_defect(g); defect > kSymmetryTol) {
    throw ValidationError("Gram matrix is not symmetric");
  }
  if (g.rows() == 0) return Matrix(0, r.cols());

  Matrix system = g;
  system.diagonal().array() += tau;
  Eigen::LDLT<Matrix> ldlt(system);
  const Vector pivots = ldlt.vectorD();
  const double scale = std::max(pivots.cwiseAbs().maxCoeff(), 1e-300);
  if (ldlt.info() != Eigen::Success || pivots.minCoeff() <= 1e-14 * scale) {
    std::ostringstream msg;
    msg << "Gram system is numerically singular (tau = " << tau << "); use a larger ridge tau";
    throw SingularityError(msg.str());
  }
  return ldlt.solve(r);
}

Matrix project_columns_unit_ball(Matrix m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm > 1.0) m.col(j) /= norm;
  }
  return m;
}

Matrix normalize_columns(Matrix m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (!(norm >= 1e-12)) {
      throw ValidationError("column " + std::to_string(j) + " has near-zero norm and cannot be normalized");
    }
    m.col(j) /= norm;
  }
  return m;
}

DescentResult projected_descent(const Objective& objective, const Gradient& gradient, const Matrix& x0,
                                const Projection& project, const LineSearchParams& params) {
  if (!(params.shrink > 0.0 && params.shrink < 1.0)) throw ValidationError("shrink must lie in (0, 1)");
  if (!(params.c1 > 0.0 && params.c1 < 1.0)) throw ValidationError("c1 must lie in (0, 1)");
  if (!(params.step0 > 0.0)) throw ValidationError("step0 must be positive");

  DescentResult result;
  result.x = x0;
  double f = objective(result.x);
  result.trace.push_back(f);

  for (int step = 0; step < params.max_steps; ++step) {
    const Matrix g = gradient(result.x);
    if (g.squaredNorm() == 0.0) {
      result.stationary = true;
      break;
    }

    bool accepted = false;
    Matrix candidate;
    double f_candidate = f;
    double s = params.step0;
    for (int i = 0; i <= params.max_shrinks; ++i, s *= params.shrink) {
      candidate = project(result.x - s * g);
      const double moved = (candidate - result.x).squaredNorm();
      if (moved == 0.0) {
        result.stationary = true;
        break;
      }
      f_candidate = objective(candidate);
      if (f_candidate <= f - params.c1 / s * moved) {
        accepted = true;
        break;
      }
    }
    if (result.stationary) break;
    if (!accepted) {
      result.stalled = true;
      break;
    }

    const double decrease = f - f_candidate;
    result.x = std::move(candidate);
    f = f_candidate;
    result.trace.push_back(f);
    ++result.steps;
    if (decrease <= params.tol * std::abs(result.trace[result.trace.size() - 2])) break;
  }
  return result;
}

}  // namespace hpl::kernels
