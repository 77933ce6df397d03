#pragma once

// Small helpers shared by the unit tests.

#include <cstdint>
#include <functional>
#include <random>

#include "hpl/kernels.hpp"
#include "hpl/model.hpp"

namespace hpl::test {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_unit_columns(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  return kernels::normalize_columns(random_matrix(rows, cols, rng));
}

inline Matrix random_in_ball(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.2, 1.0);
  Matrix m = random_unit_columns(rows, cols, rng);
  for (Eigen::Index j = 0; j < cols; ++j) m.col(j) *= unit(rng);
  return m;
}

inline Labels random_labels(int count, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, classes - 1);
  Labels labels(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) labels[static_cast<std::size_t>(i)] = i < classes ? i : pick(rng);
  return labels;
}

// Central finite-difference gradient of a scalar function of a matrix.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double saved = probe(i, j);
      probe(i, j) = saved + h;
      const double up = f(probe);
      probe(i, j) = saved - h;
      const double down = f(probe);
      probe(i, j) = saved;
      g(i, j) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

inline double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace hpl::test
