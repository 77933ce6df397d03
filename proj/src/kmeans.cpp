#include "hpl/kmeans.hpp"

#include <limits>
#include <random>

#include "hpl/error.hpp"

namespace hpl {

namespace {

double squared_distance(const Matrix& points, Eigen::Index i, const Matrix& centroids, Eigen::Index c) {
  return (points.col(i) - centroids.col(c)).squaredNorm();
}

Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.cols();
  Matrix centroids(points.rows(), k);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.col(0) = points.col(first(rng));

  Vector nearest(n);
  for (Eigen::Index i = 0; i < n; ++i) nearest(i) = squared_distance(points, i, centroids, 0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= nearest(i);
        if (target < 0.0 && nearest(i) > 0.0) {
          pick = i;
          break;
        }
      }
      // Never choose a point that already coincides with a centroid.
      while (nearest(pick) == 0.0 && pick > 0) --pick;
    }
    centroids.col(c) = points.col(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), squared_distance(points, i, centroids, c));
    }
  }
  return centroids;
}

KmeansResult lloyd(const Matrix& points, Matrix centroids, int max_iter) {
  const Eigen::Index n = points.cols();
  const Eigen::Index k = centroids.cols();
  KmeansResult result;
  result.assignment.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = squared_distance(points, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (result.assignment[static_cast<std::size_t>(i)] != best) {
        result.assignment[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Matrix sums = Matrix::Zero(points.rows(), k);
    Vector counts = Vector::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = result.assignment[static_cast<std::size_t>(i)];
      sums.col(c) += points.col(i);
      counts(c) += 1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts(c) > 0.0) {
        centroids.col(c) = sums.col(c) / counts(c);
        continue;
      }
      // Empty cluster: move it to the point farthest from its centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = squared_distance(points, i, centroids, result.assignment[static_cast<std::size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids.col(c) = points.col(far);
    }
  }

  result.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.inertia += squared_distance(points, i, centroids, result.assignment[static_cast<std::size_t>(i)]);
  }
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed, int max_iter) {
  if (k < 1 || k > points.cols()) {
    throw ValidationError("kmeans: k = " + std::to_string(k) + " must lie in [1, " +
                          std::to_string(points.cols()) + "]");
  }
  if (restarts < 1) throw ValidationError("kmeans: restarts must be at least 1");

  std::mt19937_64 rng(seed);
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KmeansResult trial = lloyd(points, seed_plus_plus(points, k, rng), max_iter);
    if (trial.inertia < best.inertia) best = std::move(trial);
  }
  return best;
}

}  // namespace hpl
