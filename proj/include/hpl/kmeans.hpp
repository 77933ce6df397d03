#pragma once

#include <cstdint>

#include "hpl/kernels.hpp"
#include "hpl/model.hpp"

namespace hpl {

struct KmeansResult {
  Matrix centroids;  // dim x k
  Labels assignment;
  double inertia = 0.0;
};

/// Lloyd's algorithm over the columns of `points` with k-means++ seeding.
///
/// Runs `restarts` independently seeded trials and keeps the one with the
/// lowest inertia (earliest trial on ties). Deterministic for a fixed seed.
KmeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed, int max_iter = 100);

}  // namespace hpl
