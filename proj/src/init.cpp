#include <random>

#include "hpl/error.hpp"
#include "hpl/kmeans.hpp"
#include "hpl/solver.hpp"

namespace hpl {

namespace {

std::vector<std::vector<Eigen::Index>> members_by_class(const LabeledFeatureSet& seen) {
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(seen.num_classes()));
  for (std::size_t i = 0; i < seen.labels().size(); ++i) {
    members[static_cast<std::size_t>(seen.labels()[i])].push_back(static_cast<Eigen::Index>(i));
  }
  return members;
}

Matrix gather(const Matrix& x, const std::vector<Eigen::Index>& columns) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = x.col(columns[i]);
  return out;
}

Matrix initial_seen_prototypes(const LabeledFeatureSet& seen, const HyperParams& hp) {
  const auto members = members_by_class(seen);
  const Matrix& xs = seen.features();
  Matrix ps(seen.dim(), seen.num_classes());
  std::mt19937_64 rng(hp.seed);

  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    const Matrix samples = gather(xs, members[c]);
    switch (hp.init) {
      case InitKind::kClassMean:
        ps.col(col) = samples.rowwise().mean();
        break;
      case InitKind::kSample: {
        std::uniform_int_distribution<Eigen::Index> pick(0, samples.cols() - 1);
        ps.col(col) = samples.col(pick(rng));
        break;
      }
      case InitKind::kKmeans: {
        // Centroid of the dominant within-class cluster; robust to a stray mode.
        const int k = std::min<int>(2, static_cast<int>(samples.cols()));
        const KmeansResult km = kmeans(samples, k, hp.kmeans_restarts, hp.seed + c);
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int a : km.assignment) ++sizes[static_cast<std::size_t>(a)];
        const auto largest = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();
        ps.col(col) = km.centroids.col(largest);
        break;
      }
    }
  }
  return kernels::normalize_columns(std::move(ps));
}

}  // namespace

ModelState init_state(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp) {
  hp.validate();
  validate_pair(seen, unseen);
  const int m = seen.num_classes();
  const int n = unseen.num_classes();
  const int q = hp.num_super_prototypes(m + n);
  if (q > m + n) {
    throw ValidationError("number of super-prototypes q = " + std::to_string(q) + " exceeds m + n = " +
                          std::to_string(m + n));
  }

  ModelState state;
  state.Ps = initial_seen_prototypes(seen, hp);

  Matrix semantics(seen.semantic_dim(), m + n);
  semantics << seen.semantics(), unseen.semantics();
  const KmeansResult clusters = kmeans(semantics, q, hp.kmeans_restarts, hp.seed);
  state.Dc = kernels::project_columns_unit_ball(clusters.centroids);

  // Visual super-prototypes average the seen prototypes of each semantic cluster.
  Matrix dv = Matrix::Zero(seen.dim(), q);
  Vector counts = Vector::Zero(q);
  for (int c = 0; c < m; ++c) {
    const int cluster = clusters.assignment[static_cast<std::size_t>(c)];
    dv.col(cluster) += state.Ps.col(c);
    counts(cluster) += 1.0;
  }
  const Vector global_mean = state.Ps.rowwise().mean();
  for (int j = 0; j < q; ++j) {
    if (counts(j) > 0.0) {
      dv.col(j) /= counts(j);
    } else {
      dv.col(j) = global_mean;
    }
  }
  state.Dv = kernels::project_columns_unit_ball(std::move(dv));

  const double lambda = hp.lambda();
  {
    Matrix g = kernels::gram(state.Dv.transpose()) + lambda * kernels::gram(state.Dc.transpose());
    state.Zs = update_Z(state.Ps, seen.semantics(), state.Dv, state.Dc, lambda, resolve_ridge_tau(hp, g));
  }

  const Matrix g_sem = lambda * kernels::gram(state.Dc.transpose());
  InductivePrediction pred = predict_inductive(state.Dv, state.Dc, unseen.semantics(), unseen.features(), lambda,
                                               resolve_ridge_tau(hp, g_sem));
  state.Pu = std::move(pred.Pu);
  state.Zu = std::move(pred.Zu);
  state.Cu = hp.mode == Mode::kGzsl ? update_Cu_gzsl(unseen.features(), state.Ps, state.Pu) : std::move(pred.Cu);
  return state;
}

}  // namespace hpl
