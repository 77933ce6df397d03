#include "hpl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hpl/error.hpp"
#include "hpl/kernels.hpp"

namespace hpl {

namespace {

constexpr double kUnitNormTol = 1e-10;
constexpr double kFeasibleTol = 1e-10;

void require_unit_columns(const Matrix& x, std::string_view what) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (std::abs(norm - 1.0) > kUnitNormTol) {
      std::ostringstream msg;
      msg << what << " column " << j << " has norm " << norm << ", expected unit norm";
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kTransductive: return "transductive";
    case Mode::kInductive: return "inductive";
    case Mode::kGzsl: return "gzsl";
  }
  return "unknown";
}

std::string_view to_string(InitKind kind) {
  switch (kind) {
    case InitKind::kClassMean: return "class-mean";
    case InitKind::kKmeans: return "kmeans";
    case InitKind::kSample: return "sample";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "transductive") return Mode::kTransductive;
  if (text == "inductive") return Mode::kInductive;
  if (text == "gzsl") return Mode::kGzsl;
  throw ValidationError("mode: unknown value '" + std::string(text) + "'");
}

InitKind parse_init_kind(std::string_view text) {
  if (text == "class-mean") return InitKind::kClassMean;
  if (text == "kmeans") return InitKind::kKmeans;
  if (text == "sample") return InitKind::kSample;
  throw ValidationError("init_strategy: unknown value '" + std::string(text) + "'");
}

void require_finite(const Matrix& m, std::string_view what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j))) {
        std::ostringstream msg;
        msg << what << " has a non-finite entry at row " << i + 1 << ", col " << j + 1 << " (1-based)";
        throw ValidationError(msg.str());
      }
    }
  }
}

Matrix one_hot(const Labels& labels, int num_classes) {
  Matrix c = Matrix::Zero(num_classes, static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw ValidationError("label out of range: sample " + std::to_string(i) + " has class " +
                            std::to_string(labels[i] + 1) + " but there are " + std::to_string(num_classes) +
                            " classes");
    }
    c(labels[i], static_cast<Eigen::Index>(i)) = 1.0;
  }
  return c;
}

Labels labels_from_one_hot(const Matrix& c) {
  Labels labels(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    Eigen::Index row = 0;
    c.col(j).maxCoeff(&row);
    if (c(row, j) != 1.0 || c.col(j).sum() != 1.0) {
      throw ValidationError("assignment column " + std::to_string(j) + " is not one-hot");
    }
    labels[static_cast<std::size_t>(j)] = static_cast<int>(row);
  }
  return labels;
}

LabeledFeatureSet LabeledFeatureSet::create(Matrix features, Labels labels, Matrix semantics,
                                            std::vector<std::string> class_names) {
  require_finite(features, "seen features");
  require_finite(semantics, "seen semantic prototypes");
  if (semantics.cols() == 0) throw ValidationError("seen semantic prototypes have no classes");
  if (static_cast<Eigen::Index>(labels.size()) != features.cols()) {
    throw ValidationError("seen labels: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(features.cols()) + " samples");
  }
  if (!class_names.empty() && static_cast<Eigen::Index>(class_names.size()) != semantics.cols()) {
    throw ValidationError("seen class names: count does not match the number of classes");
  }
  require_unit_columns(features, "seen features");

  const int m = static_cast<int>(semantics.cols());
  Matrix onehot = one_hot(labels, m);
  const Vector counts = onehot.rowwise().sum();
  for (int j = 0; j < m; ++j) {
    if (counts(j) == 0.0) {
      throw ValidationError("seen class " + std::to_string(j + 1) + " has zero samples");
    }
  }

  LabeledFeatureSet set;
  set.features_ = std::move(features);
  set.labels_ = std::move(labels);
  set.onehot_ = std::move(onehot);
  set.semantics_ = std::move(semantics);
  set.class_names_ = std::move(class_names);
  return set;
}

UnlabeledFeatureSet UnlabeledFeatureSet::create(Matrix features, Matrix semantics, std::optional<Labels> truth,
                                                TruthSpace truth_space, std::vector<std::string> class_names) {
  require_finite(features, "unseen features");
  require_finite(semantics, "unseen semantic prototypes");
  if (semantics.cols() == 0) throw ValidationError("unseen semantic prototypes have no classes");
  if (!class_names.empty() && static_cast<Eigen::Index>(class_names.size()) != semantics.cols()) {
    throw ValidationError("unseen class names: count does not match the number of classes");
  }
  require_unit_columns(features, "unseen features");
  if (truth) {
    if (static_cast<Eigen::Index>(truth->size()) != features.cols()) {
      throw ValidationError("unseen truth: " + std::to_string(truth->size()) + " labels for " +
                            std::to_string(features.cols()) + " samples");
    }
    for (std::size_t i = 0; i < truth->size(); ++i) {
      if ((*truth)[i] < 0) throw ValidationError("unseen truth: label out of range at sample " + std::to_string(i));
      if (truth_space == TruthSpace::kUnseen && (*truth)[i] >= semantics.cols()) {
        throw ValidationError("unseen truth: label out of range at sample " + std::to_string(i));
      }
    }
  }

  UnlabeledFeatureSet set;
  set.features_ = std::move(features);
  set.semantics_ = std::move(semantics);
  set.truth_ = std::move(truth);
  set.truth_space_ = truth_space;
  set.class_names_ = std::move(class_names);
  return set;
}

void validate_pair(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen) {
  if (seen.dim() != unseen.dim()) {
    throw ValidationError("feature dimension mismatch: seen d = " + std::to_string(seen.dim()) +
                          ", unseen d = " + std::to_string(unseen.dim()));
  }
  if (seen.semantic_dim() != unseen.semantic_dim()) {
    throw ValidationError("semantic dimension mismatch: seen k = " + std::to_string(seen.semantic_dim()) +
                          ", unseen k = " + std::to_string(unseen.semantic_dim()));
  }
  if (unseen.truth() && unseen.truth_space() == TruthSpace::kAll) {
    const int total = seen.num_classes() + unseen.num_classes();
    for (std::size_t i = 0; i < unseen.truth()->size(); ++i) {
      if ((*unseen.truth())[i] >= total) {
        throw ValidationError("unseen truth: label out of range at sample " + std::to_string(i));
      }
    }
  }
}

int HyperParams::num_super_prototypes(int total_classes) const {
  const auto q = static_cast<int>(std::lround(theta * total_classes));
  return std::max(1, q);
}

void HyperParams::validate() const {
  auto unit_interval = [](double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw ValidationError(std::string(name) + " must lie in [0, 1), got " + std::to_string(v));
    }
  };
  unit_interval(rho, "rho");
  unit_interval(omega, "omega");
  unit_interval(alpha, "alpha");
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw ValidationError("theta must lie in (0, 1], got " + std::to_string(theta));
  }
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (max_outer < 0) throw ValidationError("max_outer must be nonnegative");
  if (max_inner_unseen < 0) throw ValidationError("max_inner_unseen must be nonnegative");
  if (max_inner_seen < 0) throw ValidationError("max_inner_seen must be nonnegative");
  if (!(inner_tol >= 0.0)) throw ValidationError("inner_tol must be nonnegative");
  if (ridge_tau && !(*ridge_tau >= 0.0)) throw ValidationError("ridge_tau must be nonnegative");
  if (kmeans_restarts < 1) throw ValidationError("kmeans_restarts must be at least 1");
}

double encoding_cost(const Matrix& x, const Matrix& c, const Matrix& p) {
  if (x.cols() != c.cols() || p.rows() != x.rows() || p.cols() != c.rows()) {
    std::ostringstream msg;
    msg << "encoding cost shape mismatch: X " << x.rows() << "x" << x.cols() << ", C " << c.rows() << "x"
        << c.cols() << ", P " << p.rows() << "x" << p.cols();
    throw ValidationError(msg.str());
  }
  return (p.transpose() * x - c).squaredNorm() + (x - p * c).squaredNorm();
}

EncodingStats EncodingStats::of(const Matrix& x, const Matrix& c) {
  if (x.cols() != c.cols()) throw ValidationError("encoding statistics: X and C differ in sample count");
  EncodingStats st;
  st.xxt = kernels::gram(x);
  st.xct = x * c.transpose();
  st.counts = c.rowwise().sum();
  st.x_sq = x.squaredNorm();
  st.c_sq = c.squaredNorm();
  return st;
}

double EncodingStats::cost(const Matrix& p) const {
  if (p.rows() != xxt.rows() || p.cols() != xct.cols()) throw ValidationError("encoding statistics: P shape mismatch");
  // ||P^T X - C||^2 + ||X - P C||^2 with C one-hot, expanded around the cached products.
  const double value = (p.transpose() * xxt * p).trace() - 4.0 * p.cwiseProduct(xct).sum() + c_sq + x_sq +
                       p.colwise().squaredNorm().dot(counts);
  return std::max(0.0, value);
}

double encoding_cost_gzsl(const Matrix& xu, const Matrix& cu, const Matrix& ps, const Matrix& pu) {
  if (ps.rows() != pu.rows()) throw ValidationError("seen and unseen prototypes differ in dimension");
  if (cu.rows() != ps.cols() + pu.cols()) {
    throw ValidationError("GZSL assignment has " + std::to_string(cu.rows()) + " rows, expected " +
                          std::to_string(ps.cols() + pu.cols()));
  }
  Matrix joint(ps.rows(), ps.cols() + pu.cols());
  joint << ps, pu;
  return encoding_cost(xu, cu, joint);
}

double alignment_cost(const Matrix& p, const Matrix& y, const Matrix& dv, const Matrix& dc, const Matrix& z,
                      double lambda) {
  if (dv.cols() != z.rows() || dc.cols() != z.rows() || p.rows() != dv.rows() || y.rows() != dc.rows() ||
      p.cols() != z.cols() || y.cols() != z.cols()) {
    std::ostringstream msg;
    msg << "alignment cost shape mismatch: P " << p.rows() << "x" << p.cols() << ", Y " << y.rows() << "x"
        << y.cols() << ", D_v " << dv.rows() << "x" << dv.cols() << ", D_c " << dc.rows() << "x" << dc.cols()
        << ", Z " << z.rows() << "x" << z.cols();
    throw ValidationError(msg.str());
  }
  if (!(lambda >= 0.0)) throw ValidationError("alignment weight lambda must be nonnegative");
  return (p - dv * z).squaredNorm() + lambda * (y - dc * z).squaredNorm();
}

void require_feasible(const ModelState& state) {
  auto check = [](const Matrix& d, const char* name) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double norm = d.col(j).norm();
      if (norm > 1.0 + kFeasibleTol) {
        std::ostringstream msg;
        msg << name << " column " << j << " has norm " << norm << " outside the unit ball";
        throw ValidationError(msg.str());
      }
    }
  };
  check(state.Dv, "D_v");
  check(state.Dc, "D_c");
}

namespace {

double unseen_encoding(const ModelState& s, const UnlabeledFeatureSet& unseen, Mode mode) {
  if (mode == Mode::kGzsl) return encoding_cost_gzsl(unseen.features(), s.Cu, s.Ps, s.Pu);
  return encoding_cost_unseen(unseen.features(), s.Cu, s.Pu);
}

}  // namespace

double unseen_objective(const ModelState& state, const UnlabeledFeatureSet& unseen, const HyperParams& hp) {
  const double align = alignment_cost(state.Pu, unseen.semantics(), state.Dv, state.Dc, state.Zu, hp.lambda());
  if (hp.mode == Mode::kInductive) return align;
  return hp.beta() * unseen_encoding(state, unseen, hp.mode) + align;
}

double total_objective(const ModelState& state, const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen,
                       const HyperParams& hp) {
  require_feasible(state);
  const double enc_s = encoding_cost_seen(seen.features(), seen.onehot(), state.Ps);
  const double align_s = alignment_cost(state.Ps, seen.semantics(), state.Dv, state.Dc, state.Zs, hp.lambda());
  return hp.beta() * enc_s + align_s + hp.gamma() * unseen_objective(state, unseen, hp);
}

double seen_objective(const ModelState& state, const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen,
                      const HyperParams& hp) {
  const double lambda = hp.lambda();
  double value = hp.beta() * encoding_cost_seen(seen.features(), seen.onehot(), state.Ps) +
                 alignment_cost(state.Ps, seen.semantics(), state.Dv, state.Dc, state.Zs, lambda) +
                 hp.gamma() * alignment_cost(state.Pu, unseen.semantics(), state.Dv, state.Dc, state.Zu, lambda);
  if (hp.mode == Mode::kGzsl) {
    value += hp.gamma() * hp.beta() * unseen_encoding(state, unseen, hp.mode);
  }
  return value;
}

double reparameterized_seen_objective(const ModelState& state, const LabeledFeatureSet& seen,
                                      const UnlabeledFeatureSet& unseen, const HyperParams& hp) {
  const double rho = hp.rho;
  const double omega = hp.omega;
  const double alpha = hp.alpha;
  double value = rho * (1 - omega) * (1 - alpha) * encoding_cost_seen(seen.features(), seen.onehot(), state.Ps) +
                 (1 - rho) * (1 - omega) * (1 - alpha) * (state.Ps - state.Dv * state.Zs).squaredNorm() +
                 omega * (1 - rho) * (1 - alpha) * (seen.semantics() - state.Dc * state.Zs).squaredNorm() +
                 alpha * (1 - rho) * (1 - omega) * (state.Pu - state.Dv * state.Zu).squaredNorm() +
                 omega * alpha * (1 - rho) * (unseen.semantics() - state.Dc * state.Zu).squaredNorm();
  if (hp.mode == Mode::kGzsl) {
    value += alpha * rho * (1 - omega) * unseen_encoding(state, unseen, hp.mode);
  }
  return value;
}

}  // namespace hpl
