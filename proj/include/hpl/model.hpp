#pragma once

// Datasets, hyperparameters, model state and the cost terms of the
// hierarchical prototype objective.
//
// Class indices are 0-based in memory. Files and the CLI use 1-based labels.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpl/kernels.hpp"

namespace hpl {

using Labels = std::vector<int>;

enum class Mode { kTransductive, kInductive, kGzsl };
enum class InitKind { kClassMean, kKmeans, kSample };

std::string_view to_string(Mode mode);
std::string_view to_string(InitKind kind);
Mode parse_mode(std::string_view text);
InitKind parse_init_kind(std::string_view text);

/// Throws ValidationError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

/// r x N indicator matrix with a single 1 per column at row labels[i].
Matrix one_hot(const Labels& labels, int num_classes);

/// Row index of the 1 in every column of a one-hot matrix.
Labels labels_from_one_hot(const Matrix& c);

// Seen-class training data: features (d x N_s, unit columns), labels in
// [0, m), one-hot indicator (m x N_s) and semantic prototypes (k x m).
class LabeledFeatureSet {
 public:
  static LabeledFeatureSet create(Matrix features, Labels labels, Matrix semantics,
                                  std::vector<std::string> class_names = {});

  const Matrix& features() const { return features_; }
  const Labels& labels() const { return labels_; }
  const Matrix& onehot() const { return onehot_; }
  const Matrix& semantics() const { return semantics_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  int dim() const { return static_cast<int>(features_.rows()); }
  int semantic_dim() const { return static_cast<int>(semantics_.rows()); }
  int num_classes() const { return static_cast<int>(semantics_.cols()); }
  int num_samples() const { return static_cast<int>(features_.cols()); }

 private:
  Matrix features_;
  Labels labels_;
  Matrix onehot_;
  Matrix semantics_;
  std::vector<std::string> class_names_;
};

// Which label space held-out truth refers to.
enum class TruthSpace { kUnseen, kAll };

// Unseen-class test data: features (d x N_u, unit columns), semantic
// prototypes (k x n) and optional truth for evaluation. Truth lies in [0, n)
// for TruthSpace::kUnseen and in [0, m + n) for TruthSpace::kAll, where seen
// classes come first.
class UnlabeledFeatureSet {
 public:
  static UnlabeledFeatureSet create(Matrix features, Matrix semantics, std::optional<Labels> truth = std::nullopt,
                                    TruthSpace truth_space = TruthSpace::kUnseen,
                                    std::vector<std::string> class_names = {});

  const Matrix& features() const { return features_; }
  const Matrix& semantics() const { return semantics_; }
  const std::optional<Labels>& truth() const { return truth_; }
  TruthSpace truth_space() const { return truth_space_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  int dim() const { return static_cast<int>(features_.rows()); }
  int semantic_dim() const { return static_cast<int>(semantics_.rows()); }
  int num_classes() const { return static_cast<int>(semantics_.cols()); }
  int num_samples() const { return static_cast<int>(features_.cols()); }

 private:
  Matrix features_;
  Matrix semantics_;
  std::optional<Labels> truth_;
  TruthSpace truth_space_ = TruthSpace::kUnseen;
  std::vector<std::string> class_names_;
};

/// Checks that the two sets share d and k, and that truth fits the seen class count.
void validate_pair(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen);

struct HyperParams {
  // Tuning surface. beta, lambda, gamma are derived as x / (1 - x).
  double rho = 0.6;
  double omega = 0.5;
  double alpha = 0.6;
  double theta = 0.3;  // super-prototypes as a fraction of m + n
  Mode mode = Mode::kTransductive;

  double epsilon = 1e-4;
  int max_outer = 100;
  int max_inner_unseen = 50;
  int max_inner_seen = 50;
  double inner_tol = 1e-6;
  // Ridge added to every Gram solve. Unset means 1e-8 * trace(G) / q.
  std::optional<double> ridge_tau;

  InitKind init = InitKind::kClassMean;
  // Transductive and GZSL fits start from an inductive fit of the dictionaries.
  bool inductive_warm_start = true;
  int kmeans_restarts = 5;
  unsigned long long seed = 0;

  kernels::LineSearchParams line_search;

  double beta() const { return rho / (1.0 - rho); }
  double lambda() const { return omega / (1.0 - omega); }
  double gamma() const { return alpha / (1.0 - alpha); }
  int num_super_prototypes(int total_classes) const;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct ModelState {
  Matrix Ps;  // d x m
  Matrix Pu;  // d x n
  Matrix Dv;  // d x q
  Matrix Dc;  // k x q
  Matrix Zs;  // q x m
  Matrix Zu;  // q x n
  Matrix Cu;  // n x N_u, or (m + n) x N_u in GZSL mode
};

struct FitHistory {
  std::vector<double> objective_per_outer;
  std::vector<double> err1_per_outer;
  std::vector<double> err2_per_outer;
  int outer_iterations = 0;
  bool converged = false;
};

// ---------------------------------------------------------------------------
// Cost terms.
// ---------------------------------------------------------------------------

/// sum_i ||P^T x_i - c_i||^2 + ||x_i - P c_i||^2 over the columns of X and C.
double encoding_cost(const Matrix& x, const Matrix& c, const Matrix& p);

inline double encoding_cost_seen(const Matrix& xs, const Matrix& cs, const Matrix& ps) {
  return encoding_cost(xs, cs, ps);
}
inline double encoding_cost_unseen(const Matrix& xu, const Matrix& cu, const Matrix& pu) {
  return encoding_cost(xu, cu, pu);
}

/// Sufficient statistics of a fixed (X, C) pair. cost(P) equals encoding_cost(X, C, P)
/// at O(d^2 c) per call instead of O(d c N).
struct EncodingStats {
  Matrix xxt;     // X X^T
  Matrix xct;     // X C^T
  Vector counts;  // row sums of C
  double x_sq = 0.0;
  double c_sq = 0.0;

  static EncodingStats of(const Matrix& x, const Matrix& c);
  double cost(const Matrix& p) const;
};

/// Encoding of X_u through the concatenated prototypes [P_s, P_u]; C_u is (m + n) x N_u.
double encoding_cost_gzsl(const Matrix& xu, const Matrix& cu, const Matrix& ps, const Matrix& pu);

/// ||P - D_v Z||_F^2 + lambda ||Y - D_c Z||_F^2.
double alignment_cost(const Matrix& p, const Matrix& y, const Matrix& dv, const Matrix& dc, const Matrix& z,
                      double lambda);

/// Largest column norm of D_v and D_c must not exceed 1 + 1e-10.
void require_feasible(const ModelState& state);

/// Full objective beta Phi_enc,s + Phi_alig,s + gamma (beta Phi_enc,u + Phi_alig,u).
///
/// GZSL mode encodes X_u through [P_s, P_u]; inductive mode drops the unseen
/// encoding term. Throws ValidationError if a super-prototype leaves the unit ball.
double total_objective(const ModelState& state, const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen,
                       const HyperParams& hp);

/// The objective of the unseen subproblem: beta Phi_enc,u + Phi_alig,u for the current mode.
double unseen_objective(const ModelState& state, const UnlabeledFeatureSet& unseen, const HyperParams& hp);

/// Every term of total_objective that depends on P_s, Z_s, D_v or D_c, in the
/// (beta, lambda, gamma) weighting.
double seen_objective(const ModelState& state, const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen,
                      const HyperParams& hp);

/// The same seen-side objective weighted directly by (rho, omega, alpha).
/// Equals seen_objective * (1 - rho)(1 - omega)(1 - alpha).
double reparameterized_seen_objective(const ModelState& state, const LabeledFeatureSet& seen,
                                      const UnlabeledFeatureSet& unseen, const HyperParams& hp);

}  // namespace hpl
