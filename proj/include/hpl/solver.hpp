#pragma once

// Block-coordinate minimization of the hierarchical prototype objective.
//
// The unseen subproblem alternates C_u -> P_u -> Z_u; the seen subproblem
// alternates Z_s -> P_s -> D_v -> D_c. fit() interleaves the two, unseen first,
// until the super-prototypes stop moving.
//
// Stationarity conditions used by the closed-form blocks:
//   Z:   (D_v^T D_v + lambda D_c^T D_c + tau I) Z = D_v^T P + lambda D_c^T Y
//   P:   (X X^T) P + P (C C^T + I / beta) = 2 X C^T + D_v Z / beta
//   D:   projected descent on ||T_s - D Z_s||^2 + gamma ||T_u - D Z_u||^2

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hpl/model.hpp"

namespace hpl {

struct SolveReport {
  int inner_iterations = 0;
  // Objective before the first sweep, then after every sweep.
  std::vector<double> objective_trace;
  bool stalled = false;
};

struct UnseenBlock {
  Matrix Pu;
  Matrix Cu;
  Matrix Zu;
};

struct SeenBlock {
  Matrix Ps;
  Matrix Zs;
  Matrix Dv;
  Matrix Dc;
};

// Called after every individual block update with the block name
// ("C_u", "P_u", "Z_u", "Z_s", "P_s", "D_v", "D_c") and the current state.
using BlockObserver = std::function<void(std::string_view block, const ModelState& state)>;

/// 1e-8 * trace(gram) / q, or 1e-8 when the Gram matrix is zero.
double default_ridge_tau(const Matrix& gram);

/// hp.ridge_tau when set, otherwise default_ridge_tau(gram).
double resolve_ridge_tau(const HyperParams& hp, const Matrix& gram);

Matrix update_Z(const Matrix& p, const Matrix& y, const Matrix& dv, const Matrix& dc, double lambda, double tau);

/// Prototype update minimizing beta [||P^T X - C||^2 + ||X - P C||^2] + ||P - D_v Z||^2.
/// beta = 0 returns D_v Z.
Matrix update_P_sylvester(const Matrix& x, const Matrix& c, const Matrix& dv, const Matrix& z, double beta);

/// Per-sample encoding cost of every one-hot candidate: entry (j, i) is
/// ||P^T x_i - e_j||^2 + ||x_i - p_j||^2.
Matrix assignment_costs(const Matrix& x, const Matrix& p);

/// Column-wise argmin of assignment_costs, ties to the smallest class index.
Labels assign_labels(const Matrix& x, const Matrix& p);

Matrix update_Cu(const Matrix& xu, const Matrix& pu);

/// Assignment over all m + n classes with prototypes [P_s, P_u].
Matrix update_Cu_gzsl(const Matrix& xu, const Matrix& ps, const Matrix& pu);

/// Unseen prototype update with samples encoded through [P_s, P_u] and P_s held fixed.
Matrix update_Pu_gzsl(const Matrix& xu, const Matrix& cu, const Matrix& ps, const Matrix& dv, const Matrix& zu,
                      double beta);

struct DictionaryUpdate {
  Matrix D;
  SolveReport report;
};

/// Projected descent on ||T_s - D Z_s||^2 + gamma ||T_u - D Z_u||^2 with unit-ball columns.
DictionaryUpdate update_D(const Matrix& d, const Matrix& zs, const Matrix& zu, const Matrix& ts, const Matrix& tu,
                          double gamma, const kernels::LineSearchParams& ls = {});

// Analytic gradients of the block objectives, for stationarity checks.

/// d/dZ of ||P - D_v Z||^2 + lambda ||Y - D_c Z||^2 + tau ||Z||^2.
Matrix code_gradient(const Matrix& p, const Matrix& y, const Matrix& dv, const Matrix& dc, const Matrix& z,
                     double lambda, double tau);

/// d/dP of beta [||P^T X - C||^2 + ||X - P C||^2] + ||P - D_v Z||^2.
Matrix prototype_gradient(const Matrix& x, const Matrix& c, const Matrix& dv, const Matrix& z, double beta,
                          const Matrix& p);

/// d/dP_u of beta encoding_cost_gzsl(X_u, C_u, P_s, P_u) + ||P_u - D_v Z_u||^2.
Matrix prototype_gradient_gzsl(const Matrix& xu, const Matrix& cu, const Matrix& ps, const Matrix& dv,
                               const Matrix& zu, double beta, const Matrix& pu);

/// d/dD of ||T_s - D Z_s||^2 + gamma ||T_u - D Z_u||^2.
Matrix dictionary_gradient(const Matrix& d, const Matrix& zs, const Matrix& zu, const Matrix& ts, const Matrix& tu,
                           double gamma);

struct InductivePrediction {
  Matrix Pu;
  Matrix Zu;
  Matrix Cu;
};

/// Closed-form minimizer of the unseen alignment cost alone: Z_u from the
/// semantic ridge fit, P_u = D_v Z_u, C_u by minimum encoding cost.
InductivePrediction predict_inductive(const Matrix& dv, const Matrix& dc, const Matrix& yu, const Matrix& xu,
                                      double lambda, double tau);

/// Super-prototypes from k-means over all semantic prototypes, seen
/// prototypes from the configured strategy, and codes/unseen block from one
/// closed-form pass.
ModelState init_state(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp);

struct UnseenSolve {
  UnseenBlock block;
  SolveReport report;
};

/// Minimizes the unseen subproblem for fixed super-prototypes. `ps` is only
/// read in GZSL mode. Without a warm start the inductive prediction is used.
UnseenSolve solve_unseen(const Matrix& dv, const Matrix& dc, const Matrix& ps, const UnlabeledFeatureSet& unseen,
                         const HyperParams& hp, const std::optional<UnseenBlock>& warm = std::nullopt,
                         const BlockObserver& observer = {});

struct SeenSolve {
  SeenBlock block;
  SolveReport report;
};

/// Minimizes the seen-side objective with the unseen block fixed. Without a
/// warm start the seen part of init_state is used.
SeenSolve solve_seen(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const UnseenBlock& fixed,
                     const HyperParams& hp, const std::optional<SeenBlock>& warm = std::nullopt,
                     const BlockObserver& observer = {});

/// Runs the inductive outer loop (same caps and tolerances as hp) from `state`
/// so that the first transductive assignment comes from a dictionary fitted
/// to the seen classes. In GZSL mode C_u is re-assigned over all m + n classes.
void warm_start_inductive(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp,
                          ModelState& state);

struct FitResult {
  ModelState state;
  FitHistory history;
};

/// init_state, then (transductive and GZSL modes, when hp.inductive_warm_start)
/// warm_start_inductive, then the outer alternation. The observer sees "init"
/// once before the first outer iteration.
FitResult fit(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp,
              const BlockObserver& observer = {});

/// 0-based predicted labels from the final assignment.
Labels predicted_labels(const ModelState& state);

}  // namespace hpl
