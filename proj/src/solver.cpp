#include "hpl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hpl/error.hpp"

namespace hpl {

using kernels::SymmetricEigen;

namespace {

constexpr int kStallPatience = 5;

Matrix code_gram(const Matrix& dv, const Matrix& dc, double lambda) {
  Matrix g = kernels::gram(dv.transpose());
  if (lambda != 0.0) g += lambda * kernels::gram(dc.transpose());
  return g;
}

Matrix concat_columns(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

bool small_decrease(double previous, double current, double tol) {
  return previous - current <= tol * std::abs(previous);
}

// Prototype system (A) P + P diag(b) = R with A given by its eigendecomposition.
// beta = 0 collapses to the alignment-only minimizer P = D_v Z.
Matrix solve_prototypes(const SymmetricEigen& a, const Vector& counts, const Matrix& rhs_data, const Matrix& dv_z,
                        double beta) {
  if (beta == 0.0) return dv_z;
  const Vector diag = counts.array() + 1.0 / beta;
  return kernels::solve_sylvester_diagonal(a, diag, rhs_data + dv_z / beta);
}

void check_dictionary_shapes(const Matrix& dv, const Matrix& dc) {
  if (dv.cols() != dc.cols()) {
    throw ValidationError("D_v and D_c must have the same number of super-prototypes (" +
                          std::to_string(dv.cols()) + " vs " + std::to_string(dc.cols()) + ")");
  }
}

// Mutable view over a ModelState while one of the subproblems runs. Caches
// the eigendecompositions of the fixed data Gram matrices.
class Engine {
 public:
  Engine(const LabeledFeatureSet* seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp,
         ModelState& state, const BlockObserver& observer)
      : seen_(seen), unseen_(unseen), hp_(hp), state_(state), observer_(observer) {}

  SolveReport solve_unseen() {
    SolveReport report;
    const Mode mode = hp_.mode;
    double previous = unseen_objective(state_, unseen_, hp_);
    report.objective_trace.push_back(previous);

    for (int iter = 0; iter < hp_.max_inner_unseen; ++iter) {
      if (mode == Mode::kInductive) {
        inductive_step();
      } else {
        transductive_step();
      }
      const double current = unseen_objective(state_, unseen_, hp_);
      report.objective_trace.push_back(current);
      ++report.inner_iterations;
      // The inductive subproblem is solved exactly in one pass.
      if (mode == Mode::kInductive || small_decrease(previous, current, hp_.inner_tol)) break;
      previous = current;
    }
    return report;
  }

  SolveReport solve_seen() {
    SolveReport report;
    double previous = seen_block_objective();
    report.objective_trace.push_back(previous);

    for (int iter = 0; iter < hp_.max_inner_seen; ++iter) {
      const double gamma = hp_.gamma();

      state_.Zs = codes(state_.Ps, seen_->semantics());
      notify("Z_s");

      state_.Ps = seen_prototypes();
      notify("P_s");

      DictionaryUpdate dv = update_D(state_.Dv, state_.Zs, state_.Zu, state_.Ps, state_.Pu, gamma, hp_.line_search);
      state_.Dv = std::move(dv.D);
      notify("D_v");

      DictionaryUpdate dc = update_D(state_.Dc, state_.Zs, state_.Zu, seen_->semantics(), unseen_.semantics(),
                                     gamma, hp_.line_search);
      state_.Dc = std::move(dc.D);
      notify("D_c");

      report.stalled = report.stalled || dv.report.stalled || dc.report.stalled;
      const double current = seen_block_objective();
      report.objective_trace.push_back(current);
      ++report.inner_iterations;
      if (small_decrease(previous, current, hp_.inner_tol)) break;
      previous = current;
    }
    return report;
  }

 private:
  void notify(std::string_view block) {
    if (observer_) observer_(block, state_);
  }

  const EncodingStats& seen_stats() {
    if (!seen_stats_) seen_stats_ = EncodingStats::of(seen_->features(), seen_->onehot());
    return *seen_stats_;
  }

  // seen_objective with the seen encoding evaluated from cached statistics.
  double seen_block_objective() {
    const double lambda = hp_.lambda();
    const double gamma = hp_.gamma();
    double value = hp_.beta() * seen_stats().cost(state_.Ps) +
                   alignment_cost(state_.Ps, seen_->semantics(), state_.Dv, state_.Dc, state_.Zs, lambda) +
                   gamma * alignment_cost(state_.Pu, unseen_.semantics(), state_.Dv, state_.Dc, state_.Zu, lambda);
    if (hp_.mode == Mode::kGzsl) {
      value += gamma * hp_.beta() * encoding_cost_gzsl(unseen_.features(), state_.Cu, state_.Ps, state_.Pu);
    }
    return value;
  }

  Matrix codes(const Matrix& p, const Matrix& y) const {
    const double lambda = hp_.lambda();
    const Matrix g = code_gram(state_.Dv, state_.Dc, lambda);
    Matrix rhs = state_.Dv.transpose() * p;
    if (lambda != 0.0) rhs += lambda * state_.Dc.transpose() * y;
    return kernels::gram_ridge_solve(g, rhs, resolve_ridge_tau(hp_, g));
  }

  const SymmetricEigen& unseen_gram() {
    if (!unseen_eig_) unseen_eig_ = kernels::symmetric_eigen(kernels::gram(unseen_.features()));
    return *unseen_eig_;
  }

  const SymmetricEigen& seen_gram() {
    if (!seen_eig_) {
      Matrix a = seen_stats().xxt;
      if (hp_.mode == Mode::kGzsl) a += hp_.gamma() * kernels::gram(unseen_.features());
      seen_eig_ = kernels::symmetric_eigen(a);
    }
    return *seen_eig_;
  }

  void transductive_step() {
    const Matrix& xu = unseen_.features();
    const double beta = hp_.beta();
    const bool gzsl = hp_.mode == Mode::kGzsl;

    state_.Cu = gzsl ? update_Cu_gzsl(xu, state_.Ps, state_.Pu) : update_Cu(xu, state_.Pu);
    notify("C_u");

    const Matrix dv_z = state_.Dv * state_.Zu;
    if (gzsl) {
      const Eigen::Index m = state_.Ps.cols();
      const Eigen::Index n = state_.Pu.cols();
      const Matrix c_seen = state_.Cu.topRows(m);
      const Matrix c_unseen = state_.Cu.bottomRows(n);
      const Matrix rhs = xu * c_unseen.transpose() + (xu - state_.Ps * c_seen) * c_unseen.transpose();
      state_.Pu = solve_prototypes(unseen_gram(), c_unseen.rowwise().sum(), rhs, dv_z, beta);
    } else {
      const Matrix rhs = 2.0 * xu * state_.Cu.transpose();
      state_.Pu = solve_prototypes(unseen_gram(), state_.Cu.rowwise().sum(), rhs, dv_z, beta);
    }
    notify("P_u");

    state_.Zu = codes(state_.Pu, unseen_.semantics());
    notify("Z_u");
  }

  void inductive_step() {
    const double lambda = hp_.lambda();
    const Matrix g = lambda * kernels::gram(state_.Dc.transpose());
    InductivePrediction pred = predict_inductive(state_.Dv, state_.Dc, unseen_.semantics(), unseen_.features(),
                                                 lambda, resolve_ridge_tau(hp_, g));
    // Z_u and P_u = D_v Z_u move together; the pair is the exact block minimizer.
    state_.Zu = std::move(pred.Zu);
    state_.Pu = std::move(pred.Pu);
    notify("Z_u");
    state_.Cu = std::move(pred.Cu);
    notify("C_u");
  }

  // Stationary point of the seen-side objective in P_s. In GZSL mode the
  // unseen samples assigned to seen classes also pull on P_s.
  Matrix seen_prototypes() {
    const double beta = hp_.beta();
    const Matrix dv_z = state_.Dv * state_.Zs;
    Matrix rhs = 2.0 * seen_stats().xct;
    Vector counts = seen_stats().counts;
    if (hp_.mode == Mode::kGzsl) {
      const double gamma = hp_.gamma();
      const Matrix& xu = unseen_.features();
      const Eigen::Index m = state_.Ps.cols();
      const Eigen::Index n = state_.Pu.cols();
      const Matrix c_seen = state_.Cu.topRows(m);
      const Matrix c_unseen = state_.Cu.bottomRows(n);
      rhs += gamma * (xu * c_seen.transpose() + (xu - state_.Pu * c_unseen) * c_seen.transpose());
      counts += gamma * c_seen.rowwise().sum();
    }
    return solve_prototypes(seen_gram(), counts, rhs, dv_z, beta);
  }

  const LabeledFeatureSet* seen_;
  const UnlabeledFeatureSet& unseen_;
  const HyperParams& hp_;
  ModelState& state_;
  const BlockObserver& observer_;
  std::optional<SymmetricEigen> unseen_eig_;
  std::optional<SymmetricEigen> seen_eig_;
  std::optional<EncodingStats> seen_stats_;
};

}  // namespace

double default_ridge_tau(const Matrix& gram) {
  if (gram.rows() == 0) return 0.0;
  const double trace = gram.trace();
  if (!(trace > 0.0)) return 1e-8;
  return 1e-8 * trace / static_cast<double>(gram.rows());
}

double resolve_ridge_tau(const HyperParams& hp, const Matrix& gram) {
  return hp.ridge_tau ? *hp.ridge_tau : default_ridge_tau(gram);
}

Matrix update_Z(const Matrix& p, const Matrix& y, const Matrix& dv, const Matrix& dc, double lambda, double tau) {
  check_dictionary_shapes(dv, dc);
  if (p.rows() != dv.rows() || y.rows() != dc.rows() || p.cols() != y.cols()) {
    throw ValidationError("update_Z: targets do not conform to the super-prototypes");
  }
  if (!(lambda >= 0.0)) throw ValidationError("update_Z: lambda must be nonnegative");
  Matrix rhs = dv.transpose() * p;
  if (lambda != 0.0) rhs += lambda * dc.transpose() * y;
  return kernels::gram_ridge_solve(code_gram(dv, dc, lambda), rhs, tau);
}

Matrix update_P_sylvester(const Matrix& x, const Matrix& c, const Matrix& dv, const Matrix& z, double beta) {
  if (x.cols() != c.cols() || dv.cols() != z.rows() || dv.rows() != x.rows() || z.cols() != c.rows()) {
    throw ValidationError("update_P_sylvester: shape mismatch");
  }
  if (!(beta >= 0.0)) throw ValidationError("update_P_sylvester: beta must be nonnegative");
  const Matrix dv_z = dv * z;
  if (beta == 0.0) return dv_z;
  return solve_prototypes(kernels::symmetric_eigen(kernels::gram(x)), c.rowwise().sum(), 2.0 * x * c.transpose(),
                          dv_z, beta);
}

Matrix assignment_costs(const Matrix& x, const Matrix& p) {
  if (x.rows() != p.rows()) throw ValidationError("assignment: feature and prototype dimensions differ");
  const Matrix proj = p.transpose() * x;  // r x N
  const Eigen::RowVectorXd base =
      proj.colwise().squaredNorm().array() + x.colwise().squaredNorm().array() + 1.0;
  const Vector proto_norms = p.colwise().squaredNorm().transpose();
  Matrix costs = -4.0 * proj;
  costs.colwise() += proto_norms;
  costs.rowwise() += base;
  return costs;
}

Labels assign_labels(const Matrix& x, const Matrix& p) {
  const Matrix costs = assignment_costs(x, p);
  Labels labels(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < costs.cols(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < costs.rows(); ++j) {
      if (costs(j, i) < costs(best, i)) best = j;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

Matrix update_Cu(const Matrix& xu, const Matrix& pu) {
  return one_hot(assign_labels(xu, pu), static_cast<int>(pu.cols()));
}

Matrix update_Cu_gzsl(const Matrix& xu, const Matrix& ps, const Matrix& pu) {
  if (ps.rows() != pu.rows()) throw ValidationError("update_Cu_gzsl: prototype dimensions differ");
  const Matrix joint = concat_columns(ps, pu);
  return one_hot(assign_labels(xu, joint), static_cast<int>(joint.cols()));
}

Matrix update_Pu_gzsl(const Matrix& xu, const Matrix& cu, const Matrix& ps, const Matrix& dv, const Matrix& zu,
                      double beta) {
  const Eigen::Index m = ps.cols();
  const Eigen::Index n = zu.cols();
  if (cu.rows() != m + n || cu.cols() != xu.cols() || ps.rows() != xu.rows() || dv.rows() != xu.rows() ||
      dv.cols() != zu.rows()) {
    throw ValidationError("update_Pu_gzsl: shape mismatch");
  }
  if (!(beta >= 0.0)) throw ValidationError("update_Pu_gzsl: beta must be nonnegative");
  const Matrix dv_z = dv * zu;
  if (beta == 0.0) return dv_z;
  const Matrix c_seen = cu.topRows(m);
  const Matrix c_unseen = cu.bottomRows(n);
  const Matrix rhs = xu * c_unseen.transpose() + (xu - ps * c_seen) * c_unseen.transpose();
  return solve_prototypes(kernels::symmetric_eigen(kernels::gram(xu)), c_unseen.rowwise().sum(), rhs, dv_z, beta);
}

DictionaryUpdate update_D(const Matrix& d, const Matrix& zs, const Matrix& zu, const Matrix& ts, const Matrix& tu,
                          double gamma, const kernels::LineSearchParams& ls) {
  if (zs.rows() != d.cols() || zu.rows() != d.cols() || ts.rows() != d.rows() || tu.rows() != d.rows() ||
      ts.cols() != zs.cols() || tu.cols() != zu.cols()) {
    throw ValidationError("update_D: shape mismatch");
  }
  if (!(gamma >= 0.0)) throw ValidationError("update_D: gamma must be nonnegative");

  // Gradient from the expanded quadratic: 2 (D G - H).
  const Matrix g = kernels::gram(zs) + gamma * kernels::gram(zu);
  const Matrix h = ts * zs.transpose() + gamma * tu * zu.transpose();
  // Residual buffers are reused across the many line-search evaluations.
  Matrix rs(ts.rows(), ts.cols());
  Matrix ru(tu.rows(), tu.cols());
  auto objective = [&](const Matrix& x) {
    rs = ts;
    rs.noalias() -= x * zs;
    ru = tu;
    ru.noalias() -= x * zu;
    return rs.squaredNorm() + gamma * ru.squaredNorm();
  };
  auto gradient = [&](const Matrix& x) -> Matrix {
    Matrix out = -2.0 * h;
    out.noalias() += 2.0 * x * g;
    return out;
  };
  auto project = [](const Matrix& x) { return kernels::project_columns_unit_ball(x); };

  kernels::DescentResult run = kernels::projected_descent(objective, gradient, d, project, ls);
  DictionaryUpdate out;
  out.D = std::move(run.x);
  out.report.inner_iterations = run.steps;
  out.report.objective_trace = std::move(run.trace);
  out.report.stalled = run.stalled;
  return out;
}

Matrix code_gradient(const Matrix& p, const Matrix& y, const Matrix& dv, const Matrix& dc, const Matrix& z,
                     double lambda, double tau) {
  return 2.0 * (dv.transpose() * (dv * z - p) + lambda * dc.transpose() * (dc * z - y) + tau * z);
}

Matrix prototype_gradient(const Matrix& x, const Matrix& c, const Matrix& dv, const Matrix& z, double beta,
                          const Matrix& p) {
  const Matrix xct = x * c.transpose();
  return 2.0 * beta * (x * (x.transpose() * p) + p * (c * c.transpose()) - 2.0 * xct) + 2.0 * (p - dv * z);
}

Matrix prototype_gradient_gzsl(const Matrix& xu, const Matrix& cu, const Matrix& ps, const Matrix& dv,
                               const Matrix& zu, double beta, const Matrix& pu) {
  const Eigen::Index m = ps.cols();
  const Eigen::Index n = pu.cols();
  const Matrix c_seen = cu.topRows(m);
  const Matrix c_unseen = cu.bottomRows(n);
  const Matrix residual = ps * c_seen + pu * c_unseen - xu;
  return 2.0 * beta * (xu * (xu.transpose() * pu - c_unseen.transpose()) + residual * c_unseen.transpose()) +
         2.0 * (pu - dv * zu);
}

Matrix dictionary_gradient(const Matrix& d, const Matrix& zs, const Matrix& zu, const Matrix& ts, const Matrix& tu,
                           double gamma) {
  return 2.0 * (d * zs - ts) * zs.transpose() + 2.0 * gamma * (d * zu - tu) * zu.transpose();
}

InductivePrediction predict_inductive(const Matrix& dv, const Matrix& dc, const Matrix& yu, const Matrix& xu,
                                      double lambda, double tau) {
  check_dictionary_shapes(dv, dc);
  if (yu.rows() != dc.rows()) throw ValidationError("predict_inductive: semantic dimension mismatch");
  if (!(lambda >= 0.0)) throw ValidationError("predict_inductive: lambda must be nonnegative");
  const Matrix g = lambda * kernels::gram(dc.transpose());
  InductivePrediction out;
  out.Zu = kernels::gram_ridge_solve(g, lambda * dc.transpose() * yu, tau);
  out.Pu = dv * out.Zu;
  out.Cu = update_Cu(xu, out.Pu);
  return out;
}

UnseenSolve solve_unseen(const Matrix& dv, const Matrix& dc, const Matrix& ps, const UnlabeledFeatureSet& unseen,
                         const HyperParams& hp, const std::optional<UnseenBlock>& warm,
                         const BlockObserver& observer) {
  hp.validate();
  check_dictionary_shapes(dv, dc);
  ModelState state;
  state.Dv = dv;
  state.Dc = dc;
  state.Ps = ps;
  if (warm) {
    state.Pu = warm->Pu;
    state.Cu = warm->Cu;
    state.Zu = warm->Zu;
  } else {
    const double lambda = hp.lambda();
    InductivePrediction pred = predict_inductive(dv, dc, unseen.semantics(), unseen.features(), lambda,
                                                 resolve_ridge_tau(hp, lambda * kernels::gram(dc.transpose())));
    state.Pu = std::move(pred.Pu);
    state.Zu = std::move(pred.Zu);
    state.Cu = hp.mode == Mode::kGzsl ? update_Cu_gzsl(unseen.features(), ps, state.Pu) : std::move(pred.Cu);
  }

  Engine engine(nullptr, unseen, hp, state, observer);
  UnseenSolve out;
  out.report = engine.solve_unseen();
  out.block = {std::move(state.Pu), std::move(state.Cu), std::move(state.Zu)};
  return out;
}

SeenSolve solve_seen(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const UnseenBlock& fixed,
                     const HyperParams& hp, const std::optional<SeenBlock>& warm, const BlockObserver& observer) {
  hp.validate();
  validate_pair(seen, unseen);
  ModelState state;
  if (warm) {
    state.Ps = warm->Ps;
    state.Zs = warm->Zs;
    state.Dv = warm->Dv;
    state.Dc = warm->Dc;
  } else {
    ModelState init = init_state(seen, unseen, hp);
    state.Ps = std::move(init.Ps);
    state.Zs = std::move(init.Zs);
    state.Dv = std::move(init.Dv);
    state.Dc = std::move(init.Dc);
  }
  state.Pu = fixed.Pu;
  state.Cu = fixed.Cu;
  state.Zu = fixed.Zu;
  require_feasible(state);

  Engine engine(&seen, unseen, hp, state, observer);
  SeenSolve out;
  out.report = engine.solve_seen();
  out.block = {std::move(state.Ps), std::move(state.Zs), std::move(state.Dv), std::move(state.Dc)};
  return out;
}

namespace {

// Outer alternation of Algorithm-style unseen/seen solves. Appends to `history`.
void run_outer(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp,
               ModelState& state, FitHistory& history, const BlockObserver& observer) {
  Engine engine(&seen, unseen, hp, state, observer);
  double prev_err = std::numeric_limits<double>::infinity();
  double prev_obj = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (int t = 0; t < hp.max_outer; ++t) {
    engine.solve_unseen();
    const Matrix dv_before = state.Dv;
    const Matrix dc_before = state.Dc;
    engine.solve_seen();

    const double err1 = (state.Dv - dv_before).norm();
    const double err2 = (state.Dc - dc_before).norm();
    const double obj = total_objective(state, seen, unseen, hp);
    history.err1_per_outer.push_back(err1);
    history.err2_per_outer.push_back(err2);
    history.objective_per_outer.push_back(obj);
    ++history.outer_iterations;

    if (err1 < hp.epsilon && err2 < hp.epsilon) {
      history.converged = true;
      break;
    }
    // Stalled: neither Err nor the objective makes progress.
    const double err = std::max(err1, err2);
    const bool obj_progress = prev_obj - obj > hp.inner_tol * std::max(1.0, std::abs(prev_obj));
    if (err < prev_err || obj_progress) {
      since_improvement = 0;
    } else if (++since_improvement >= kStallPatience) {
      break;
    }
    prev_err = err;
    prev_obj = obj;
  }
  engine.solve_unseen();
}

}  // namespace

void warm_start_inductive(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp,
                          ModelState& state) {
  HyperParams inductive = hp;
  inductive.mode = Mode::kInductive;
  FitHistory ignored;
  run_outer(seen, unseen, inductive, state, ignored, {});
  // Joint (m + n)-row assignment for the GZSL loop.
  if (hp.mode == Mode::kGzsl) state.Cu = update_Cu_gzsl(unseen.features(), state.Ps, state.Pu);
}

FitResult fit(const LabeledFeatureSet& seen, const UnlabeledFeatureSet& unseen, const HyperParams& hp,
              const BlockObserver& observer) {
  hp.validate();
  validate_pair(seen, unseen);

  FitResult result;
  result.state = init_state(seen, unseen, hp);
  if (hp.inductive_warm_start && hp.mode != Mode::kInductive) warm_start_inductive(seen, unseen, hp, result.state);
  if (observer) observer("init", result.state);

  run_outer(seen, unseen, hp, result.state, result.history, observer);
  return result;
}

Labels predicted_labels(const ModelState& state) { return labels_from_one_hot(state.Cu); }

}  // namespace hpl
