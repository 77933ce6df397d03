#pragma once

// Average per-class top-k accuracy and the generalized zero-shot harmonic mean.

#include <map>
#include <optional>

#include "hpl/model.hpp"

namespace hpl {

struct ClassScore {
  int correct = 0;
  int total = 0;
  double accuracy = 0.0;
};

struct AccuracyResult {
  double accuracy = 0.0;
  std::map<int, ClassScore> per_class;  // keyed by 0-based class id
};

struct EvalReport {
  double acc_unseen = 0.0;
  std::optional<double> acc_seen;
  std::optional<double> harmonic_mean;
  std::map<int, ClassScore> per_class;
};

/// Per-class top-k accuracy from a classes x N score matrix (higher is better).
/// A sample counts as correct when fewer than k classes score strictly higher
/// than its true class, or equal with a smaller index.
AccuracyResult per_class_topk_accuracy(const Matrix& scores, const Labels& truth, int k);

/// Top-1 per-class accuracy from hard labels.
AccuracyResult per_class_accuracy(const Labels& predicted, const Labels& truth);

/// 2 s u / (s + u), with H(0, 0) = 0.
double harmonic_mean(double acc_seen, double acc_unseen);

/// Standard zero-shot report: labels and truth both index the unseen classes.
EvalReport evaluate_standard(const Labels& predicted, const Labels& truth);

/// Labels and truth index all m + n classes (seen first). Accuracy is averaged
/// separately over seen-class and unseen-class truth samples.
EvalReport evaluate_gzsl(const Labels& predicted, const Labels& truth, int m, int n);

}  // namespace hpl
