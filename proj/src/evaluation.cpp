#include "hpl/evaluation.hpp"

#include "hpl/error.hpp"

namespace hpl {

namespace {

AccuracyResult summarize(std::map<int, ClassScore> per_class) {
  AccuracyResult result;
  double sum = 0.0;
  for (auto& [cls, score] : per_class) {
    score.accuracy = static_cast<double>(score.correct) / score.total;
    sum += score.accuracy;
  }
  result.accuracy = per_class.empty() ? 0.0 : sum / static_cast<double>(per_class.size());
  result.per_class = std::move(per_class);
  return result;
}

double mean_accuracy(const std::map<int, ClassScore>& per_class, int lo, int hi) {
  double sum = 0.0;
  int count = 0;
  for (const auto& [cls, score] : per_class) {
    if (cls >= lo && cls < hi) {
      sum += score.accuracy;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / count;
}

}  // namespace

AccuracyResult per_class_topk_accuracy(const Matrix& scores, const Labels& truth, int k) {
  if (truth.empty()) throw ValidationError("evaluation: truth is empty");
  if (k < 1) throw ValidationError("evaluation: k must be at least 1");
  if (static_cast<Eigen::Index>(truth.size()) != scores.cols()) {
    throw ValidationError("evaluation: score matrix has " + std::to_string(scores.cols()) + " columns for " +
                          std::to_string(truth.size()) + " samples");
  }
  std::map<int, ClassScore> per_class;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    if (t < 0 || t >= scores.rows()) {
      throw ValidationError("evaluation: truth class " + std::to_string(t + 1) + " has no score row");
    }
    const auto col = static_cast<Eigen::Index>(i);
    const double own = scores(t, col);
    int ahead = 0;
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
      const double s = scores(j, col);
      if (s > own || (s == own && j < t)) ++ahead;
    }
    ClassScore& entry = per_class[t];
    ++entry.total;
    if (ahead < k) ++entry.correct;
  }
  return summarize(std::move(per_class));
}

AccuracyResult per_class_accuracy(const Labels& predicted, const Labels& truth) {
  if (truth.empty()) throw ValidationError("evaluation: truth is empty");
  if (predicted.size() != truth.size()) {
    throw ValidationError("evaluation: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(truth.size()) + " truth labels");
  }
  std::map<int, ClassScore> per_class;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0) throw ValidationError("evaluation: negative truth label");
    ClassScore& entry = per_class[truth[i]];
    ++entry.total;
    if (predicted[i] == truth[i]) ++entry.correct;
  }
  return summarize(std::move(per_class));
}

double harmonic_mean(double acc_seen, double acc_unseen) {
  const double sum = acc_seen + acc_unseen;
  if (sum <= 0.0) return 0.0;
  return 2.0 * acc_seen * acc_unseen / sum;
}

EvalReport evaluate_standard(const Labels& predicted, const Labels& truth) {
  AccuracyResult acc = per_class_accuracy(predicted, truth);
  EvalReport report;
  report.acc_unseen = acc.accuracy;
  report.per_class = std::move(acc.per_class);
  return report;
}

EvalReport evaluate_gzsl(const Labels& predicted, const Labels& truth, int m, int n) {
  bool has_seen = false;
  bool has_unseen = false;
  for (int t : truth) {
    if (t < 0 || t >= m + n) throw ValidationError("evaluation: truth label outside [1, m + n]");
    (t < m ? has_seen : has_unseen) = true;
  }
  if (!has_seen || !has_unseen) {
    throw ValidationError("evaluation: GZSL truth needs at least one seen-class and one unseen-class sample");
  }
  AccuracyResult acc = per_class_accuracy(predicted, truth);
  EvalReport report;
  report.acc_seen = mean_accuracy(acc.per_class, 0, m);
  report.acc_unseen = mean_accuracy(acc.per_class, m, m + n);
  report.harmonic_mean = harmonic_mean(*report.acc_seen, report.acc_unseen);
  report.per_class = std::move(acc.per_class);
  return report;
}

}  // namespace hpl
