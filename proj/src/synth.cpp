#include "hpl/synth.hpp"

#include <limits>
#include <random>
#include <sstream>

#include "hpl/error.hpp"

namespace hpl {

namespace {

constexpr int kMaxDraws = 1000;

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = sigma * normal(rng);
  }
  return m;
}

// Orthonormal columns when they fit, otherwise independent unit columns.
Matrix random_dictionary(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const Matrix g = gaussian(rows, cols, 1.0, rng);
  if (cols <= rows) {
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(rows, cols);
  }
  return kernels::normalize_columns(g);
}

double min_pairwise_distance(const Matrix& p) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < p.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < p.cols(); ++b) best = std::min(best, (p.col(a) - p.col(b)).norm());
  }
  return best;
}

Matrix draw_samples(const Matrix& prototypes, const std::vector<int>& classes, double sigma, std::mt19937_64& rng) {
  Matrix x(prototypes.rows(), static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    x.col(col) = prototypes.col(classes[i]) + gaussian(prototypes.rows(), 1, sigma, rng);
  }
  return kernels::normalize_columns(std::move(x));
}

std::vector<int> repeat_classes(int first, int count, int per_class) {
  std::vector<int> out;
  for (int c = first; c < first + count; ++c) out.insert(out.end(), static_cast<std::size_t>(per_class), c);
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (d < 1 || k < 1 || q < 1 || m < 1 || n < 1) throw ValidationError("synth: d, k, q, m, n must be positive");
  if (q > m + n) throw ValidationError("synth: q must not exceed m + n");
  if (samples_per_class < 1) throw ValidationError("synth: samples_per_class must be positive");
  if (samples_per_unseen_class < 1) throw ValidationError("synth: samples_per_unseen_class must be positive");
  if (seen_test_per_class < 0) throw ValidationError("synth: seen_test_per_class must be nonnegative");
  if (!(noise_sigma >= 0.0)) throw ValidationError("synth: noise_sigma must be nonnegative");
  if (!(separation >= 1.0)) throw ValidationError("synth: separation must be at least 1");
}

SynthData synth_generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const int classes = spec.m + spec.n;
  const double min_distance = spec.separation * spec.noise_sigma;

  Matrix dv, dc, codes, prototypes;
  bool placed = false;
  double achieved = 0.0;
  for (int draw = 0; draw < kMaxDraws && !placed; ++draw) {
    dv = random_dictionary(spec.d, spec.q, rng);
    dc = random_dictionary(spec.k, spec.q, rng);
    codes = kernels::normalize_columns(gaussian(spec.q, classes, 1.0, rng));
    const Matrix raw = dv * codes;
    // Rescale codes so that D_v Z has unit columns exactly.
    for (Eigen::Index j = 0; j < classes; ++j) {
      const double norm = raw.col(j).norm();
      if (norm < 1e-12) break;
      codes.col(j) /= norm;
    }
    prototypes = dv * codes;
    achieved = min_pairwise_distance(prototypes);
    placed = achieved > min_distance && achieved > 0.0;
  }
  if (!placed) {
    std::ostringstream msg;
    msg << "synth: could not place " << classes << " prototypes with pairwise distance above " << min_distance
        << " in " << spec.d << " dimensions after " << kMaxDraws
        << " draws; increase d or reduce m + n or the separation";
    throw GenerationError(msg.str());
  }

  const Matrix semantics_clean = dc * codes;
  Matrix semantics = semantics_clean + gaussian(spec.k, classes, 0.1 * spec.noise_sigma, rng);
  semantics = kernels::normalize_columns(std::move(semantics));

  const std::vector<int> seen_classes = repeat_classes(0, spec.m, spec.samples_per_class);
  Matrix xs = draw_samples(prototypes, seen_classes, spec.noise_sigma, rng);

  std::vector<int> test_classes = repeat_classes(0, spec.m, spec.seen_test_per_class);
  const std::vector<int> unseen_classes = repeat_classes(spec.m, spec.n, spec.samples_per_unseen_class);
  test_classes.insert(test_classes.end(), unseen_classes.begin(), unseen_classes.end());
  Matrix xu = draw_samples(prototypes, test_classes, spec.noise_sigma, rng);

  const bool generalized = spec.seen_test_per_class > 0;
  Labels truth(test_classes.begin(), test_classes.end());
  if (!generalized) {
    for (int& t : truth) t -= spec.m;
  }

  SynthData data{
      LabeledFeatureSet::create(std::move(xs), Labels(seen_classes.begin(), seen_classes.end()),
                                semantics.leftCols(spec.m)),
      UnlabeledFeatureSet::create(std::move(xu), semantics.rightCols(spec.n), truth,
                                  generalized ? TruthSpace::kAll : TruthSpace::kUnseen),
      ModelState{}};

  ModelState& gt = data.truth;
  gt.Ps = prototypes.leftCols(spec.m);
  gt.Pu = prototypes.rightCols(spec.n);
  gt.Dv = dv;
  gt.Dc = dc;
  gt.Zs = codes.leftCols(spec.m);
  gt.Zu = codes.rightCols(spec.n);
  gt.Cu = one_hot(truth, generalized ? classes : spec.n);
  return data;
}

}  // namespace hpl
