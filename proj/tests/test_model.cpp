#include <doctest.h>

#include <random>

#include "hpl/error.hpp"
#include "hpl/model.hpp"
#include "hpl/synth.hpp"
#include "support.hpp"

using namespace hpl;

namespace {

Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

// Independent per-sample evaluation of the encoding cost.
double encoding_reference(const Matrix& x, const Labels& labels, const Matrix& p) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    Vector e = Vector::Zero(p.cols());
    e(labels[static_cast<std::size_t>(i)]) = 1.0;
    const Vector forward = p.transpose() * x.col(i) - e;
    const Vector reverse = x.col(i) - p * e;
    total += forward.dot(forward) + reverse.dot(reverse);
  }
  return total;
}

struct Instance {
  LabeledFeatureSet seen;
  UnlabeledFeatureSet unseen;
  ModelState state;
};

Instance random_instance(std::uint64_t seed, Mode mode) {
  std::mt19937_64 rng(seed);
  const int d = 5, k = 4, q = 3, m = 3, n = 2;
  auto seen = LabeledFeatureSet::create(test::random_unit_columns(d, 12, rng), test::random_labels(12, m, rng),
                                        test::random_unit_columns(k, m, rng));
  const int rows = mode == Mode::kGzsl ? m + n : n;
  auto unseen = UnlabeledFeatureSet::create(test::random_unit_columns(d, 9, rng), test::random_unit_columns(k, n, rng));
  ModelState s;
  s.Ps = test::random_matrix(d, m, rng);
  s.Pu = test::random_matrix(d, n, rng);
  s.Dv = test::random_in_ball(d, q, rng);
  s.Dc = test::random_in_ball(k, q, rng);
  s.Zs = test::random_matrix(q, m, rng);
  s.Zu = test::random_matrix(q, n, rng);
  s.Cu = one_hot(test::random_labels(9, rows, rng), rows);
  return {std::move(seen), std::move(unseen), std::move(s)};
}

}  // namespace

TEST_CASE("encoding cost: perfect, orthogonal and additive cases") {
  const Matrix x = col({1, 0});
  const Matrix c = Matrix::Ones(1, 1);
  CHECK(encoding_cost_seen(x, c, col({1, 0})) == 0.0);
  CHECK(encoding_cost_seen(x, c, col({0, 1})) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(encoding_cost_unseen(x, c, col({0, 1})) == encoding_cost_seen(x, c, col({0, 1})));

  Matrix x2(2, 2);
  x2 << 1, 1, 0, 0;
  const Matrix c2 = Matrix::Ones(1, 2);
  CHECK(encoding_cost_seen(x2, c2, col({1, 0})) == 0.0);
  CHECK(encoding_cost_seen(x2, c2, col({0, 1})) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(encoding_cost_seen(x, c, Matrix::Ones(3, 1)), ValidationError);
}

TEST_CASE("encoding cost: matches per-sample reference and is additive over samples") {
  std::mt19937_64 rng(8);
  const Matrix x = test::random_unit_columns(6, 20, rng);
  const Labels labels = test::random_labels(20, 4, rng);
  const Matrix p = test::random_matrix(6, 4, rng);
  const double full = encoding_cost(x, one_hot(labels, 4), p);
  CHECK(full == doctest::Approx(encoding_reference(x, labels, p)).epsilon(1e-12));

  const Labels first(labels.begin(), labels.begin() + 7);
  const Labels rest(labels.begin() + 7, labels.end());
  const double split = encoding_cost(x.leftCols(7), one_hot(first, 4), p) +
                       encoding_cost(x.rightCols(13), one_hot(rest, 4), p);
  CHECK(full == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("encoding statistics reproduce the direct encoding cost") {
  std::mt19937_64 rng(18);
  const Matrix x = test::random_unit_columns(6, 40, rng);
  const Matrix c = one_hot(test::random_labels(40, 5, rng), 5);
  const EncodingStats stats = EncodingStats::of(x, c);
  for (int t = 0; t < 5; ++t) {
    const Matrix p = test::random_matrix(6, 5, rng);
    CHECK(stats.cost(p) == doctest::Approx(encoding_cost(x, c, p)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(stats.cost(Matrix::Zero(6, 4)), ValidationError);
  CHECK_THROWS_AS(EncodingStats::of(x, c.leftCols(3)), ValidationError);
}

TEST_CASE("alignment cost: exact factorization, lambda collapse and term-by-term oracle") {
  std::mt19937_64 rng(9);
  const Matrix dv = test::random_in_ball(3, 2, rng);
  const Matrix dc = test::random_in_ball(2, 2, rng);
  const Matrix z = test::random_matrix(2, 2, rng);
  CHECK(alignment_cost(dv * z, dc * z, dv, dc, z, 0.7) <= 1e-28);

  const Matrix p = test::random_matrix(3, 2, rng);
  const Matrix y = test::random_matrix(2, 2, rng);
  CHECK(alignment_cost(p, y, dv, dc, z, 0.0) == doctest::Approx((p - dv * z).squaredNorm()).epsilon(1e-14));

  double reference = 0.0;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 3; ++i) {
      double r = p(i, j);
      for (int l = 0; l < 2; ++l) r -= dv(i, l) * z(l, j);
      reference += r * r;
    }
    for (int i = 0; i < 2; ++i) {
      double r = y(i, j);
      for (int l = 0; l < 2; ++l) r -= dc(i, l) * z(l, j);
      reference += 0.4 * r * r;
    }
  }
  CHECK(alignment_cost(p, y, dv, dc, z, 0.4) == doctest::Approx(reference).epsilon(1e-13));
  CHECK_THROWS_AS(alignment_cost(p, y, dv, dc, Matrix::Ones(3, 2), 0.4), ValidationError);
}

TEST_CASE("encoding cost gzsl: block collapse, perfect seen match and oracle") {
  std::mt19937_64 rng(10);
  const int d = 5, m = 2, n = 3;
  const Matrix xu = test::random_unit_columns(d, 8, rng);
  const Labels unseen_labels = test::random_labels(8, n, rng);
  const Matrix pu = test::random_matrix(d, n, rng);
  Labels joint = unseen_labels;
  for (int& l : joint) l += m;
  CHECK(encoding_cost_gzsl(xu, one_hot(joint, m + n), Matrix::Zero(d, m), pu) ==
        doctest::Approx(encoding_cost_unseen(xu, one_hot(unseen_labels, n), pu)).epsilon(1e-13));

  const Matrix ps = Matrix::Identity(d, m);
  const Matrix x = ps.col(1);
  CHECK(encoding_cost_gzsl(x, one_hot({1}, m + n), ps, Matrix::Zero(d, n)) <= 1e-30);

  const Matrix ps2 = test::random_matrix(d, m, rng);
  Labels mixed = test::random_labels(8, m + n, rng);
  Matrix joint_p(d, m + n);
  joint_p << ps2, pu;
  CHECK(encoding_cost_gzsl(xu, one_hot(mixed, m + n), ps2, pu) ==
        doctest::Approx(encoding_reference(xu, mixed, joint_p)).epsilon(1e-12));
}

TEST_CASE("total objective: alpha = 0 collapse and term-sum oracle") {
  for (Mode mode : {Mode::kTransductive, Mode::kInductive, Mode::kGzsl}) {
    Instance in = random_instance(12, mode);
    HyperParams hp;
    hp.mode = mode;
    hp.rho = 0.3;
    hp.omega = 0.4;
    hp.alpha = 0.0;
    const double seen_part =
        hp.beta() * encoding_cost(in.seen.features(), in.seen.onehot(), in.state.Ps) +
        alignment_cost(in.state.Ps, in.seen.semantics(), in.state.Dv, in.state.Dc, in.state.Zs, hp.lambda());
    CHECK(total_objective(in.state, in.seen, in.unseen, hp) == doctest::Approx(seen_part).epsilon(1e-13));

    hp.alpha = 0.25;
    double unseen_enc = 0.0;
    if (mode == Mode::kTransductive) unseen_enc = encoding_cost(in.unseen.features(), in.state.Cu, in.state.Pu);
    if (mode == Mode::kGzsl) unseen_enc = encoding_cost_gzsl(in.unseen.features(), in.state.Cu, in.state.Ps, in.state.Pu);
    const double unseen_align =
        alignment_cost(in.state.Pu, in.unseen.semantics(), in.state.Dv, in.state.Dc, in.state.Zu, hp.lambda());
    const double expected = seen_part + hp.gamma() * (hp.beta() * unseen_enc + unseen_align);
    CHECK(total_objective(in.state, in.seen, in.unseen, hp) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("total objective: infeasible dictionary is rejected") {
  Instance in = random_instance(13, Mode::kTransductive);
  in.state.Dv(0, 0) = 2.0;
  CHECK_THROWS_AS(total_objective(in.state, in.seen, in.unseen, HyperParams{}), ValidationError);
}

TEST_CASE("weight equivalence: (rho, omega, alpha) form is a positive multiple") {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    for (Mode mode : {Mode::kTransductive, Mode::kGzsl}) {
      Instance in = random_instance(seed, mode);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 0.95);
      HyperParams hp;
      hp.mode = mode;
      hp.rho = u(rng);
      hp.omega = u(rng);
      hp.alpha = u(rng);
      const double scale = (1 - hp.rho) * (1 - hp.omega) * (1 - hp.alpha);
      const double a = reparameterized_seen_objective(in.state, in.seen, in.unseen, hp);
      const double b = seen_objective(in.state, in.seen, in.unseen, hp) * scale;
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("datasets: validation of the type invariants") {
  std::mt19937_64 rng(14);
  const Matrix x = test::random_unit_columns(4, 5, rng);
  const Matrix y = test::random_unit_columns(3, 2, rng);
  auto seen = LabeledFeatureSet::create(x, {0, 1, 0, 1, 1}, y);
  CHECK(seen.onehot().colwise().sum().isOnes());
  CHECK(seen.onehot()(1, 4) == 1.0);

  CHECK_THROWS_AS(LabeledFeatureSet::create(x, {0, 0, 0, 0, 0}, y), ValidationError);  // class 1 empty
  CHECK_THROWS_AS(LabeledFeatureSet::create(x, {0, 1, 0, 2, 1}, y), ValidationError);  // out of range
  CHECK_THROWS_AS(LabeledFeatureSet::create(2.0 * x, {0, 1, 0, 1, 1}, y), ValidationError);
  Matrix bad = x;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LabeledFeatureSet::create(bad, {0, 1, 0, 1, 1}, y), ValidationError);

  CHECK_THROWS_AS(UnlabeledFeatureSet::create(x, y, Labels{0, 1, 2, 0, 1}), ValidationError);
  auto gz = UnlabeledFeatureSet::create(x, y, Labels{0, 1, 2, 3, 1}, TruthSpace::kAll);
  CHECK_NOTHROW(validate_pair(seen, gz));
  auto wide = UnlabeledFeatureSet::create(x, y, Labels{0, 1, 2, 3, 4}, TruthSpace::kAll);
  CHECK_THROWS_AS(validate_pair(seen, wide), ValidationError);
  auto other_k = UnlabeledFeatureSet::create(x, test::random_unit_columns(5, 2, rng));
  CHECK_THROWS_AS(validate_pair(seen, other_k), ValidationError);
}

TEST_CASE("hyperparameters: derived weights, q and validation") {
  HyperParams hp;
  hp.rho = 0.5;
  hp.omega = 0.75;
  hp.alpha = 0.0;
  CHECK(hp.beta() == 1.0);
  CHECK(hp.lambda() == 3.0);
  CHECK(hp.gamma() == 0.0);
  hp.theta = 0.6;
  CHECK(hp.num_super_prototypes(13) == 8);
  hp.theta = 0.01;
  CHECK(hp.num_super_prototypes(13) == 1);
  hp.theta = 1.0;
  CHECK(hp.num_super_prototypes(13) == 13);

  auto rejects = [](auto mutate, const char* field) {
    HyperParams h;
    mutate(h);
    try {
      h.validate();
      return false;
    } catch (const ValidationError& e) {
      return std::string(e.what()).find(field) != std::string::npos;
    }
  };
  CHECK(rejects([](HyperParams& h) { h.rho = 1.2; }, "rho"));
  CHECK(rejects([](HyperParams& h) { h.omega = 1.0; }, "omega"));
  CHECK(rejects([](HyperParams& h) { h.alpha = -0.1; }, "alpha"));
  CHECK(rejects([](HyperParams& h) { h.theta = 0.0; }, "theta"));
  CHECK(rejects([](HyperParams& h) { h.epsilon = 0.0; }, "epsilon"));
  CHECK(rejects([](HyperParams& h) { h.max_outer = -1; }, "max_outer"));
  CHECK(rejects([](HyperParams& h) { h.ridge_tau = -1.0; }, "ridge_tau"));
  CHECK(rejects([](HyperParams& h) { h.kmeans_restarts = 0; }, "kmeans_restarts"));
}

TEST_CASE("one-hot helpers round trip") {
  const Labels labels{2, 0, 1, 2};
  const Matrix c = one_hot(labels, 3);
  CHECK(c.rows() == 3);
  CHECK(labels_from_one_hot(c) == labels);
  CHECK_THROWS_AS(one_hot({3}, 3), ValidationError);
  Matrix two = Matrix::Zero(2, 1);
  CHECK_THROWS_AS(labels_from_one_hot(two), ValidationError);
}

TEST_CASE("ground truth of a noiseless instance has zero alignment and reverse encoding residual") {
  SynthSpec spec;
  spec.noise_sigma = 0.0;
  spec.samples_per_class = 3;
  spec.samples_per_unseen_class = 3;
  const SynthData data = synth_generate(spec);
  const ModelState& t = data.truth;
  HyperParams hp;
  hp.rho = 0.0;
  CHECK(total_objective(t, data.seen, data.unseen, hp) <= 1e-10);
  CHECK((data.seen.features() - t.Ps * data.seen.onehot()).norm() <= 1e-10);
  CHECK((data.unseen.features() - t.Pu * t.Cu).norm() <= 1e-10);
}
