#include <doctest.h>

#include "infohoc/eval.hpp"
#include "infohoc/noise.hpp"

using namespace infohoc;

namespace {

Eigen::MatrixXd random_stochastic(int k, CounterRng& rng) {
  Eigen::MatrixXd t(k, k);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.exponential();
  for (int i = 0; i < k; ++i) t.row(i) /= t.row(i).sum();
  return t;
}

Dataset blobs(std::size_t n, std::uint64_t seed, double sep = 1.0) {
  BlobSpec spec;
  spec.n = n;
  spec.informative = 3;
  spec.separation = sep;
  return make_gaussian_blobs(spec, seed);
}

}  // namespace

TEST_CASE("estimation_error values") {
  Eigen::MatrixXd t(2, 2);
  t << 0.7, 0.3, 0.3, 0.7;
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK(std::abs(estimation_error(t, half) - 0.2) <= 1e-12);
  CHECK(estimation_error(t, t) == 0.0);
  Eigen::MatrixXd shifted = t;
  shifted(0, 0) += 0.1;
  shifted(0, 1) -= 0.1;
  CHECK(estimation_error(t, shifted) == doctest::Approx(0.05));
  CHECK_THROWS_AS(estimation_error(t, Eigen::MatrixXd::Identity(3, 3)), Error);
}

TEST_CASE("estimation_error metric properties") {
  CounterRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 4;
    const auto a = random_stochastic(k, rng);
    const auto b = random_stochastic(k, rng);
    const auto c = random_stochastic(k, rng);
    const double ab = estimation_error(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab == estimation_error(b, a));
    CHECK(estimation_error(a, c) <= ab + estimation_error(b, c) + 1e-12);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(k);
    perm.setIdentity();
    for (int i = k - 1; i > 0; --i) perm.applyTranspositionOnTheRight(i, rng() % (i + 1));
    const Eigen::MatrixXd pa = perm * a * perm.transpose();
    const Eigen::MatrixXd pb = perm * b * perm.transpose();
    CHECK(estimation_error(pa, pb) == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("forward with identity T reproduces plain training bitwise") {
  const Dataset train = blobs(600, 1);
  const Dataset test = blobs(300, 2);
  TrainConfig cfg{60, 0.5, 4};
  const auto plain = train_linear(train, test, std::nullopt, cfg);
  const auto fwd =
      train_linear(train, test, validate_transition(Eigen::MatrixXd::Identity(2, 2)), cfg);
  CHECK(plain.accuracy_per_epoch == fwd.accuracy_per_epoch);
  CHECK(plain.loss_mode == LossMode::Plain);
  CHECK(fwd.loss_mode == LossMode::Forward);
}

TEST_CASE("train_linear bookkeeping") {
  const Dataset train = blobs(500, 3, 2.0);
  const Dataset test = blobs(500, 4, 2.0);
  const auto res = train_linear(train, test, std::nullopt, TrainConfig{50, 0.5, 0});
  CHECK(res.epochs == 50);
  CHECK(res.accuracy_per_epoch.size() == 50);
  CHECK(res.last_epoch_accuracy == res.accuracy_per_epoch.back());
  CHECK(res.best_epoch_accuracy >= res.last_epoch_accuracy);
  CHECK(res.best_epoch_accuracy == res.accuracy_per_epoch[res.best_epoch]);
  for (int e = 0; e < res.best_epoch; ++e) CHECK(res.accuracy_per_epoch[e] < res.best_epoch_accuracy);
  CHECK(res.best_epoch_accuracy > 0.95);
}

TEST_CASE("zero-noise data trains the same either way") {
  const Dataset train = blobs(800, 5);
  const Dataset test = blobs(800, 6);
  TrainConfig cfg{200, 0.5, 1};
  const auto plain = train_linear(train, test, std::nullopt, cfg);
  const auto fwd = train_linear(train, test, validate_transition(Eigen::MatrixXd::Identity(2, 2)), cfg);
  CHECK(std::abs(plain.best_epoch_accuracy - fwd.best_epoch_accuracy) <= 0.005);
  CHECK(std::abs(plain.last_epoch_accuracy - fwd.last_epoch_accuracy) <= 0.005);
}

TEST_CASE("train_linear errors") {
  const Dataset train = blobs(100, 7);
  const Dataset test = blobs(100, 8);
  Eigen::MatrixXd bad(2, 2);
  bad << 0.7, 0.2, 0.3, 0.7;
  TransitionMatrix t{bad, std::nullopt};
  CHECK_THROWS_AS(train_linear(train, test, t, TrainConfig{}), Error);

  Dataset single = train;
  std::fill(single.noisy_labels.begin(), single.noisy_labels.end(), 1);
  CHECK_THROWS_WITH_AS(train_linear(single, test, std::nullopt, TrainConfig{}),
                       doctest::Contains("single class"), Error);

  FeatureMatrix x = FeatureMatrix::Random(100, 2);
  const Dataset other = make_dataset(x, test.noisy_labels, test.clean_labels);
  CHECK_THROWS_AS(train_linear(train, other, std::nullopt, TrainConfig{}), Error);
}

TEST_CASE("accuracy helper") {
  FeatureMatrix x(3, 1);
  x << -1, 2, 3;
  Eigen::MatrixXd w(1, 2);
  w << -1, 1;
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  const std::vector<Label> y{0, 1, 0};
  CHECK(accuracy(x, y, w, b) == doctest::Approx(2.0 / 3.0));
}
