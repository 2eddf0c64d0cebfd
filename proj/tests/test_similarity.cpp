#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "infohoc/noise.hpp"
#include "infohoc/similarity.hpp"

using namespace infohoc;

namespace {

const std::vector<double> kX1{1, 0, 1};
const std::vector<double> kX2{0, 1, 0};
const std::vector<double> kX3{0.8, 1, 0.7};

Eigen::MatrixXd example_w3() {
  Eigen::MatrixXd w(3, 3);
  w << 1, -0.2, -0.5, -0.2, 1, 0.5, -0.5, 0.5, 1;
  return w;
}

// Reference 2-NN by a full scan with explicit soft cosine.
std::pair<std::size_t, std::size_t> brute_2nn(const Dataset& d, std::size_t n,
                                              const SimilarityWeights& w) {
  std::vector<std::pair<double, std::size_t>> sims;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j != n) sims.emplace_back(-soft_cosine(d.row(n), d.row(j), w), j);
  }
  std::sort(sims.begin(), sims.end());
  return {sims[0].second, sims[1].second};
}

}  // namespace

TEST_CASE("soft cosine worked examples") {
  const auto id = SimilarityWeights::identity();
  CHECK(soft_cosine(kX1, kX3, id) == doctest::Approx(0.73).epsilon(0.005 / 0.73));
  CHECK(soft_cosine(kX2, kX3, id) == doctest::Approx(0.69).epsilon(0.005 / 0.69));

  const auto w2 = SimilarityWeights::diagonal(std::vector<double>{1, 1, 0.1});
  CHECK(std::abs(soft_cosine(kX1, kX3, w2) - 0.64) <= 0.005);
  CHECK(std::abs(soft_cosine(kX2, kX3, w2) - 0.77) <= 0.005);

  const auto w3 = SimilarityWeights::full(example_w3());
  CHECK(std::abs(soft_cosine(kX1, kX3, w3) - 0.75) <= 0.005);
  CHECK(std::abs(soft_cosine(kX2, kX3, w3) - 0.85) <= 0.005);
}

TEST_CASE("soft cosine properties") {
  CounterRng rng(21);
  const auto wd = SimilarityWeights::diagonal(std::vector<double>{0.5, 1, 0.2, 0.9});
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(4, 4);
  full.diagonal() << 0.5, 1, 0.2, 0.9;
  const auto wf = SimilarityWeights::full(full);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(4), y(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    CHECK(soft_cosine(x, x, wd) == doctest::Approx(1.0).epsilon(1e-12));
    const double s = soft_cosine(x, y, wd);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(s == doctest::Approx(soft_cosine(y, x, wd)).epsilon(1e-12));
    CHECK(std::abs(soft_cosine(x, y, wf) - s) <= 1e-12);
    std::vector<double> ax(x), by(y);
    for (double& v : ax) v *= 3.7;
    for (double& v : by) v *= 0.01;
    CHECK(soft_cosine(ax, by, wd) == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("soft cosine errors") {
  const std::vector<double> zero{0, 0, 0};
  CHECK_THROWS_WITH_AS(soft_cosine(zero, kX1, SimilarityWeights::identity()),
                       doctest::Contains("degenerate vector under W"), Error);
  // vector living only on a zero-weight dimension
  const auto w = SimilarityWeights::diagonal(std::vector<double>{0, 1, 1});
  CHECK_THROWS_AS(soft_cosine(std::vector<double>{1, 0, 0}, kX2, w), Error);
  CHECK_THROWS_AS(SimilarityWeights::full(Eigen::MatrixXd::Random(3, 3) + Eigen::MatrixXd::Identity(3, 3) * 3),
                  Error);
  CHECK_THROWS_AS(SimilarityWeights::diagonal(std::vector<double>{1, -1}), Error);
  CHECK_THROWS_AS(soft_cosine(kX1, std::vector<double>{1, 2}, SimilarityWeights::identity()), Error);
}

TEST_CASE("2-NN on three rows") {
  FeatureMatrix x(3, 3);
  x << 1, 0, 1, 0, 1, 0, 0.8, 1, 0.7;
  const Dataset d = make_dataset(x, {0, 1, 1});
  const auto tr = get_2nn_triplets(d, SimilarityWeights::identity());
  REQUIRE(tr.triples.size() == 3);
  // row 0: x3 (0.73) before x2 (0)
  CHECK(tr.triples[0].n1 == 2);
  CHECK(tr.triples[0].n2 == 1);
  CHECK(tr.triples[1].n1 == 2);
  CHECK(tr.triples[1].n2 == 0);
  CHECK(tr.triples[2].n1 == 0);
  CHECK(tr.triples[2].n2 == 1);
  CHECK(tr.triples[2].y == 1);
  CHECK(tr.triples[2].y1 == 0);

  // reweighting flips the order for x3
  const auto w2 = SimilarityWeights::diagonal(std::vector<double>{1, 1, 0.1});
  CHECK(get_2nn_triplets(d, w2).triples[2].n1 == 1);
}

TEST_CASE("2-NN ties go to the lower index and duplicates are legal") {
  FeatureMatrix x(5, 2);
  x << 1, 0, 1, 0, 1, 0, 0, 1, 1, 0;
  const Dataset d = make_dataset(x, {0, 0, 0, 1, 0});
  const auto tr = get_2nn_triplets(d, SimilarityWeights::identity());
  CHECK(tr.triples[0].n1 == 1);
  CHECK(tr.triples[0].n2 == 2);
  CHECK(tr.triples[4].n1 == 0);
  CHECK(tr.triples[4].n2 == 1);
  CHECK(tr.triples[2].n1 == 0);
  CHECK(tr.triples[2].n2 == 1);
}

TEST_CASE("blocked 2-NN matches a brute-force scan") {
  BlobSpec spec;
  spec.n = 300;
  spec.k = 3;
  spec.informative = 4;
  spec.uninformative = 3;
  const Dataset d = make_gaussian_blobs(spec, 5);
  const auto wd = SimilarityWeights::diagonal(std::vector<double>{1, 0.5, 0.8, 0.2, 0.01, 0.3, 0.05});
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(7, 7);
  full(0, 1) = full(1, 0) = 0.3;
  full(2, 5) = full(5, 2) = -0.2;
  for (const auto& w : {SimilarityWeights::identity(), wd, SimilarityWeights::full(full)}) {
    const auto tr = get_2nn_triplets(d, w);
    REQUIRE(tr.triples.size() == d.size());
    for (std::size_t n = 0; n < d.size(); ++n) {
      const auto [a, b] = brute_2nn(d, n, w);
      const auto& t = tr.triples[n];
      CHECK(t.n == n);
      CHECK(t.n1 != n);
      CHECK(t.n2 != n);
      CHECK(t.n1 != t.n2);
      CHECK(t.n1 == a);
      CHECK(t.n2 == b);
    }
  }
}

TEST_CASE("identity weights equal an all-ones diagonal bitwise in neighbours") {
  BlobSpec spec;
  spec.n = 500;
  spec.informative = 5;
  const Dataset d = make_gaussian_blobs(spec, 8);
  const auto a = get_2nn_triplets(d, SimilarityWeights::identity());
  const auto b = get_2nn_triplets(d, SimilarityWeights::diagonal(std::vector<double>(5, 1.0)));
  for (std::size_t n = 0; n < d.size(); ++n) {
    CHECK(a.triples[n].n1 == b.triples[n].n1);
    CHECK(a.triples[n].n2 == b.triples[n].n2);
  }
}

TEST_CASE("clusterability") {
  SUBCASE("separated blobs") {
    BlobSpec spec;
    spec.n = 400;
    spec.informative = 5;
    spec.separation = 6.0;
    const Dataset d = make_gaussian_blobs(spec, 1);
    CHECK(clusterability_rate(d, SimilarityWeights::identity()) == 1.0);
  }
  SUBCASE("random labels near one quarter") {
    BlobSpec spec;
    spec.n = 10000;
    spec.informative = 5;
    spec.separation = 0.0;
    const Dataset d = make_gaussian_blobs(spec, 2);
    const double r = clusterability_rate(d, SimilarityWeights::identity());
    CHECK(r == doctest::Approx(0.25).epsilon(0.1));
  }
  SUBCASE("noise dimensions hurt and reweighting helps") {
    BlobSpec spec;
    spec.n = 2000;
    spec.informative = 10;
    spec.uninformative = 30;
    spec.uninformative_scale = 10.0;
    spec.separation = 1.0;
    const Dataset d = make_gaussian_blobs(spec, 3);
    const double plain = clusterability_rate(d, SimilarityWeights::identity());
    std::vector<double> w(40, 1e-3);
    std::fill(w.begin(), w.begin() + 10, 1.0);
    const double weighted = clusterability_rate(d, SimilarityWeights::diagonal(w));
    CHECK(plain < 0.9);
    CHECK(weighted > plain);
  }
  SUBCASE("needs clean labels") {
    FeatureMatrix x = FeatureMatrix::Random(5, 2);
    const Dataset d = make_dataset(x, {0, 1, 0, 1, 0});
    CHECK_THROWS_AS(clusterability_rate(d, SimilarityWeights::identity()), Error);
  }
}

TEST_CASE("2-NN errors and triplet dump") {
  FeatureMatrix x(3, 2);
  x << 1, 0, 0, 0, 0, 1;
  const Dataset d = make_dataset(x, {0, 1, 0});
  CHECK_THROWS_WITH_AS(get_2nn_triplets(d, SimilarityWeights::identity()),
                       doctest::Contains("degenerate"), Error);

  x << 1, 0, 1, 1, 0, 1;
  const Dataset ok = make_dataset(x, {0, 1, 0});
  const auto path = std::filesystem::temp_directory_path() / "infohoc_triplets.csv";
  save_triplets(path, get_2nn_triplets(ok, SimilarityWeights::identity()));
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "n,n1,n2,y_n,y_n1,y_n2");
  CHECK(first == "0,1,2,0,1,0");
}
