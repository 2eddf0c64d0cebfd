#include "infohoc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace infohoc {

namespace {

constexpr std::size_t kBlockRows = 64;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

SimilarityWeights SimilarityWeights::diagonal(std::vector<double> w) {
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("diagonal weights must be finite and >= 0");
  }
  return SimilarityWeights(std::move(w));
}

SimilarityWeights SimilarityWeights::full(Eigen::MatrixXd w) {
  if (w.rows() != w.cols()) throw Error("similarity matrix must be square");
  if (!w.allFinite()) throw Error("similarity matrix must be finite");
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("similarity matrix must be symmetric");
  }
  return SimilarityWeights(std::move(w));
}

double SimilarityWeights::quadratic(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != y.size()) throw Error("similarity: vector lengths differ");
  return std::visit(
      overloaded{
          [&](const Identity&) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
            return s;
          },
          [&](const Diagonal& w) {
            if (w.size() != x.size()) throw Error("similarity: weight length mismatch");
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * w[i] * y[i];
            return s;
          },
          [&](const Full& w) {
            if (static_cast<std::size_t>(w.rows()) != x.size()) {
              throw Error("similarity: weight dimension mismatch");
            }
            const auto n = static_cast<Eigen::Index>(x.size());
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), n), yv(y.data(), n);
            return xv.dot(w * yv);
          },
      },
      form_);
}

double soft_cosine(std::span<const double> x, std::span<const double> x2,
                   const SimilarityWeights& w) {
  const double a = w.quadratic(x, x);
  const double b = w.quadratic(x2, x2);
  if (!(a > 0.0) || !(b > 0.0)) throw Error("degenerate vector under W");
  const double s = w.quadratic(x, x2) / (std::sqrt(a) * std::sqrt(b));
  return std::clamp(s, -1.0, 1.0);
}

NeighborTriplets get_2nn_triplets(const Dataset& data, const SimilarityWeights& w) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = data.features.cols();
  if (n < 3) throw Error("2-NN search needs N >= 3");

  // Rows scaled to unit weighted norm; `left` additionally carries W so that
  // similarity(i, j) = left.row(i) . unit.row(j).
  FeatureMatrix unit(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = data.row(static_cast<std::size_t>(i));
    const double q = w.quadratic(row, row);
    if (!(q > 0.0)) {
      throw Error("degenerate vector under W at row " + std::to_string(i));
    }
    unit.row(i) = data.features.row(i) / std::sqrt(q);
  }
  const FeatureMatrix left = std::visit(
      overloaded{
          [&](const SimilarityWeights::Identity&) -> FeatureMatrix { return unit; },
          [&](const SimilarityWeights::Diagonal& dw) -> FeatureMatrix {
            if (static_cast<Eigen::Index>(dw.size()) != d) {
              throw Error("similarity: weight length mismatch");
            }
            const Eigen::Map<const Eigen::VectorXd> wv(dw.data(), d);
            return unit * wv.asDiagonal();
          },
          [&](const SimilarityWeights::Full& fw) -> FeatureMatrix {
            if (fw.rows() != d) throw Error("similarity: weight dimension mismatch");
            return unit * fw;
          },
      },
      w.form());

  NeighborTriplets out;
  out.triples.resize(static_cast<std::size_t>(n));
  const std::size_t blocks = (static_cast<std::size_t>(n) + kBlockRows - 1) / kBlockRows;
  parallel_for(
      blocks,
      [&](std::size_t b_begin, std::size_t b_end) {
        Eigen::MatrixXd sims;
        for (std::size_t b = b_begin; b < b_end; ++b) {
          const auto r0 = static_cast<Eigen::Index>(b * kBlockRows);
          const auto rows = std::min<Eigen::Index>(static_cast<Eigen::Index>(kBlockRows), n - r0);
          sims.noalias() = left.middleRows(r0, rows) * unit.transpose();
          for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::Index self = r0 + r;
            double best1 = -std::numeric_limits<double>::infinity();
            double best2 = best1;
            Eigen::Index i1 = -1, i2 = -1;
            for (Eigen::Index j = 0; j < n; ++j) {
              if (j == self) continue;
              const double s = sims(r, j);
              // strict comparisons keep the lower index on ties
              if (s > best1) {
                best2 = best1;
                i2 = i1;
                best1 = s;
                i1 = j;
              } else if (s > best2 || i2 < 0) {
                best2 = s;
                i2 = j;
              }
            }
            Triplet& t = out.triples[static_cast<std::size_t>(self)];
            t.n = static_cast<std::size_t>(self);
            t.n1 = static_cast<std::size_t>(i1);
            t.n2 = static_cast<std::size_t>(i2);
            t.y = data.noisy_labels[t.n];
            t.y1 = data.noisy_labels[t.n1];
            t.y2 = data.noisy_labels[t.n2];
          }
        }
      },
      1);
  return out;
}

double clusterability_rate(const Dataset& data, const NeighborTriplets& triplets) {
  if (!data.clean_labels) throw Error("clusterability needs clean labels");
  const auto& clean = *data.clean_labels;
  if (triplets.triples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : triplets.triples) {
    if (clean[t.n1] == clean[t.n] && clean[t.n2] == clean[t.n]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(triplets.triples.size());
}

double clusterability_rate(const Dataset& data, const SimilarityWeights& w) {
  if (!data.clean_labels) throw Error("clusterability needs clean labels");
  return clusterability_rate(data, get_2nn_triplets(data, w));
}

void save_triplets(const std::filesystem::path& path, const NeighborTriplets& triplets) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write triplets: " + path.string());
  out << "n,n1,n2,y_n,y_n1,y_n2\n";
  for (const auto& t : triplets.triples) {
    out << t.n << ',' << t.n1 << ',' << t.n2 << ',' << t.y << ',' << t.y1 << ',' << t.y2 << '\n';
  }
}

}  // namespace infohoc
