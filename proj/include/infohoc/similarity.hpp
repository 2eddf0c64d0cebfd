#pragma once
// Soft cosine similarity x^T W x' / sqrt(x^T W x * x'^T W x') and exact
// brute-force 2-nearest-neighbour search under it.

#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "infohoc/core.hpp"

namespace infohoc {

class SimilarityWeights {
 public:
  struct Identity {};
  using Diagonal = std::vector<double>;
  using Full = Eigen::MatrixXd;

  static SimilarityWeights identity() { return SimilarityWeights(Identity{}); }
  /// Entries must be non-negative.
  static SimilarityWeights diagonal(std::vector<double> w);
  static SimilarityWeights diagonal(const WeightVector& w) { return diagonal(w.w); }
  /// Must be square and symmetric within 1e-9.
  static SimilarityWeights full(Eigen::MatrixXd w);

  bool is_identity() const { return std::holds_alternative<Identity>(form_); }
  const std::variant<Identity, Diagonal, Full>& form() const { return form_; }

  /// x^T W y. Dimensions must agree with the weight form.
  double quadratic(std::span<const double> x, std::span<const double> y) const;

 private:
  explicit SimilarityWeights(std::variant<Identity, Diagonal, Full> f) : form_(std::move(f)) {}
  std::variant<Identity, Diagonal, Full> form_;
};

/// Throws Error("degenerate vector under W") when either weighted norm is
/// not strictly positive.
double soft_cosine(std::span<const double> x, std::span<const double> x2,
                   const SimilarityWeights& w);

struct Triplet {
  std::size_t n = 0, n1 = 0, n2 = 0;
  Label y = 0, y1 = 0, y2 = 0;  // noisy labels of n, n1, n2
};

struct NeighborTriplets {
  std::vector<Triplet> triples;
};

/// For every row, the two other rows with the highest soft cosine
/// (n1 the most similar). Ties go to the lower row index; the row itself
/// is excluded by index, so exact duplicates are valid neighbours.
NeighborTriplets get_2nn_triplets(const Dataset& data, const SimilarityWeights& w);

/// Fraction of rows whose two neighbours share the row's clean label.
double clusterability_rate(const Dataset& data, const SimilarityWeights& w);
double clusterability_rate(const Dataset& data, const NeighborTriplets& triplets);

/// Writes `n,n1,n2,y_n,y_n1,y_n2` rows.
void save_triplets(const std::filesystem::path& path, const NeighborTriplets& triplets);

}  // namespace infohoc
