#pragma once
// End-to-end estimator: optional whitening, per-dimension f-MI on the
// noisy labels, weighted 2-NN, consensus counting and the (T, p) solve.

#include <optional>

#include "infohoc/core.hpp"
#include "infohoc/infotheory.hpp"
#include "infohoc/similarity.hpp"

namespace infohoc {

struct VariantSpec {
  bool whiten = false;
  std::optional<FDivergence> divergence;  // none => identity weights

  static VariantSpec of(Variant v);
};

struct EstimateArtifacts {
  Report report;
  NeighborTriplets triplets;
};

/// Runs the estimator. When `true_t` is given the report carries the
/// estimation error against it.
Report estimate(const Dataset& data, const EstimatorConfig& config,
                const std::optional<TransitionMatrix>& true_t = std::nullopt);

/// Same as estimate() but also returns the neighbour triplets.
EstimateArtifacts estimate_with_artifacts(const Dataset& data, const EstimatorConfig& config,
                                          const std::optional<TransitionMatrix>& true_t =
                                              std::nullopt);

/// Weights the pipeline would use for `features` (already whitened when
/// the variant asks for it). Identity for plain-hoc.
SimilarityWeights pipeline_weights(const FeatureMatrix& features, std::span<const Label> noisy,
                                   int k, const EstimatorConfig& config,
                                   std::optional<WeightVector>* weights_out = nullptr);

}  // namespace infohoc
