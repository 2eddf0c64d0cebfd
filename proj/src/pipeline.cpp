#include "infohoc/pipeline.hpp"

#include <chrono>

#include "infohoc/eval.hpp"
#include "infohoc/hoc.hpp"
#include "infohoc/whitening.hpp"

namespace infohoc {

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}

  void mark(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(std::move(stage), std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

VariantSpec VariantSpec::of(Variant v) {
  switch (v) {
    case Variant::PlainHoc: return {false, std::nullopt};
    case Variant::XKl: return {false, FDivergence::KL};
    case Variant::XTv: return {false, FDivergence::TV};
    case Variant::AKl: return {true, FDivergence::KL};
    case Variant::ATv: return {true, FDivergence::TV};
  }
  throw Error("unknown variant");
}

SimilarityWeights pipeline_weights(const FeatureMatrix& features, std::span<const Label> noisy,
                                   int k, const EstimatorConfig& config,
                                   std::optional<WeightVector>* weights_out) {
  const VariantSpec spec = VariantSpec::of(config.variant);
  if (!spec.divergence) {
    if (weights_out) weights_out->reset();
    return SimilarityWeights::identity();
  }
  const MIEstimate mi = estimate_fmi_columns(features, noisy, k, *spec.divergence, config.bins);
  WeightVector wv = build_weights(mi, config.activation);
  SimilarityWeights sw = SimilarityWeights::diagonal(wv);
  if (weights_out) *weights_out = std::move(wv);
  return sw;
}

EstimateArtifacts estimate_with_artifacts(const Dataset& data, const EstimatorConfig& config,
                                          const std::optional<TransitionMatrix>& true_t) {
  config.validate();
  data.validate();
  if (true_t && true_t->k() != data.k) throw Error("true T has a different K than the dataset");

  EstimateArtifacts out;
  Report& rep = out.report;
  rep.config = config;
  StageClock clock(rep.timings);

  const VariantSpec spec = VariantSpec::of(config.variant);
  const Dataset* working = &data;
  Dataset whitened;
  if (spec.whiten) {
    const WhiteningTransform transform = fit_whitening(data, config.eigen_floor);
    whitened = apply_whitening(transform, data);
    working = &whitened;
    clock.mark("whiten");
  }
  rep.retained_dims = working->dim();

  const SimilarityWeights w =
      pipeline_weights(working->features, working->noisy_labels, data.k, config, &rep.weights);
  if (spec.divergence) clock.mark("weights");

  out.triplets = get_2nn_triplets(*working, w);
  clock.mark("neighbors");
  rep.consensus = count_consensus(out.triplets, data.k);
  clock.mark("consensus");

  HocSolution sol = solve_transition(rep.consensus, config.optimizer, config.seed);
  clock.mark("solve");
  rep.estimated_t = std::move(sol.t);
  rep.converged = sol.converged;
  rep.final_loss = sol.final_loss;
  rep.iterations_used = sol.iterations_used;
  if (true_t) rep.error = estimation_error(*true_t, rep.estimated_t);
  return out;
}

Report estimate(const Dataset& data, const EstimatorConfig& config,
                const std::optional<TransitionMatrix>& true_t) {
  return estimate_with_artifacts(data, config, true_t).report;
}

}  // namespace infohoc
