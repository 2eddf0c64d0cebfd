#pragma once
// Plug-in f-mutual information between a scalar feature and a discrete
// label, the order-preserving weight map, and the noise-bias bounds for
// KL-based mutual information under binary class-dependent noise.

#include <span>
#include <string_view>
#include <vector>

#include "infohoc/core.hpp"

namespace infohoc {

/// KL and TV are implemented. The rest are listed for completeness and
/// rejected by the estimators.
enum class FDivergence {
  KL,
  TV,
  JensenShannon,
  SquaredHellinger,
  PearsonChi2,
  NeymanChi2,
  ReverseKL,
};

std::string_view to_string(FDivergence f);
FDivergence parse_divergence(std::string_view s);

struct MIEstimate {
  std::vector<double> per_dim;
  FDivergence kind = FDivergence::KL;
  int bins = 15;
};

/// Equal-frequency binning. A value's bin is floor(#{v < x} * B / N), so
/// tied values always share a bin and the result does not depend on row
/// order. Returns one bin index per row, each in [0, B).
std::vector<int> quantile_bins(std::span<const double> column, int bins);

/// Divergence between the empirical joint of (binned column, label) and
/// the product of its marginals. KL is in bits.
double estimate_fmi(std::span<const double> column, std::span<const Label> labels, int k,
                    FDivergence kind, int bins);

/// estimate_fmi for every column of `x`, computed concurrently.
MIEstimate estimate_fmi_columns(const FeatureMatrix& x, std::span<const Label> labels, int k,
                                FDivergence kind, int bins);

inline constexpr double kWeightFloor = 1e-3;
inline constexpr double kLogInputFloor = 1e-6;

/// Maps per-dimension information to weights in (0,1] with max exactly 1.
/// Non-decreasing in the information value.
WeightVector build_weights(const MIEstimate& mi, Activation activation);
WeightVector build_weights(std::span<const double> info, Activation activation);

// --- noise-bias bounds (binary labels, log base 2) ---

/// H(e) in bits, with 0 log 0 = 0.
double binary_entropy(double e);

/// Worst-case order-preservation threshold
///   e[d log d - (1+d) log(1+d)] + H(e),  e = max(e1,e2), d = min/max.
double kl_order_gap(NoiseRatePair rates);

/// Bias that label noise adds to the pointwise mutual-information term at
/// clean posterior ratio beta = P(Y=1|z).
double kl_noise_bias(double beta, NoiseRatePair rates);

/// max - min of kl_noise_bias over beta in [beta_lo, beta_hi].
double practical_gap(NoiseRatePair rates, double beta_lo = 1.0 / 6.0,
                     double beta_hi = 5.0 / 6.0);

}  // namespace infohoc
