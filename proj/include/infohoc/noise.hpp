#pragma once
// Synthetic class-dependent label noise and the synthetic feature
// generator used by the benchmark harness.

#include <cstdint>
#include <optional>
#include <variant>

#include "infohoc/core.hpp"

namespace infohoc {

struct BinaryNoise {
  double e1 = 0.0;  // P(noisy=1 | clean=0)
  double e2 = 0.0;  // P(noisy=0 | clean=1)
};

/// Each row i draws a noise level u = max(0, avg_rate + Unif(-jitter, jitter)),
/// sets T_ii = 1 - u and spreads u over the other cells by Dir(1).
struct DirichletNoise {
  double avg_rate = 0.0;
  double jitter = 0.05;
};

struct NoiseScheme {
  std::variant<BinaryNoise, DirichletNoise> kind;
  std::uint64_t seed = 0;
};

TransitionMatrix build_transition(const NoiseScheme& scheme, int k);

/// e = 1 / (1 + r / sqrt(K - 1)).
double avg_noise_rate_from_r(double r, int k);

/// Redraws every noisy label from row T[clean]. Row n uses its own
/// counter-based stream, so the result is independent of threading.
Dataset inject_noise(const Dataset& data, const TransitionMatrix& t, std::uint64_t seed);

/// Row-normalised counts of (clean, noisy) pairs. Rows without any
/// sample are left at zero.
Eigen::MatrixXd empirical_confusion(std::span<const Label> clean, std::span<const Label> noisy,
                                    int k);

/// Gaussian classes: `informative` dimensions carry the class signal,
/// `uninformative` dimensions are pure N(0, uninformative_scale^2).
/// For K = 2 the class means are +-separation on every informative
/// dimension; for K > 2 class c is shifted by `separation` on informative
/// dimensions j with j % K == c. An optional informative-block mixing
/// matrix A maps the unit noise to A^T-correlated noise.
struct BlobSpec {
  std::size_t n = 1000;
  int k = 2;
  int informative = 10;
  int uninformative = 0;
  double separation = 1.0;
  double uninformative_scale = 1.0;
  std::optional<Eigen::MatrixXd> mixing;
  std::optional<Eigen::VectorXd> prior;
};

/// Returns a dataset whose noisy labels equal the clean labels.
Dataset make_gaussian_blobs(const BlobSpec& spec, std::uint64_t seed);

}  // namespace infohoc
