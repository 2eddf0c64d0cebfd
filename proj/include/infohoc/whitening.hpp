#pragma once
// Feature decorrelation: z = diag(lambda)^(-1/2) P^T (x - mean), with P the
// eigenvectors of the centered second-moment matrix.

#include <span>
#include <vector>

#include "infohoc/core.hpp"

namespace infohoc {

struct WhiteningTransform {
  Eigen::VectorXd mean;          // length d
  Eigen::MatrixXd eigenvectors;  // d x r, orthonormal columns
  Eigen::VectorXd eigenvalues;   // length r, positive, descending

  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t rank() const { return static_cast<std::size_t>(eigenvalues.size()); }

  /// Projects one sample (length d) to its whitened coordinates (length r).
  Eigen::VectorXd project(std::span<const double> x) const;
  /// Inverse map P diag(lambda)^(1/2) z + mean. Exact only when r = d.
  Eigen::VectorXd unproject(const Eigen::VectorXd& z) const;
};

/// Eigen-decomposes (1/N) sum (x - mean)(x - mean)^T. Directions with
/// eigenvalue below eigen_floor * lambda_max are dropped. Each eigenvector
/// is signed so that its largest-magnitude component is positive.
WhiteningTransform fit_whitening(const Dataset& data, double eigen_floor = 1e-10);

/// Returns a copy of `data` with features replaced by the whitened
/// coordinates; labels and ids are carried through.
Dataset apply_whitening(const WhiteningTransform& transform, const Dataset& data);

FeatureMatrix apply_whitening(const WhiteningTransform& transform, const FeatureMatrix& x);

}  // namespace infohoc
