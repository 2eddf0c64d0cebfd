#include "infohoc/whitening.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace infohoc {

namespace {

constexpr double kRoundoffCorrelation = 1e-12;

}  // namespace

WhiteningTransform fit_whitening(const Dataset& data, double eigen_floor) {
  const auto n = data.features.rows();
  const auto d = data.features.cols();
  if (n < 2) throw Error("whitening needs at least 2 rows");

  WhiteningTransform w;
  w.mean = data.features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.features.rowwise() - w.mean.transpose();
  Eigen::MatrixXd second_moment = (centered.transpose() * centered) / static_cast<double>(n);
  // symmetrize away round-off before the solver
  second_moment = 0.5 * (second_moment + second_moment.transpose()).eval();
  // Correlations at round-off level are zeroed so data that is already
  // white keeps its axes instead of picking up an arbitrary rotation.
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double scale = std::sqrt(second_moment(i, i) * second_moment(j, j));
      if (std::abs(second_moment(i, j)) <= kRoundoffCorrelation * scale) second_moment(i, j) = 0.0;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(second_moment);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");

  // Eigen returns ascending order.
  const Eigen::VectorXd& vals = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const double lambda_max = vals(d - 1);
  if (!(lambda_max > 0.0)) throw Error("all feature variance is zero");
  const double cutoff = eigen_floor * lambda_max;

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (vals(i) > cutoff && vals(i) > 0.0) kept.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(kept.size());
  w.eigenvalues.resize(r);
  w.eigenvectors.resize(d, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    Eigen::VectorXd v = vecs.col(kept[static_cast<std::size_t>(c)]);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    w.eigenvectors.col(c) = v;
    w.eigenvalues(c) = vals(kept[static_cast<std::size_t>(c)]);
  }
  return w;
}

Eigen::VectorXd WhiteningTransform::project(std::span<const double> x) const {
  if (x.size() != input_dim()) throw Error("whitening: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd z = eigenvectors.transpose() * (xv - mean);
  return z.cwiseQuotient(eigenvalues.cwiseSqrt());
}

Eigen::VectorXd WhiteningTransform::unproject(const Eigen::VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != rank()) throw Error("whitening: rank mismatch");
  return eigenvectors * z.cwiseProduct(eigenvalues.cwiseSqrt()) + mean;
}

FeatureMatrix apply_whitening(const WhiteningTransform& transform, const FeatureMatrix& x) {
  if (static_cast<std::size_t>(x.cols()) != transform.input_dim()) {
    throw Error("whitening: dimension mismatch (transform d=" +
                std::to_string(transform.input_dim()) + ", data d=" + std::to_string(x.cols()) +
                ")");
  }
  const Eigen::MatrixXd scaled =
      transform.eigenvectors * transform.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  FeatureMatrix z = (x.rowwise() - transform.mean.transpose()) * scaled;
  return z;
}

Dataset apply_whitening(const WhiteningTransform& transform, const Dataset& data) {
  Dataset out;
  out.features = apply_whitening(transform, data.features);
  out.noisy_labels = data.noisy_labels;
  out.clean_labels = data.clean_labels;
  out.k = data.k;
  out.ids = data.ids;
  return out;
}

}  // namespace infohoc
