#pragma once
// Estimation error between transition matrices and a downstream check:
// a linear softmax classifier trained on noisy labels, optionally with
// forward loss correction.

#include <cstdint>
#include <optional>

#include "infohoc/core.hpp"

namespace infohoc {

/// sum_ij |T_ij - T^_ij| / (2K).
double estimation_error(const TransitionMatrix& t_true, const TransitionMatrix& t_hat);
double estimation_error(const Eigen::MatrixXd& t_true, const Eigen::MatrixXd& t_hat);

struct TrainConfig {
  int epochs = 500;
  double step_size = 0.5;
  std::uint64_t seed = 0;
};

enum class LossMode { Plain, Forward };

struct DownstreamResult {
  double last_epoch_accuracy = 0.0;
  double best_epoch_accuracy = 0.0;
  int best_epoch = 0;
  int epochs = 0;
  LossMode loss_mode = LossMode::Plain;
  std::vector<double> accuracy_per_epoch;
};

/// Full-batch gradient descent on softmax(W x + b). Without `t` the loss
/// is cross-entropy against the noisy labels; with `t` it is
/// -log((T^T softmax(W x + b))_noisy). Accuracy is measured on the clean
/// labels of `test` after every epoch.
DownstreamResult train_linear(const Dataset& train, const Dataset& test,
                              const std::optional<TransitionMatrix>& t, const TrainConfig& config);

/// Fraction of rows where argmax(W x + b) equals the label.
double accuracy(const FeatureMatrix& x, std::span<const Label> labels, const Eigen::MatrixXd& w,
                const Eigen::VectorXd& b);

}  // namespace infohoc
