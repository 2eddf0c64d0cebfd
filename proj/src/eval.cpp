#include "infohoc/eval.hpp"

#include <cmath>

namespace infohoc {

double estimation_error(const Eigen::MatrixXd& t_true, const Eigen::MatrixXd& t_hat) {
  if (t_true.rows() != t_hat.rows() || t_true.cols() != t_hat.cols()) {
    throw Error("estimation_error: shape mismatch");
  }
  if (t_true.rows() == 0) throw Error("estimation_error: empty matrix");
  return (t_true - t_hat).cwiseAbs().sum() / (2.0 * static_cast<double>(t_true.rows()));
}

double estimation_error(const TransitionMatrix& t_true, const TransitionMatrix& t_hat) {
  return estimation_error(t_true.t, t_hat.t);
}

namespace {

// Row-wise softmax of x W + b, in place into `s`.
void softmax_rows(const FeatureMatrix& x, const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                  Eigen::MatrixXd& s) {
  s.noalias() = x * w;
  s.rowwise() += b.transpose();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double m = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - m).exp();
    s.row(i) /= s.row(i).sum();
  }
}

}  // namespace

double accuracy(const FeatureMatrix& x, std::span<const Label> labels, const Eigen::MatrixXd& w,
                const Eigen::VectorXd& b) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw Error("accuracy: length mismatch");
  if (labels.empty()) return 0.0;
  const Eigen::MatrixXd z = (x * w).rowwise() + b.transpose();
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::Index arg = 0;
    z.row(i).maxCoeff(&arg);
    if (arg == labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

DownstreamResult train_linear(const Dataset& train, const Dataset& test,
                              const std::optional<TransitionMatrix>& t, const TrainConfig& config) {
  if (config.epochs < 1) throw Error("epochs must be >= 1");
  if (!(config.step_size > 0.0)) throw Error("step size must be positive");
  if (train.dim() != test.dim()) throw Error("train and test dimensions differ");
  if (train.k != test.k) throw Error("train and test K differ");
  if (!test.clean_labels) throw Error("test set needs clean labels");
  const int k = train.k;
  if (t) {
    if (t->k() != k) throw Error("transition matrix K does not match dataset K");
    validate_transition(t->t);
  }
  {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    int distinct = 0;
    for (Label y : train.noisy_labels) {
      if (!seen[y]) {
        seen[y] = true;
        ++distinct;
      }
    }
    if (distinct < 2) throw Error("training labels contain a single class");
  }

  const auto n = static_cast<Eigen::Index>(train.size());
  const auto d = static_cast<Eigen::Index>(train.dim());
  Eigen::MatrixXd w(d, k);
  CounterRng rng(config.seed);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = 0.01 * rng.normal();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);

  DownstreamResult res;
  res.loss_mode = t ? LossMode::Forward : LossMode::Plain;
  res.epochs = config.epochs;
  res.accuracy_per_epoch.reserve(static_cast<std::size_t>(config.epochs));

  Eigen::MatrixXd s(n, k);
  Eigen::MatrixXd g(n, k);
  const double scale = config.step_size / static_cast<double>(n);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    softmax_rows(train.features, w, b, s);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = train.noisy_labels[static_cast<std::size_t>(i)];
      if (t) {
        double q = 0.0;
        for (int c = 0; c < k; ++c) q += t->t(c, y) * s(i, c);
        for (int c = 0; c < k; ++c) g(i, c) = s(i, c) - (s(i, c) * t->t(c, y)) / q;
      } else {
        for (int c = 0; c < k; ++c) g(i, c) = s(i, c) - (c == y ? 1.0 : 0.0);
      }
    }
    w.noalias() -= scale * (train.features.transpose() * g);
    b -= scale * g.colwise().sum().transpose();

    const double acc = accuracy(test.features, *test.clean_labels, w, b);
    res.accuracy_per_epoch.push_back(acc);
    if (acc > res.best_epoch_accuracy || epoch == 0) {
      res.best_epoch_accuracy = acc;
      res.best_epoch = epoch;
    }
  }
  res.last_epoch_accuracy = res.accuracy_per_epoch.back();
  return res;
}

}  // namespace infohoc
