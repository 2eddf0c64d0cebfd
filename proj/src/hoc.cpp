#include "infohoc/hoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace infohoc {

ConsensusStatistics count_consensus(const NeighborTriplets& triplets, int k) {
  if (k < 1) throw Error("class count must be positive");
  ConsensusStatistics s;
  s.k = k;
  s.c1 = Eigen::VectorXd::Zero(k);
  s.c2 = Eigen::MatrixXd::Zero(k, k);
  s.c3.assign(static_cast<std::size_t>(k) * k * k, 0.0);
  s.n = triplets.triples.size();
  if (s.n == 0) throw Error("no triplets to count");
  for (const auto& t : triplets.triples) {
    if (t.y < 0 || t.y >= k || t.y1 < 0 || t.y1 >= k || t.y2 < 0 || t.y2 >= k) {
      throw Error("triplet label out of range");
    }
    s.c1(t.y) += 1.0;
    s.c2(t.y, t.y1) += 1.0;
    s.at3(t.y, t.y1, t.y2) += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(s.n);
  s.c1 *= inv;
  s.c2 *= inv;
  for (double& v : s.c3) v *= inv;
  return s;
}

ConsensusStatistics model_consensus(const Eigen::MatrixXd& t, const Eigen::VectorXd& p) {
  const auto k = static_cast<int>(t.rows());
  if (t.cols() != k || p.size() != k) throw Error("model_consensus: dimension mismatch");
  ConsensusStatistics s;
  s.k = k;
  s.c1 = t.transpose() * p;
  s.c2 = Eigen::MatrixXd::Zero(k, k);
  s.c3.assign(static_cast<std::size_t>(k) * k * k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double pij = p(i) * t(i, j);
      for (int l = 0; l < k; ++l) {
        const double pijl = pij * t(i, l);
        s.c2(j, l) += pijl;
        for (int m = 0; m < k; ++m) s.at3(j, l, m) += pijl * t(i, m);
      }
    }
  }
  return s;
}

double consensus_loss(const ConsensusStatistics& observed, const Eigen::MatrixXd& t,
                      const Eigen::VectorXd& p) {
  const auto model = model_consensus(t, p);
  if (model.k != observed.k) throw Error("consensus_loss: class count mismatch");
  double loss = (model.c1 - observed.c1).squaredNorm() + (model.c2 - observed.c2).squaredNorm();
  for (std::size_t i = 0; i < model.c3.size(); ++i) {
    const double r = model.c3[i] - observed.c3[i];
    loss += r * r;
  }
  return loss;
}

namespace detail {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

}  // namespace

Eigen::MatrixXd SoftmaxParams::transition() const {
  Eigen::MatrixXd t(k, k);
  Eigen::VectorXd logits(k);
  for (int i = 0; i < k; ++i) {
    int idx = i * (k - 1);
    for (int j = 0; j < k; ++j) logits(j) = (j == i) ? 0.0 : theta(idx++);
    t.row(i) = softmax(logits).transpose();
  }
  return t;
}

Eigen::VectorXd SoftmaxParams::prior() const {
  Eigen::VectorXd logits(k);
  logits(0) = 0.0;
  for (int j = 1; j < k; ++j) logits(j) = theta(k * (k - 1) + j - 1);
  return softmax(logits);
}

void residuals_and_jacobian(const ConsensusStatistics& observed, const SoftmaxParams& params,
                            Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian) {
  const int k = params.k;
  const Eigen::MatrixXd t = params.transition();
  const Eigen::VectorXd p = params.prior();
  const auto model = model_consensus(t, p);

  const int k2 = k * k;
  const int k3 = k2 * k;
  const int rows = k + k2 + k3;
  residuals.resize(rows);
  residuals.head(k) = model.c1 - observed.c1;
  for (int j = 0; j < k; ++j) {
    for (int l = 0; l < k; ++l) residuals(k + j * k + l) = model.c2(j, l) - observed.c2(j, l);
  }
  for (int i = 0; i < k3; ++i) residuals(k + k2 + i) = model.c3[i] - observed.c3[i];
  if (jacobian == nullptr) return;

  // Derivatives with respect to the probabilities themselves.
  Eigen::MatrixXd d_t = Eigen::MatrixXd::Zero(rows, k2);  // column a*k + b -> T_ab
  Eigen::MatrixXd d_p = Eigen::MatrixXd::Zero(rows, k);
  for (int a = 0; a < k; ++a) {
    const double pa = p(a);
    for (int j = 0; j < k; ++j) {
      d_p(j, a) = t(a, j);
      d_t(j, a * k + j) += pa;
      for (int l = 0; l < k; ++l) {
        const int r2 = k + j * k + l;
        d_p(r2, a) = t(a, j) * t(a, l);
        d_t(r2, a * k + j) += pa * t(a, l);
        d_t(r2, a * k + l) += pa * t(a, j);
        for (int m = 0; m < k; ++m) {
          const int r3 = k + k2 + (j * k + l) * k + m;
          d_p(r3, a) = t(a, j) * t(a, l) * t(a, m);
          d_t(r3, a * k + j) += pa * t(a, l) * t(a, m);
          d_t(r3, a * k + l) += pa * t(a, j) * t(a, m);
          d_t(r3, a * k + m) += pa * t(a, j) * t(a, l);
        }
      }
    }
  }

  // Chain through the softmax maps: dT_ab/du_ac = T_ab (delta_bc - T_ac).
  jacobian->resize(rows, SoftmaxParams::size_for(k));
  int col = 0;
  for (int a = 0; a < k; ++a) {
    Eigen::VectorXd row_mean = Eigen::VectorXd::Zero(rows);
    for (int b = 0; b < k; ++b) row_mean += t(a, b) * d_t.col(a * k + b);
    for (int c = 0; c < k; ++c) {
      if (c == a) continue;
      jacobian->col(col++) = t(a, c) * (d_t.col(a * k + c) - row_mean);
    }
  }
  const Eigen::VectorXd prior_mean = d_p * p;
  for (int c = 1; c < k; ++c) jacobian->col(col++) = p(c) * (d_p.col(c) - prior_mean);
}

}  // namespace detail

namespace {

struct RunResult {
  Eigen::VectorXd theta;
  double loss = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt on the stacked residuals.
RunResult run_lm(const ConsensusStatistics& observed, Eigen::VectorXd theta,
                 const OptimizerConfig& config) {
  const int k = observed.k;
  detail::SoftmaxParams params{k, std::move(theta)};
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  detail::residuals_and_jacobian(observed, params, r, &jac);
  double loss = r.squaredNorm();

  RunResult out;
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::VectorXd grad = jac.transpose() * r;
  double lambda = config.step_size * std::max(1e-12, jtj.diagonal().maxCoeff());
  int it = 0;
  for (; it < config.max_iters; ++it) {
    if (loss <= 1e-30 || grad.lpNorm<Eigen::Infinity>() <= config.tolerance) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd a = jtj;
    a.diagonal().array() += lambda;
    const Eigen::VectorXd step = a.ldlt().solve(-grad);
    if (!step.allFinite()) {
      lambda *= 10.0;
      continue;
    }
    detail::SoftmaxParams trial{k, params.theta + step};
    Eigen::VectorXd r_trial;
    detail::residuals_and_jacobian(observed, trial, r_trial, nullptr);
    const double trial_loss = r_trial.squaredNorm();
    if (trial_loss < loss) {
      params = std::move(trial);
      const double rel_step = step.norm() / (params.theta.norm() + config.tolerance);
      loss = trial_loss;
      detail::residuals_and_jacobian(observed, params, r, &jac);
      jtj = jac.transpose() * jac;
      grad = jac.transpose() * r;
      lambda = std::max(lambda / 3.0, 1e-15);
      if (rel_step <= config.tolerance) {
        out.converged = true;
        ++it;
        break;
      }
    } else {
      lambda *= 4.0;
      if (lambda > 1e16) {
        // no descent direction left at this precision
        out.converged = true;
        ++it;
        break;
      }
    }
  }
  out.theta = std::move(params.theta);
  out.loss = loss;
  out.iterations = it;
  return out;
}

}  // namespace

std::vector<int> max_trace_permutation(const Eigen::MatrixXd& t) {
  // Hungarian algorithm (potentials form) minimising -T(source, position).
  const int n = static_cast<int>(t.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);  // match[source] = position
  auto cost = [&](int position, int source) { return -t(source - 1, position - 1); };
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(n);
  for (int j = 1; j <= n; ++j) perm[match[j] - 1] = j - 1;
  return perm;
}

HocSolution solve_transition(const ConsensusStatistics& stats, const OptimizerConfig& config,
                             std::uint64_t seed) {
  const int k = stats.k;
  if (k < 2) throw Error("solve_transition needs K >= 2");
  if (stats.c1.size() != k || stats.c2.rows() != k || stats.c2.cols() != k ||
      stats.c3.size() != static_cast<std::size_t>(k) * k * k) {
    throw Error("consensus statistics have inconsistent shapes");
  }

  const int np = detail::SoftmaxParams::size_for(k);
  const int starts = 1 + std::max(0, config.restarts);
  std::vector<Eigen::VectorXd> inits(starts, Eigen::VectorXd::Zero(np));
  // Start 0: T with 0.9 on the diagonal, uniform prior.
  inits[0].head(k * (k - 1)).setConstant(std::log(0.1 / (k - 1) / 0.9));
  for (int s = 1; s < starts; ++s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    for (int i = 0; i < np; ++i) inits[s](i) = rng.normal();
  }

  std::vector<RunResult> runs(starts);
  parallel_for(
      static_cast<std::size_t>(starts),
      [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) runs[s] = run_lm(stats, inits[s], config);
      },
      1);

  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    if (runs[s].loss < runs[best].loss) best = s;
  }

  detail::SoftmaxParams params{k, runs[best].theta};
  const Eigen::MatrixXd raw_t = params.transition();
  const Eigen::VectorXd raw_p = params.prior();
  const auto perm = max_trace_permutation(raw_t);
  Eigen::MatrixXd t(k, k);
  Eigen::VectorXd p(k);
  for (int i = 0; i < k; ++i) {
    t.row(i) = raw_t.row(perm[i]);
    p(i) = raw_p(perm[i]);
  }

  HocSolution sol;
  sol.p = p;
  sol.t = TransitionMatrix{t, p};
  sol.final_loss = runs[best].loss;
  sol.iterations_used = runs[best].iterations;
  sol.converged = runs[best].converged;
  return sol;
}

}  // namespace infohoc
