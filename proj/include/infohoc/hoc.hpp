#pragma once
// High-order consensus: count noisy-label agreement patterns over 2-NN
// triplets and recover (T, p) whose implied pattern probabilities match.

#include <cstdint>
#include <vector>

#include "infohoc/core.hpp"
#include "infohoc/similarity.hpp"

namespace infohoc {

struct HocSolution {
  TransitionMatrix t;  // t.p holds the clean prior
  Eigen::VectorXd p;
  double final_loss = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

ConsensusStatistics count_consensus(const NeighborTriplets& triplets, int k);

/// Pattern probabilities when the three labels of a triplet are
/// independent noisy copies of one shared clean label:
///   c1_j = sum_i p_i T_ij,  c2_jl = sum_i p_i T_ij T_il,
///   c3_jlm = sum_i p_i T_ij T_il T_im.
ConsensusStatistics model_consensus(const Eigen::MatrixXd& t, const Eigen::VectorXd& p);

/// Sum of squared differences over all three orders.
double consensus_loss(const ConsensusStatistics& observed, const Eigen::MatrixXd& t,
                      const Eigen::VectorXd& p);

/// Minimises consensus_loss over row-softmax T and softmax p from one
/// near-identity start plus `restarts` seeded random starts, keeping the
/// lowest loss. Rows of the result are permuted to maximise the trace.
HocSolution solve_transition(const ConsensusStatistics& stats, const OptimizerConfig& config,
                             std::uint64_t seed);

/// Row permutation maximising the trace (assignment problem). perm[i] is
/// the source row that lands in row i.
std::vector<int> max_trace_permutation(const Eigen::MatrixXd& t);

namespace detail {

/// Free parameters: off-diagonal logits of each row of T (diagonal logit
/// pinned at 0), then logits 1..K-1 of p (logit 0 pinned).
struct SoftmaxParams {
  int k = 0;
  Eigen::VectorXd theta;

  static int size_for(int k) { return k * (k - 1) + (k - 1); }
  Eigen::MatrixXd transition() const;
  Eigen::VectorXd prior() const;
};

/// Stacked residuals [c1 - c1_obs, c2 - c2_obs, c3 - c3_obs] and their
/// Jacobian with respect to theta.
void residuals_and_jacobian(const ConsensusStatistics& observed, const SoftmaxParams& params,
                            Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian);

}  // namespace detail

}  // namespace infohoc
