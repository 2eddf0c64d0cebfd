#include "infohoc/infotheory.hpp"

#include <algorithm>
#include <cmath>

namespace infohoc {

namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

void check_rates(NoiseRatePair r) {
  if (!(r.e1 >= 0.0) || !(r.e2 >= 0.0)) throw Error("noise rates must be non-negative");
  if (!(r.e1 + r.e2 < 1.0)) throw Error("noise rates must satisfy e1 + e2 < 1");
}

}  // namespace

std::string_view to_string(FDivergence f) {
  switch (f) {
    case FDivergence::KL: return "kl";
    case FDivergence::TV: return "tv";
    case FDivergence::JensenShannon: return "js";
    case FDivergence::SquaredHellinger: return "hellinger";
    case FDivergence::PearsonChi2: return "pearson";
    case FDivergence::NeymanChi2: return "neyman";
    case FDivergence::ReverseKL: return "reverse-kl";
  }
  return "?";
}

FDivergence parse_divergence(std::string_view s) {
  for (FDivergence f : {FDivergence::KL, FDivergence::TV, FDivergence::JensenShannon,
                        FDivergence::SquaredHellinger, FDivergence::PearsonChi2,
                        FDivergence::NeymanChi2, FDivergence::ReverseKL}) {
    if (to_string(f) == s) return f;
  }
  throw Error("unknown divergence: " + std::string(s));
}

std::vector<int> quantile_bins(std::span<const double> column, int bins) {
  const std::size_t n = column.size();
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto below = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), column[i]) - sorted.begin());
    out[i] = static_cast<int>((below * static_cast<std::size_t>(bins)) / n);
  }
  return out;
}

double estimate_fmi(std::span<const double> column, std::span<const Label> labels, int k,
                    FDivergence kind, int bins) {
  if (kind != FDivergence::KL && kind != FDivergence::TV) {
    throw Error("f-divergence not implemented: " + std::string(to_string(kind)));
  }
  if (bins < 2) throw Error("bins must be >= 2");
  if (column.size() != labels.size()) throw Error("column and label lengths differ");
  const std::size_t n = column.size();
  if (n < static_cast<std::size_t>(bins)) throw Error("need at least as many rows as bins");
  for (Label y : labels) {
    if (y < 0 || y >= k) throw Error("label out of range");
  }

  // Work on integer counts so independent cells cancel exactly.
  const auto bin = quantile_bins(column, bins);
  std::vector<double> joint(static_cast<std::size_t>(bins) * k, 0.0);
  std::vector<double> nb(bins, 0.0), ny(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[static_cast<std::size_t>(bin[i]) * k + labels[i]] += 1.0;
    nb[bin[i]] += 1.0;
    ny[labels[i]] += 1.0;
  }
  const double total = static_cast<double>(n);

  double acc = 0.0;
  for (int b = 0; b < bins; ++b) {
    for (int y = 0; y < k; ++y) {
      const double nj = joint[static_cast<std::size_t>(b) * k + y];
      const double prod = nb[b] * ny[y];
      if (kind == FDivergence::KL) {
        if (nj > 0.0) acc += nj * std::log2(total * nj / prod);
      } else {
        acc += std::abs(total * nj - prod);
      }
    }
  }
  acc /= kind == FDivergence::KL ? total : total * total;
  if (kind == FDivergence::TV) acc *= 0.5;
  // log2 round-off can leave a tiny negative KL on independent cells
  return std::max(0.0, acc);
}

MIEstimate estimate_fmi_columns(const FeatureMatrix& x, std::span<const Label> labels, int k,
                                FDivergence kind, int bins) {
  MIEstimate est;
  est.kind = kind;
  est.bins = bins;
  est.per_dim.assign(static_cast<std::size_t>(x.cols()), 0.0);
  parallel_for(
      est.per_dim.size(),
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> col(static_cast<std::size_t>(x.rows()));
        for (std::size_t j = begin; j < end; ++j) {
          for (Eigen::Index i = 0; i < x.rows(); ++i) col[i] = x(i, static_cast<Eigen::Index>(j));
          est.per_dim[j] = estimate_fmi(col, labels, k, kind, bins);
        }
      },
      1);
  return est;
}

WeightVector build_weights(std::span<const double> info, Activation activation) {
  if (info.empty()) throw Error("no dimensions to weight");
  std::vector<double> v(info.begin(), info.end());
  if (activation == Activation::LogMinMax) {
    for (double& x : v) x = std::log2(std::max(x, kLogInputFloor));
  }
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  WeightVector out;
  out.activation = activation;
  out.w.assign(v.size(), 1.0);
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.w[i] = std::max(kWeightFloor, (v[i] - lo) / (hi - lo));
  }
  const double top = *std::max_element(out.w.begin(), out.w.end());
  for (double& w : out.w) w /= top;
  return out;
}

WeightVector build_weights(const MIEstimate& mi, Activation activation) {
  return build_weights(mi.per_dim, activation);
}

double binary_entropy(double e) { return -xlog2x(e) - xlog2x(1.0 - e); }

double kl_order_gap(NoiseRatePair rates) {
  check_rates(rates);
  const double big = std::max(rates.e1, rates.e2);
  if (big == 0.0) return 0.0;
  const double delta = std::min(rates.e1, rates.e2) / big;
  const double eps = big * (xlog2x(delta) - xlog2x(1.0 + delta)) + binary_entropy(big);
  return std::max(0.0, eps);
}

double kl_noise_bias(double beta, NoiseRatePair rates) {
  check_rates(rates);
  if (!(beta >= 0.0 && beta < 1.0)) throw Error("beta must lie in [0,1)");
  const double scale = 1.0 - rates.e1 - rates.e2;
  const double a = scale * beta + rates.e2;
  return xlog2x(a) + xlog2x(1.0 - a) - scale * (xlog2x(beta) + xlog2x(1.0 - beta));
}

double practical_gap(NoiseRatePair rates, double beta_lo, double beta_hi) {
  check_rates(rates);
  if (!(beta_lo >= 0.0 && beta_lo <= beta_hi && beta_hi < 1.0)) {
    throw Error("beta range must satisfy 0 <= lo <= hi < 1");
  }
  const double total = rates.e1 + rates.e2;
  if (total == 0.0) return 0.0;
  // Increasing on [0, beta*], decreasing after, with beta* = e2 / (e1 + e2).
  const double peak = std::clamp(rates.e2 / total, beta_lo, beta_hi);
  const double hi = kl_noise_bias(peak, rates);
  const double lo = std::min(kl_noise_bias(beta_lo, rates), kl_noise_bias(beta_hi, rates));
  return std::max(0.0, hi - lo);
}

}  // namespace infohoc
