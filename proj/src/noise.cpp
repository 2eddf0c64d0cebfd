#include "infohoc/noise.hpp"

#include <algorithm>
#include <cmath>

namespace infohoc {

namespace {

constexpr int kMaxRowAttempts = 100;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool strictly_dominant(const Eigen::MatrixXd& t, int i) {
  for (int j = 0; j < t.cols(); ++j) {
    if (j != i && !(t(i, i) > t(i, j))) return false;
  }
  return true;
}

}  // namespace

TransitionMatrix build_transition(const NoiseScheme& scheme, int k) {
  if (k < 2) throw Error("need K >= 2");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  std::visit(
      overloaded{
          [&](const BinaryNoise& b) {
            if (k != 2) throw Error("binary noise requires K = 2");
            if (!(b.e1 >= 0.0 && b.e2 >= 0.0 && b.e1 + b.e2 < 1.0)) {
              throw Error("binary noise requires e1, e2 >= 0 and e1 + e2 < 1");
            }
            t << 1.0 - b.e1, b.e1, b.e2, 1.0 - b.e2;
          },
          [&](const DirichletNoise& d) {
            if (!(d.avg_rate >= 0.0) || !(d.jitter >= 0.0)) {
              throw Error("dirichlet noise requires avg_rate >= 0 and jitter >= 0");
            }
            if (!(d.avg_rate + d.jitter < static_cast<double>(k - 1) / k)) {
              throw Error("dirichlet noise requires avg_rate + jitter < (K-1)/K");
            }
            for (int i = 0; i < k; ++i) {
              CounterRng rng(scheme.seed, static_cast<std::uint64_t>(i));
              bool ok = false;
              for (int attempt = 0; attempt < kMaxRowAttempts && !ok; ++attempt) {
                const double u = std::max(0.0, d.avg_rate + rng.uniform(-d.jitter, d.jitter));
                std::vector<double> g(static_cast<std::size_t>(k - 1));
                double total = 0.0;
                for (double& v : g) total += (v = rng.exponential());
                t(i, i) = 1.0 - u;
                int idx = 0;
                double off = 0.0;
                for (int j = 0; j < k; ++j) {
                  if (j == i) continue;
                  t(i, j) = u * g[idx++] / total;
                  off += t(i, j);
                }
                // absorb round-off into the diagonal so the row sums to 1
                t(i, i) = 1.0 - off;
                ok = strictly_dominant(t, i);
              }
              if (!ok) throw Error("could not draw a diagonally dominant row");
            }
          },
      },
      scheme.kind);
  return validate_transition(std::move(t));
}

double avg_noise_rate_from_r(double r, int k) {
  if (!(r > 0.0)) throw Error("r must be positive");
  if (k < 2) throw Error("need K >= 2");
  return 1.0 / (1.0 + r / std::sqrt(static_cast<double>(k - 1)));
}

Dataset inject_noise(const Dataset& data, const TransitionMatrix& t, std::uint64_t seed) {
  if (!data.clean_labels) throw Error("inject_noise needs clean labels");
  if (t.k() != data.k) throw Error("transition matrix K does not match dataset K");
  validate_transition(t.t);
  Dataset out = data;
  const auto& clean = *data.clean_labels;
  parallel_for(data.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      CounterRng rng(seed, n);
      const double u = rng.uniform();
      const int y = clean[n];
      double acc = 0.0;
      Label pick = data.k - 1;
      for (int j = 0; j < data.k; ++j) {
        acc += t.t(y, j);
        if (u < acc) {
          pick = j;
          break;
        }
      }
      // zero-probability trailing columns are never chosen
      while (pick > 0 && t.t(y, pick) == 0.0) --pick;
      out.noisy_labels[n] = pick;
    }
  });
  return out;
}

Eigen::MatrixXd empirical_confusion(std::span<const Label> clean, std::span<const Label> noisy,
                                    int k) {
  if (clean.size() != noisy.size()) throw Error("label lengths differ");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t n = 0; n < clean.size(); ++n) c(clean[n], noisy[n]) += 1.0;
  for (int i = 0; i < k; ++i) {
    const double s = c.row(i).sum();
    if (s > 0.0) c.row(i) /= s;
  }
  return c;
}

Dataset make_gaussian_blobs(const BlobSpec& spec, std::uint64_t seed) {
  if (spec.k < 2) throw Error("need K >= 2");
  if (spec.informative < 0 || spec.uninformative < 0 || spec.informative + spec.uninformative < 1) {
    throw Error("need at least one feature dimension");
  }
  if (spec.mixing && (spec.mixing->rows() != spec.informative ||
                      spec.mixing->cols() != spec.informative)) {
    throw Error("mixing matrix must be informative x informative");
  }
  Eigen::VectorXd prior = spec.prior.value_or(Eigen::VectorXd::Constant(spec.k, 1.0 / spec.k));
  if (prior.size() != spec.k) throw Error("prior length must equal K");
  prior /= prior.sum();

  const auto n = static_cast<Eigen::Index>(spec.n);
  const int d = spec.informative + spec.uninformative;
  FeatureMatrix x(n, d);
  std::vector<Label> y(spec.n);
  parallel_for(spec.n, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd noise(spec.informative);
    for (std::size_t r = begin; r < end; ++r) {
      CounterRng rng(seed, r);
      const double u = rng.uniform();
      double acc = 0.0;
      Label c = spec.k - 1;
      for (int j = 0; j < spec.k; ++j) {
        acc += prior(j);
        if (u < acc) {
          c = j;
          break;
        }
      }
      y[r] = c;
      for (int j = 0; j < spec.informative; ++j) noise(j) = rng.normal();
      if (spec.mixing) noise = spec.mixing->transpose() * noise;
      const auto row = static_cast<Eigen::Index>(r);
      for (int j = 0; j < spec.informative; ++j) {
        double mean = 0.0;
        if (spec.k == 2) {
          mean = c == 1 ? spec.separation : -spec.separation;
        } else if (j % spec.k == c) {
          mean = spec.separation;
        }
        x(row, j) = mean + noise(j);
      }
      for (int j = 0; j < spec.uninformative; ++j) {
        x(row, spec.informative + j) = spec.uninformative_scale * rng.normal();
      }
    }
  });
  return make_dataset(std::move(x), y, y, spec.k);
}

}  // namespace infohoc
