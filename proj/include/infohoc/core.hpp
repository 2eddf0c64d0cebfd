#pragma once
// Shared data model for transition-matrix estimation: datasets, transition
// matrices, estimator configuration and the report every command emits.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace infohoc {

/// Row-major so that a sample is a contiguous span.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Label = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------
// Dataset
// ------------------------------------------------------------------

/// N feature vectors with noisy labels in [0,k) and optionally the clean
/// labels they were derived from.
struct Dataset {
  FeatureMatrix features;
  std::vector<Label> noisy_labels;
  std::optional<std::vector<Label>> clean_labels;
  int k = 0;
  std::vector<std::string> ids;  // empty when the source had no id column

  std::size_t size() const { return noisy_labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  bool has_clean() const { return clean_labels.has_value(); }

  std::span<const double> row(std::size_t n) const {
    return {features.data() + n * features.cols(), static_cast<std::size_t>(features.cols())};
  }

  /// Throws Error when any invariant fails (N >= 3, d >= 1, finite
  /// features, labels in range, matching lengths).
  void validate() const;
};

/// Builds and validates a dataset. When `k` is absent it is inferred as
/// 1 + the largest label seen (noisy or clean), and at least 2.
Dataset make_dataset(FeatureMatrix features, std::vector<Label> noisy,
                     std::optional<std::vector<Label>> clean = std::nullopt,
                     std::optional<int> k = std::nullopt);

/// Column names used when reading/writing the dataset CSV.
struct DatasetSchema {
  std::string feature_prefix = "f";
  std::string noisy_column = "noisy_label";
  std::string clean_column = "clean_label";
  std::string id_column = "id";
  std::optional<int> k;
};

Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema = {});
void save_dataset(const std::filesystem::path& path, const Dataset& data,
                  const DatasetSchema& schema = {});

// ------------------------------------------------------------------
// Transition matrix
// ------------------------------------------------------------------

/// T_ij = P(noisy = j | clean = i), optionally with the clean prior p.
struct TransitionMatrix {
  Eigen::MatrixXd t;
  std::optional<Eigen::VectorXd> p;

  int k() const { return static_cast<int>(t.rows()); }
};

inline constexpr double kRowSumTolerance = 1e-6;

/// Checks squareness, non-negativity and row sums (and the prior, if any).
TransitionMatrix validate_transition(Eigen::MatrixXd t,
                                     std::optional<Eigen::VectorXd> p = std::nullopt);

/// Binary-task noise rates: e1 = P(noisy=2|clean=1), e2 = P(noisy=1|clean=2).
struct NoiseRatePair {
  double e1 = 0.0;
  double e2 = 0.0;
};

// ------------------------------------------------------------------
// Configuration
// ------------------------------------------------------------------

enum class Variant { PlainHoc, XKl, XTv, AKl, ATv };
enum class Activation { MinMax, LogMinMax };

std::string_view to_string(Variant v);
std::string_view to_string(Activation a);
Variant parse_variant(std::string_view s);
Activation parse_activation(std::string_view s);

/// Controls the consensus-matching solve. `step_size` is the initial
/// damping of the Levenberg-Marquardt iteration; `tolerance` is the
/// stationarity threshold used both for early stopping and for the
/// convergence flag.
struct OptimizerConfig {
  double step_size = 1e-2;
  int max_iters = 3000;
  int restarts = 10;
  double tolerance = 1e-8;
};

struct EstimatorConfig {
  Variant variant = Variant::ATv;
  int bins = 15;
  Activation activation = Activation::MinMax;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  double eigen_floor = 1e-10;

  void validate() const;
};

// ------------------------------------------------------------------
// Report
// ------------------------------------------------------------------

/// Empirical (or model-implied) frequencies of first/second/third order
/// noisy-label consensus patterns. c3 is stored flat, index (j*K + l)*K + m.
struct ConsensusStatistics {
  int k = 0;
  Eigen::VectorXd c1;
  Eigen::MatrixXd c2;
  std::vector<double> c3;
  std::size_t n = 0;

  double& at3(int j, int l, int m) { return c3[(static_cast<std::size_t>(j) * k + l) * k + m]; }
  double at3(int j, int l, int m) const {
    return c3[(static_cast<std::size_t>(j) * k + l) * k + m];
  }
};

struct WeightVector {
  std::vector<double> w;
  Activation activation = Activation::MinMax;
};

struct Report {
  TransitionMatrix estimated_t;
  std::optional<WeightVector> weights;
  std::optional<double> error;
  ConsensusStatistics consensus;
  EstimatorConfig config;
  bool converged = true;
  double final_loss = 0.0;
  int iterations_used = 0;
  std::size_t retained_dims = 0;
  std::vector<std::pair<std::string, double>> timings;  // stage -> seconds
};

// ------------------------------------------------------------------
// Deterministic randomness
// ------------------------------------------------------------------

/// SplitMix64 stream keyed by (seed, counter). Satisfies
/// UniformRandomBitGenerator; independent counters give independent
/// streams, which keeps row-parallel draws reproducible.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
      : state_(mix(seed ^ mix(counter + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

  /// Uniform on [0,1) with 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Exp(1) draw.
  double exponential();
  /// Standard normal (Box-Muller, one value per call).
  double normal();

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

// ------------------------------------------------------------------
// Parallelism
// ------------------------------------------------------------------

/// Splits [0,n) into contiguous chunks and runs fn(begin, end) on each,
/// using up to hardware_concurrency threads. Exceptions are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 64);

}  // namespace infohoc
