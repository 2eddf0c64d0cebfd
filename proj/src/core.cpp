#include "infohoc/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

namespace infohoc {

namespace {

void check_labels(const std::vector<Label>& labels, int k, std::string_view what) {
  for (Label y : labels) {
    if (y < 0 || y >= k) {
      throw Error(std::string(what) + " label out of range: " + std::to_string(y) +
                  " not in [0," + std::to_string(k) + ")");
    }
  }
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) {
      c.remove_suffix(1);
    }
  }
  return cells;
}

double parse_double(std::string_view cell, std::size_t line_no) {
  double v = 0.0;
  // from_chars rejects a leading '+'
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error("line " + std::to_string(line_no) + ": cannot parse number '" +
                std::string(cell) + "'");
  }
  if (!std::isfinite(v)) {
    throw Error("line " + std::to_string(line_no) + ": non-finite feature");
  }
  return v;
}

Label parse_label(std::string_view cell, std::size_t line_no) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error("line " + std::to_string(line_no) + ": label is not an integer: '" +
                std::string(cell) + "'");
  }
  return static_cast<Label>(v);
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void Dataset::validate() const {
  const std::size_t n = noisy_labels.size();
  if (k < 2) throw Error("class count must be at least 2");
  if (n < 3) throw Error("dataset needs N >= 3 rows, got " + std::to_string(n));
  if (features.cols() < 1) throw Error("dataset needs at least one feature column");
  if (static_cast<std::size_t>(features.rows()) != n) {
    throw Error("feature rows do not match label count");
  }
  if (!features.allFinite()) throw Error("non-finite feature");
  check_labels(noisy_labels, k, "noisy");
  if (clean_labels) {
    if (clean_labels->size() != n) throw Error("clean label count does not match");
    check_labels(*clean_labels, k, "clean");
  }
  if (!ids.empty() && ids.size() != n) throw Error("id count does not match");
}

Dataset make_dataset(FeatureMatrix features, std::vector<Label> noisy,
                     std::optional<std::vector<Label>> clean, std::optional<int> k) {
  Dataset d;
  d.features = std::move(features);
  d.noisy_labels = std::move(noisy);
  d.clean_labels = std::move(clean);
  if (k) {
    d.k = *k;
  } else {
    Label hi = 0;
    for (Label y : d.noisy_labels) hi = std::max(hi, y);
    if (d.clean_labels) {
      for (Label y : *d.clean_labels) hi = std::max(hi, y);
    }
    d.k = std::max(2, hi + 1);
  }
  d.validate();
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw Error("empty dataset file: " + path.string());
  if (header.size() >= 3 && header.compare(0, 3, "\xEF\xBB\xBF") == 0) header.erase(0, 3);
  const auto names = split_csv_line(header);

  // Feature columns f0..f{d-1} are located by name and kept in index order.
  std::vector<std::pair<int, std::size_t>> feature_cols;
  std::optional<std::size_t> noisy_col, clean_col, id_col;
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto name = names[c];
    if (name == schema.noisy_column) {
      noisy_col = c;
    } else if (name == schema.clean_column) {
      clean_col = c;
    } else if (name == schema.id_column) {
      id_col = c;
    } else if (name.size() > schema.feature_prefix.size() &&
               name.substr(0, schema.feature_prefix.size()) == schema.feature_prefix) {
      const auto suffix = name.substr(schema.feature_prefix.size());
      int idx = -1;
      auto [ptr, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), idx);
      if (ec == std::errc() && ptr == suffix.data() + suffix.size() && idx >= 0) {
        feature_cols.emplace_back(idx, c);
      }
    }
  }
  if (!noisy_col) throw Error("missing column: " + schema.noisy_column);
  if (feature_cols.empty()) throw Error("missing feature columns " + schema.feature_prefix + "0..");
  std::sort(feature_cols.begin(), feature_cols.end());
  for (std::size_t i = 0; i < feature_cols.size(); ++i) {
    if (feature_cols[i].first != static_cast<int>(i)) {
      throw Error("missing column: " + schema.feature_prefix + std::to_string(i));
    }
  }

  const std::size_t d = feature_cols.size();
  std::vector<double> values;
  std::vector<Label> noisy;
  std::vector<Label> clean;
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != names.size()) {
      throw Error("line " + std::to_string(line_no) + ": expected " +
                  std::to_string(names.size()) + " cells, got " + std::to_string(cells.size()));
    }
    for (const auto& [idx, c] : feature_cols) values.push_back(parse_double(cells[c], line_no));
    noisy.push_back(parse_label(cells[*noisy_col], line_no));
    if (clean_col) clean.push_back(parse_label(cells[*clean_col], line_no));
    if (id_col) ids.emplace_back(cells[*id_col]);
  }

  const std::size_t n = noisy.size();
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::copy(values.begin(), values.end(), x.data());
  std::optional<std::vector<Label>> clean_opt;
  if (clean_col) clean_opt = std::move(clean);
  Dataset data = make_dataset(std::move(x), std::move(noisy), std::move(clean_opt), schema.k);
  data.ids = std::move(ids);
  data.validate();
  return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data,
                  const DatasetSchema& schema) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset: " + path.string());
  const bool with_ids = !data.ids.empty();
  if (with_ids) out << schema.id_column << ',';
  for (std::size_t j = 0; j < data.dim(); ++j) out << schema.feature_prefix << j << ',';
  out << schema.noisy_column;
  if (data.clean_labels) out << ',' << schema.clean_column;
  out << '\n';
  for (std::size_t n = 0; n < data.size(); ++n) {
    if (with_ids) out << data.ids[n] << ',';
    for (double v : data.row(n)) out << format_double(v) << ',';
    out << data.noisy_labels[n];
    if (data.clean_labels) out << ',' << (*data.clean_labels)[n];
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

TransitionMatrix validate_transition(Eigen::MatrixXd t, std::optional<Eigen::VectorXd> p) {
  if (t.rows() != t.cols() || t.rows() < 1) throw Error("transition matrix must be square");
  if (!t.allFinite()) throw Error("transition matrix has non-finite entries");
  if ((t.array() < 0.0).any()) throw Error("transition matrix has a negative entry");
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    if (t.row(i).maxCoeff() > 1.0 + kRowSumTolerance) throw Error("transition entry exceeds 1");
    const double s = t.row(i).sum();
    if (std::abs(s - 1.0) > kRowSumTolerance) {
      throw Error("row sum of row " + std::to_string(i) + " is " + format_double(s));
    }
  }
  if (p) {
    if (p->size() != t.rows()) throw Error("prior length does not match K");
    if ((p->array() < 0.0).any() || (p->array() > 1.0 + kRowSumTolerance).any()) {
      throw Error("prior entries must lie in [0,1]");
    }
    if (std::abs(p->sum() - 1.0) > kRowSumTolerance) throw Error("prior does not sum to 1");
  }
  return TransitionMatrix{std::move(t), std::move(p)};
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::PlainHoc: return "plain-hoc";
    case Variant::XKl: return "x-kl";
    case Variant::XTv: return "x-tv";
    case Variant::AKl: return "a-kl";
    case Variant::ATv: return "a-tv";
  }
  return "?";
}

std::string_view to_string(Activation a) {
  return a == Activation::MinMax ? "minmax" : "log-minmax";
}

Variant parse_variant(std::string_view s) {
  for (Variant v : {Variant::PlainHoc, Variant::XKl, Variant::XTv, Variant::AKl, Variant::ATv}) {
    if (to_string(v) == s) return v;
  }
  throw Error("unknown variant: " + std::string(s));
}

Activation parse_activation(std::string_view s) {
  if (s == "minmax") return Activation::MinMax;
  if (s == "log-minmax") return Activation::LogMinMax;
  throw Error("unknown activation: " + std::string(s));
}

void EstimatorConfig::validate() const {
  if (bins < 2) throw Error("bins must be >= 2");
  if (optimizer.max_iters < 1) throw Error("max_iters must be >= 1");
  if (!(optimizer.step_size > 0.0)) throw Error("step_size must be > 0");
  if (optimizer.restarts < 0) throw Error("restarts must be >= 0");
  if (!(optimizer.tolerance >= 0.0)) throw Error("tolerance must be >= 0");
  if (!(eigen_floor >= 0.0 && eigen_floor < 1.0)) throw Error("eigen_floor must be in [0,1)");
}

double CounterRng::exponential() {
  return -std::log1p(-uniform());
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk) {
  if (n == 0) return;
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, (n + min_chunk - 1) / std::max<std::size_t>(1, min_chunk));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace infohoc
