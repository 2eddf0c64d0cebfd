#include "infohoc/serialize.hpp"

#include <fstream>

namespace infohoc {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error("expected a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error("ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json to_json(const TransitionMatrix& t) {
  json j{{"k", t.k()}, {"t", matrix_to_json(t.t)}};
  if (t.p) j["p"] = vector_to_json(*t.p);
  return j;
}

TransitionMatrix transition_from_json(const json& j) {
  try {
    Eigen::MatrixXd t = matrix_from_json(j.at("t"));
    std::optional<Eigen::VectorXd> p;
    if (j.contains("p") && !j["p"].is_null()) p = vector_from_json(j["p"]);
    if (j.contains("k") && j["k"].get<int>() != t.rows()) throw Error("k does not match matrix size");
    return validate_transition(std::move(t), std::move(p));
  } catch (const json::exception& e) {
    throw Error(std::string("bad transition json: ") + e.what());
  }
}

json to_json(const ConsensusStatistics& c) {
  return json{{"k", c.k},
              {"n", c.n},
              {"c1", vector_to_json(c.c1)},
              {"c2", matrix_to_json(c.c2)},
              {"c3", c.c3}};
}

ConsensusStatistics consensus_from_json(const json& j) {
  ConsensusStatistics c;
  c.k = j.at("k").get<int>();
  c.n = j.at("n").get<std::size_t>();
  c.c1 = vector_from_json(j.at("c1"));
  c.c2 = matrix_from_json(j.at("c2"));
  c.c3 = j.at("c3").get<std::vector<double>>();
  const auto k = static_cast<std::size_t>(c.k);
  if (static_cast<std::size_t>(c.c1.size()) != k || static_cast<std::size_t>(c.c2.rows()) != k ||
      c.c3.size() != k * k * k) {
    throw Error("consensus statistics have inconsistent sizes");
  }
  return c;
}

json to_json(const EstimatorConfig& c) {
  return json{{"variant", std::string(to_string(c.variant))},
              {"bins", c.bins},
              {"activation", std::string(to_string(c.activation))},
              {"optimizer",
               {{"step_size", c.optimizer.step_size},
                {"max_iters", c.optimizer.max_iters},
                {"restarts", c.optimizer.restarts},
                {"tolerance", c.optimizer.tolerance}}},
              {"seed", c.seed},
              {"eigen_floor", c.eigen_floor}};
}

EstimatorConfig config_from_json(const json& j) {
  EstimatorConfig c;
  if (j.contains("variant")) c.variant = parse_variant(j["variant"].get<std::string>());
  if (j.contains("bins")) c.bins = j["bins"].get<int>();
  if (j.contains("activation")) c.activation = parse_activation(j["activation"].get<std::string>());
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    c.optimizer.step_size = o.value("step_size", c.optimizer.step_size);
    c.optimizer.max_iters = o.value("max_iters", c.optimizer.max_iters);
    c.optimizer.restarts = o.value("restarts", c.optimizer.restarts);
    c.optimizer.tolerance = o.value("tolerance", c.optimizer.tolerance);
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("eigen_floor")) c.eigen_floor = j["eigen_floor"].get<double>();
  c.validate();
  return c;
}

json to_json(const WhiteningTransform& w) {
  return json{{"mean", vector_to_json(w.mean)},
              {"eigenvalues", vector_to_json(w.eigenvalues)},
              {"eigenvectors", matrix_to_json(w.eigenvectors)}};
}

WhiteningTransform whitening_from_json(const json& j) {
  WhiteningTransform w;
  w.mean = vector_from_json(j.at("mean"));
  w.eigenvalues = vector_from_json(j.at("eigenvalues"));
  w.eigenvectors = matrix_from_json(j.at("eigenvectors"));
  if (w.eigenvectors.rows() != w.mean.size() || w.eigenvectors.cols() != w.eigenvalues.size()) {
    throw Error("whitening transform has inconsistent sizes");
  }
  return w;
}

json to_json(const Report& r) {
  json j{{"estimated_t", to_json(r.estimated_t)},
         {"consensus", to_json(r.consensus)},
         {"config", to_json(r.config)},
         {"converged", r.converged},
         {"final_loss", r.final_loss},
         {"iterations_used", r.iterations_used},
         {"retained_dims", r.retained_dims}};
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  if (r.weights) {
    j["weights"] = {{"w", r.weights->w}, {"activation", std::string(to_string(r.weights->activation))}};
  } else {
    j["weights"] = nullptr;
  }
  json timings = json::object();
  for (const auto& [stage, secs] : r.timings) timings[stage] = secs;
  j["timings"] = std::move(timings);
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  r.estimated_t = transition_from_json(j.at("estimated_t"));
  r.consensus = consensus_from_json(j.at("consensus"));
  r.config = config_from_json(j.at("config"));
  r.converged = j.at("converged").get<bool>();
  r.final_loss = j.at("final_loss").get<double>();
  r.iterations_used = j.at("iterations_used").get<int>();
  r.retained_dims = j.at("retained_dims").get<std::size_t>();
  if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<double>();
  if (j.contains("weights") && !j["weights"].is_null()) {
    WeightVector w;
    w.w = j["weights"].at("w").get<std::vector<double>>();
    w.activation = parse_activation(j["weights"].at("activation").get<std::string>());
    r.weights = std::move(w);
  }
  if (j.contains("timings")) {
    for (const auto& [stage, secs] : j["timings"].items()) r.timings.emplace_back(stage, secs.get<double>());
  }
  return r;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

TransitionMatrix load_transition(const std::filesystem::path& path) {
  return transition_from_json(read_json(path));
}

void save_transition(const std::filesystem::path& path, const TransitionMatrix& t) {
  write_json(path, to_json(t));
}

Report load_report(const std::filesystem::path& path) { return report_from_json(read_json(path)); }

void save_report(const std::filesystem::path& path, const Report& r) { write_json(path, to_json(r)); }

}  // namespace infohoc
