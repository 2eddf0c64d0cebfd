// infohoc command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "infohoc/eval.hpp"
#include "infohoc/hoc.hpp"
#include "infohoc/infotheory.hpp"
#include "infohoc/noise.hpp"
#include "infohoc/pipeline.hpp"
#include "infohoc/serialize.hpp"
#include "infohoc/whitening.hpp"

namespace {

using namespace infohoc;

struct EstimateArgs {
  std::string input, output, true_t, triplets, variant = "a-tv", activation = "minmax";
  int bins = 15;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iters = 3000;
};

int run_estimate(const EstimateArgs& a) {
  EstimatorConfig cfg;
  cfg.variant = parse_variant(a.variant);
  cfg.activation = parse_activation(a.activation);
  cfg.bins = a.bins;
  cfg.seed = a.seed;
  cfg.optimizer.restarts = a.restarts;
  cfg.optimizer.max_iters = a.max_iters;
  const Dataset data = load_dataset(a.input);
  std::optional<TransitionMatrix> truth;
  if (!a.true_t.empty()) truth = load_transition(a.true_t);
  const auto art = estimate_with_artifacts(data, cfg, truth);
  if (!a.triplets.empty()) save_triplets(a.triplets, art.triplets);
  if (a.output.empty()) {
    std::cout << to_json(art.report).dump(2) << '\n';
  } else {
    save_report(a.output, art.report);
  }
  if (!art.report.converged) std::cerr << "warning: solver did not converge\n";
  if (art.report.error) std::cerr << "error: " << *art.report.error << '\n';
  return 0;
}

struct MiArgs {
  std::string input, output, divergence = "tv", activation = "minmax";
  int bins = 15;
  bool whiten = false;
  double eigen_floor = 1e-10;
};

int run_mi(const MiArgs& a) {
  Dataset data = load_dataset(a.input);
  if (a.whiten) data = apply_whitening(fit_whitening(data, a.eigen_floor), data);
  const auto mi = estimate_fmi_columns(data.features, data.noisy_labels, data.k,
                                       parse_divergence(a.divergence), a.bins);
  const auto w = build_weights(mi, parse_activation(a.activation));
  std::ofstream file;
  if (!a.output.empty()) {
    file.open(a.output);
    if (!file) throw Error("cannot write " + a.output);
  }
  std::ostream& out = a.output.empty() ? std::cout : file;
  out.precision(17);
  out << "dim,mi,weight\n";
  for (std::size_t i = 0; i < mi.per_dim.size(); ++i) {
    out << i << ',' << mi.per_dim[i] << ',' << w.w[i] << '\n';
  }
  return 0;
}

int run_bound(double e1, double e2, double lo, double hi) {
  const NoiseRatePair r{e1, e2};
  nlohmann::json j{{"e1", e1},
                   {"e2", e2},
                   {"epsilon", kl_order_gap(r)},
                   {"practical_gap", practical_gap(r, lo, hi)},
                   {"beta_lo", lo},
                   {"beta_hi", hi}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct InjectArgs {
  std::string input, output, scheme = "symmetric";
  double e1 = 0.2, e2 = 0.1, r = -1.0, rate = -1.0, jitter = 0.05;
  std::uint64_t seed = 0;
};

int run_inject(const InjectArgs& a) {
  Dataset data = load_dataset(a.input);
  if (!data.clean_labels) {
    // a file without clean_label: treat the given labels as clean
    data.clean_labels = data.noisy_labels;
  }
  NoiseScheme scheme;
  scheme.seed = a.seed;
  if (a.scheme == "symmetric") {
    scheme.kind = BinaryNoise{a.e1, a.e1};
  } else if (a.scheme == "asymmetric") {
    scheme.kind = BinaryNoise{a.e1, a.e2};
  } else if (a.scheme == "dirichlet") {
    double e = a.rate;
    if (a.r > 0.0) e = avg_noise_rate_from_r(a.r, data.k);
    if (e < 0.0) throw Error("dirichlet scheme needs --r or --rate");
    scheme.kind = DirichletNoise{e, a.jitter};
  } else {
    throw Error("unknown scheme: " + a.scheme);
  }
  const TransitionMatrix t = build_transition(scheme, data.k);
  const Dataset noisy = inject_noise(data, t, a.seed);
  save_dataset(a.output, noisy);
  save_transition(a.output + ".true_t.json", t);
  return 0;
}

int run_eval(const std::string& estimated, const std::string& truth) {
  const nlohmann::json j = read_json(estimated);
  // accept either a full report or a bare transition matrix
  const TransitionMatrix t_hat =
      j.contains("estimated_t") ? transition_from_json(j["estimated_t"]) : transition_from_json(j);
  const TransitionMatrix t_true = load_transition(truth);
  std::printf("%.10g\n", estimation_error(t_true, t_hat));
  return 0;
}

struct TrainArgs {
  std::string train, test, t, mode = "plain";
  int epochs = 500;
  double step_size = 0.5;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  const Dataset train = load_dataset(a.train);
  DatasetSchema schema;
  schema.k = train.k;
  const Dataset test = load_dataset(a.test, schema);
  std::optional<TransitionMatrix> t;
  if (a.mode == "forward") {
    if (a.t.empty()) throw Error("forward mode needs --t");
    const nlohmann::json j = read_json(a.t);
    t = j.contains("estimated_t") ? transition_from_json(j["estimated_t"]) : transition_from_json(j);
  } else if (a.mode != "plain") {
    throw Error("unknown mode: " + a.mode);
  }
  TrainConfig cfg{a.epochs, a.step_size, a.seed};
  const auto res = train_linear(train, test, t, cfg);
  nlohmann::json j{{"mode", a.mode},
                   {"epochs", res.epochs},
                   {"last_epoch_accuracy", res.last_epoch_accuracy},
                   {"best_epoch_accuracy", res.best_epoch_accuracy},
                   {"best_epoch", res.best_epoch}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct SynthArgs {
  std::string output;
  std::size_t n = 1000;
  int k = 2, informative = 10, uninformative = 0;
  double separation = 1.0, scale = 1.0;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& a) {
  BlobSpec spec;
  spec.n = a.n;
  spec.k = a.k;
  spec.informative = a.informative;
  spec.uninformative = a.uninformative;
  spec.separation = a.separation;
  spec.uninformative_scale = a.scale;
  save_dataset(a.output, make_gaussian_blobs(spec, a.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-noise transition matrix estimation"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate T from a noisy-labelled CSV");
  c_est->add_option("--input", est.input, "dataset CSV")->required()->check(CLI::ExistingFile);
  c_est->add_option("--variant", est.variant, "plain-hoc|x-kl|x-tv|a-kl|a-tv")->capture_default_str();
  c_est->add_option("--bins", est.bins, "histogram bins for MI")->capture_default_str();
  c_est->add_option("--activation", est.activation, "minmax|log-minmax")->capture_default_str();
  c_est->add_option("--seed", est.seed)->capture_default_str();
  c_est->add_option("--restarts", est.restarts)->capture_default_str();
  c_est->add_option("--max-iters", est.max_iters)->capture_default_str();
  c_est->add_option("--output", est.output, "report JSON (stdout if omitted)");
  c_est->add_option("--true-t", est.true_t, "true T JSON for error reporting")->check(CLI::ExistingFile);
  c_est->add_option("--triplets", est.triplets, "dump 2-NN triplets as CSV");

  MiArgs mi;
  auto* c_mi = app.add_subcommand("mi", "Per-dimension f-MI against the noisy labels");
  c_mi->add_option("--input", mi.input)->required()->check(CLI::ExistingFile);
  c_mi->add_option("--divergence", mi.divergence, "kl|tv")->capture_default_str();
  c_mi->add_option("--bins", mi.bins)->capture_default_str();
  c_mi->add_option("--activation", mi.activation)->capture_default_str();
  c_mi->add_flag("--whiten", mi.whiten, "whiten features first");
  c_mi->add_option("--output", mi.output, "CSV path (stdout if omitted)");

  double b_e1 = 0.0, b_e2 = 0.0, b_lo = 1.0 / 6.0, b_hi = 5.0 / 6.0;
  auto* c_bound = app.add_subcommand("bound", "KL order-preservation gap and practical gap");
  c_bound->add_option("--e1", b_e1)->required();
  c_bound->add_option("--e2", b_e2)->required();
  c_bound->add_option("--beta-lo", b_lo)->capture_default_str();
  c_bound->add_option("--beta-hi", b_hi)->capture_default_str();

  InjectArgs inj;
  auto* c_inj = app.add_subcommand("inject-noise", "Redraw noisy labels from a synthetic T");
  c_inj->add_option("--input", inj.input)->required()->check(CLI::ExistingFile);
  c_inj->add_option("--output", inj.output)->required();
  c_inj->add_option("--scheme", inj.scheme, "symmetric|asymmetric|dirichlet")->capture_default_str();
  c_inj->add_option("--e1", inj.e1)->capture_default_str();
  c_inj->add_option("--e2", inj.e2)->capture_default_str();
  c_inj->add_option("--r", inj.r, "dirichlet: e = 1/(1 + r/sqrt(K-1))");
  c_inj->add_option("--rate", inj.rate, "dirichlet: average noise rate");
  c_inj->add_option("--jitter", inj.jitter)->capture_default_str();
  c_inj->add_option("--seed", inj.seed)->capture_default_str();

  std::string ev_est, ev_true;
  auto* c_eval = app.add_subcommand("eval", "Estimation error between two matrices");
  c_eval->add_option("--estimated", ev_est, "report or T JSON")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--true", ev_true, "T JSON")->required()->check(CLI::ExistingFile);

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Linear classifier with optional forward correction");
  c_train->add_option("--train", tr.train)->required()->check(CLI::ExistingFile);
  c_train->add_option("--test", tr.test)->required()->check(CLI::ExistingFile);
  c_train->add_option("--t", tr.t, "T or report JSON for forward mode")->check(CLI::ExistingFile);
  c_train->add_option("--mode", tr.mode, "plain|forward")->capture_default_str();
  c_train->add_option("--epochs", tr.epochs)->capture_default_str();
  c_train->add_option("--step-size", tr.step_size)->capture_default_str();
  c_train->add_option("--seed", tr.seed)->capture_default_str();

  SynthArgs sy;
  auto* c_synth = app.add_subcommand("synth", "Gaussian blob dataset with clean labels");
  c_synth->add_option("--output", sy.output)->required();
  c_synth->add_option("--n", sy.n)->capture_default_str();
  c_synth->add_option("--k", sy.k)->capture_default_str();
  c_synth->add_option("--informative", sy.informative)->capture_default_str();
  c_synth->add_option("--uninformative", sy.uninformative)->capture_default_str();
  c_synth->add_option("--separation", sy.separation)->capture_default_str();
  c_synth->add_option("--uninformative-scale", sy.scale)->capture_default_str();
  c_synth->add_option("--seed", sy.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_est) return run_estimate(est);
    if (*c_mi) return run_mi(mi);
    if (*c_bound) return run_bound(b_e1, b_e2, b_lo, b_hi);
    if (*c_inj) return run_inject(inj);
    if (*c_eval) return run_eval(ev_est, ev_true);
    if (*c_train) return run_train(tr);
    if (*c_synth) return run_synth(sy);
  } catch (const std::exception& e) {
    std::cerr << "infohoc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
