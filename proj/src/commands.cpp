#include "kspin/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kspin/combinatorics.hpp"
#include "kspin/error.hpp"
#include "kspin/experiment.hpp"
#include "kspin/genes.hpp"
#include "kspin/hypergen.hpp"
#include "kspin/learner.hpp"
#include "kspin/sampler.hpp"
#include "kspin/samples.hpp"
#include "kspin/tensor_io.hpp"

namespace kspin {

namespace {

using nlohmann::json;

// Opens `path` for writing, or hands back `fallback` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path == "-" || path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error(ErrorKind::Io, "cannot write " + path);
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }
  void close() {
    stream_->flush();
    if (!*stream_) throw Error(ErrorKind::Io, "write failed for " + path_);
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

struct LearnFlags {
  std::string method = "rise";
  std::string lambda = "bic";
  double lambda_value = 0.1;
  double eps = 0.05;
  std::vector<double> multipliers;
  std::vector<double> lambda_values;
  std::optional<double> beta_hint;
  std::optional<int> degree_hint;
  std::optional<double> support_threshold;
  std::string reconcile = "mean";
  std::string bic_scaling = "scaled";
  int max_iterations = SolverConfig{}.max_iterations;
  double tol_kkt = SolverConfig{}.tol_kkt;
  double tol_rel = SolverConfig{}.tol_rel_objective;
  int jobs = 1;

  void attach(CLI::App* app) {
    app->add_option("--method", method, "rise | rple")->capture_default_str();
    app->add_option("--lambda", lambda, "bic | theorem | fixed")->capture_default_str();
    app->add_option("--lambda-value", lambda_value, "lambda for --lambda fixed")->capture_default_str();
    app->add_option("--eps", eps, "failure probability in the lambda scale")->capture_default_str();
    app->add_option("--multipliers", multipliers, "BIC grid multipliers of the lambda scale");
    app->add_option("--lambda-values", lambda_values, "explicit BIC grid of lambda values");
    app->add_option("--beta-hint", beta_hint, "beta for the RISE theorem lambda (default 1)");
    app->add_option("--degree-hint", degree_hint, "degree for the RISE theorem lambda (default 1)");
    app->add_option("--support-threshold", support_threshold, "drop reconciled weights below this magnitude");
    app->add_option("--reconcile", reconcile, "mean | min | max")->capture_default_str();
    app->add_option("--bic-scaling", bic_scaling, "scaled | literal")->capture_default_str();
    app->add_option("--max-iterations", max_iterations)->capture_default_str();
    app->add_option("--tol-kkt", tol_kkt)->capture_default_str();
    app->add_option("--tol-rel", tol_rel)->capture_default_str();
    app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  }

  LambdaRule rule() const {
    if (lambda == "bic") return BicGridLambda{multipliers, lambda_values, eps};
    if (lambda == "theorem") return TheoremLambda{eps, beta_hint, degree_hint};
    if (lambda == "fixed") return FixedLambda{lambda_value};
    throw Error(ErrorKind::InvalidArgument, "unknown lambda rule '" + lambda + "' (bic|theorem|fixed)");
  }

  LearnConfig config(double default_threshold) const {
    LearnConfig cfg;
    cfg.method = parse_method(method);
    cfg.lambda_rule = rule();
    cfg.support_threshold = support_threshold.value_or(default_threshold);
    cfg.reconcile = parse_reconcile(reconcile);
    cfg.bic_scaling = parse_bic_scaling(bic_scaling);
    cfg.solver.max_iterations = max_iterations;
    cfg.solver.tol_kkt = tol_kkt;
    cfg.solver.tol_rel_objective = tol_rel;
    cfg.jobs = jobs;
    cfg.validate();
    return cfg;
  }
};

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

void print_stats(std::ostream& os, const InteractionTensor& J) {
  const GraphStats s = graph_stats(J);
  os << "p=" << J.p() << " k=" << J.k() << " edges=" << J.edge_count() << " beta_max=" << format_double(s.beta_max)
     << " d_max=" << s.d_max << " degrees=" << join(s.degree, ',') << '\n';
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Rewrites `--config file.json` into ordinary flags placed ahead of the
// command-line ones; keys already given on the command line are skipped.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.size() < 2 || args[0] == "experiment") return args;
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + *path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, *path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, *path + ": config must be a JSON object");

  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  auto scalar = [&](const json& v, const std::string& key) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    if (v.is_number()) return format_double(v.get<double>());
    throw Error(ErrorKind::InvalidArgument, *path + ": unsupported value for '" + key + "'");
  };

  std::vector<std::string> out{args[0]};
  for (const auto& [key, value] : j.items()) {
    std::string flag = key;
    while (!flag.empty() && flag.front() == '-') flag.erase(flag.begin());
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag = "--" + flag;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v, key));
      }
    } else {
      out.push_back(flag);
      out.push_back(scalar(value, key));
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-spin Ising structure learning"};
  app.name("kspin");
  app.require_subcommand(1);
  app.set_version_flag("--version", "kspin 1.0.0");

  // generate
  HypergraphSpec spec;
  std::string sign_mode = "positive";
  std::string coupling_scale = "tensor";
  std::string gen_out = "-";
  auto* generate = app.add_subcommand("generate", "random d-regular k-uniform model as tensor CSV");
  generate->add_option("--p", spec.p, "nodes")->capture_default_str();
  generate->add_option("--k", spec.k, "interaction order")->capture_default_str();
  generate->add_option("--d", spec.d, "hyperedges per node")->capture_default_str();
  generate->add_option("--beta", spec.beta, "coupling magnitude")->capture_default_str();
  generate->add_option("--sign-mode", sign_mode, "positive | rademacher")->capture_default_str();
  generate->add_option("--coupling-scale", coupling_scale, "tensor | hyperedge (entries beta/k!)")
      ->capture_default_str();
  generate->add_option("--seed", spec.seed)->capture_default_str();
  generate->add_option("--out,-o", gen_out, "output file, - for stdout")->capture_default_str();

  // sample
  std::string tensor_path;
  std::size_t sample_n = 0;
  std::string sampler = "exact";
  std::uint64_t sample_seed = 0;
  GibbsConfig gibbs;
  std::string sample_out = "-";
  auto* sample = app.add_subcommand("sample", "draw spin samples from a tensor file");
  sample->add_option("--tensor", tensor_path, "tensor CSV")->required();
  sample->add_option("--n", sample_n, "number of samples")->required();
  sample->add_option("--sampler", sampler, "exact | gibbs")->capture_default_str();
  sample->add_option("--seed", sample_seed)->capture_default_str();
  sample->add_option("--burn-in", gibbs.burn_in_sweeps, "Gibbs burn-in sweeps")->capture_default_str();
  sample->add_option("--thin", gibbs.thin_sweeps, "Gibbs sweeps between recorded samples")->capture_default_str();
  sample->add_option("--chain", gibbs.chain, "Gibbs chain id")->capture_default_str();
  sample->add_option("--out,-o", sample_out)->capture_default_str();

  // fit
  std::string samples_path;
  int fit_k = 3;
  std::string truth_path;
  std::string fit_out = "-";
  std::string estimate_out;
  LearnFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "recover the interaction tensor from samples");
  fit->add_option("--samples", samples_path, "samples CSV")->required();
  fit->add_option("--k", fit_k, "interaction order")->capture_default_str();
  fit->add_option("--truth", truth_path, "true tensor CSV; adds metrics");
  fit->add_option("--out,-o", fit_out, "JSON report")->capture_default_str();
  fit->add_option("--estimate-out", estimate_out, "also write the estimate as tensor CSV");
  fit_flags.attach(fit);

  // experiment
  std::string manifest;
  std::optional<int> exp_jobs;
  std::string exp_out;
  bool no_timing = false;
  auto* experiment = app.add_subcommand("experiment", "simulation sweep over (beta, n, method, seed)");
  experiment->add_option("--config", manifest, "experiment JSON")->required();
  experiment->add_option("--jobs", exp_jobs, "worker threads (overrides the manifest)");
  experiment->add_option("--out,-o", exp_out, "results CSV (overrides output_path; - for stdout)");
  experiment->add_flag("--no-timing", no_timing, "write wall_time_s as 0");

  // genes
  std::string data_path;
  std::string class_column;
  std::vector<std::string> ignore_columns;
  int genes_k = 3;
  std::size_t top_m = 10;
  std::string genes_out;
  LearnFlags gene_flags;
  auto* genes = app.add_subcommand("genes", "binarize an expression table and rank hyperedges per cohort");
  genes->add_option("--data", data_path, "expression CSV with a header row")->required();
  genes->add_option("--class-column", class_column, "column that splits cohorts");
  genes->add_option("--ignore-columns", ignore_columns, "columns left out of the model");
  genes->add_option("--k", genes_k)->capture_default_str();
  genes->add_option("--top-m", top_m, "hyperedges reported per cohort")->capture_default_str();
  genes->add_option("--out,-o", genes_out, "output directory")->required();
  gene_flags.attach(genes);

  // diag
  std::string diag_samples;
  int diag_k = 3;
  std::string diag_truth;
  double diag_eps = 0.05;
  std::optional<double> diag_beta;
  std::optional<int> diag_degree;
  std::string diag_out = "-";
  auto* diag = app.add_subcommand("diag", "per-node Gram eigenvalue and gradient-at-truth diagnostics");
  diag->add_option("--samples", diag_samples, "samples CSV")->required();
  diag->add_option("--k", diag_k)->capture_default_str();
  diag->add_option("--truth", diag_truth, "true tensor CSV");
  diag->add_option("--eps", diag_eps)->capture_default_str();
  diag->add_option("--beta-hint", diag_beta, "beta for the RISE lambda (default: truth beta_max)");
  diag->add_option("--degree-hint", diag_degree, "degree for the RISE lambda (default: truth d_max)");
  diag->add_option("--out,-o", diag_out)->capture_default_str();

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 1;
    }

    if (generate->parsed()) {
      spec.sign_mode = parse_sign_mode(sign_mode);
      spec.coupling_scale = parse_coupling_scale(coupling_scale);
      const InteractionTensor J = generate_model(spec);
      Sink sink(gen_out, out);
      write_tensor_csv(sink.get(), J);
      sink.close();
      print_stats(sink.is_file() ? out : err, J);
    } else if (sample->parsed()) {
      const InteractionTensor J = read_tensor_file(tensor_path);
      SampleMatrix X = [&] {
        if (sampler == "exact") return sample_exact(J, sample_n, sample_seed);
        if (sampler == "gibbs") {
          gibbs.seed = sample_seed;
          return sample_gibbs(J, sample_n, gibbs);
        }
        throw Error(ErrorKind::InvalidArgument, "unknown sampler '" + sampler + "' (exact|gibbs)");
      }();
      Sink sink(sample_out, out);
      write_samples_csv(sink.get(), X, sample_seed);
      sink.close();
    } else if (fit->parsed()) {
      const SampleMatrix X = read_samples_file(samples_path);
      std::optional<InteractionTensor> truth;
      double threshold = 0.0;
      if (!truth_path.empty()) {
        truth = read_tensor_file(truth_path);
        double smallest = 0.0;
        for (const auto& [e, w] : truth->entries()) {
          smallest = smallest == 0.0 ? std::abs(w) : std::min(smallest, std::abs(w));
        }
        threshold = smallest / 2;
      }
      const LearnConfig cfg = fit_flags.config(threshold);
      const RecoveryReport report = recover_tensor(X, fit_k, cfg, truth ? &*truth : nullptr);
      Sink sink(fit_out, out);
      sink.get() << report_to_json(report).dump(2) << '\n';
      sink.close();
      if (!estimate_out.empty()) write_tensor_file(estimate_out, report.estimate);
    } else if (experiment->parsed()) {
      ExperimentConfig cfg = read_experiment_config(manifest);
      if (exp_jobs) cfg.jobs = *exp_jobs;
      if (!exp_out.empty()) cfg.output_path = exp_out;
      if (no_timing) cfg.record_timing = false;
      const auto rows = run_experiment(cfg);
      Sink sink(cfg.output_path, out);
      write_results_csv(sink.get(), rows);
      sink.close();
      const auto failed = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
      err << rows.size() << " cells, " << failed << " failed\n";
    } else if (genes->parsed()) {
      const GeneTable table = read_gene_file(data_path, class_column, ignore_columns);
      GenesConfig cfg;
      cfg.k = genes_k;
      cfg.top_m = top_m;
      cfg.learn = gene_flags.config(0.0);
      const GenesResult result = run_genes(table, cfg);
      for (const auto& w : result.warnings) err << "warning: " << w << '\n';
      for (const auto& path : write_gene_reports(genes_out, result)) out << path << '\n';
    } else if (diag->parsed()) {
      const SampleMatrix X = read_samples_file(diag_samples);
      std::optional<InteractionTensor> truth;
      if (!diag_truth.empty()) {
        truth = read_tensor_file(diag_truth);
        if (truth->p() != X.p() || truth->k() != diag_k) {
          throw Error(ErrorKind::Shape, "truth tensor dimensions differ from the samples");
        }
      }
      const bool dense = binomial(X.p() - 1, diag_k - 1) <= kDenseLimit;
      Sink sink(diag_out, out);
      auto& os = sink.get();
      os << "node,alpha_hat";
      double lam_rple = 0.0;
      double lam_rise = 0.0;
      if (truth) {
        const GraphStats stats = graph_stats(*truth);
        lam_rple = theorem_lambda(Method::Rple, X.p(), diag_k, X.n(), diag_eps);
        lam_rise = theorem_lambda(Method::Rise, X.p(), diag_k, X.n(), diag_eps, diag_beta.value_or(stats.beta_max),
                                  diag_degree.value_or(stats.d_max));
        os << ",rple_grad_max,rple_lambda,rise_grad_max,rise_lambda";
      }
      os << '\n';
      for (int r = 1; r <= X.p(); ++r) {
        const NodeDesign design(X, r, diag_k);
        os << r << ',' << (dense ? format_double(restricted_eigen_diag(design.gram())) : std::string("nan"));
        if (truth) {
          const auto coeffs = neighborhood(*truth, design.index());
          os << ',' << format_double(max_abs(design.evaluate(Method::Rple, coeffs).gradient)) << ','
             << format_double(lam_rple) << ',' << format_double(max_abs(design.evaluate(Method::Rise, coeffs).gradient))
             << ',' << format_double(lam_rise);
        }
        os << '\n';
      }
      sink.close();
    }
    return 0;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace kspin
