#include "kspin/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <tuple>

#include "kspin/error.hpp"
#include "kspin/parallel.hpp"
#include "kspin/sampler.hpp"
#include "kspin/tensor_io.hpp"

namespace kspin {

namespace {

using nlohmann::json;

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorKind::InvalidArgument, "unknown " + where + " key '" + key + "'");
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) { return std::isnan(v) ? "nan" : format_double(v); }

}  // namespace

LambdaRule parse_lambda_rule(const json& j) {
  if (j.is_string()) return parse_lambda_rule(json{{"type", j}});
  reject_unknown(j, {"type", "multipliers", "values", "eps", "beta", "degree", "value"}, "lambda_rule");
  const auto type = get_as<std::string>(j, "type");
  if (type == "bic") {
    BicGridLambda rule;
    if (j.contains("multipliers")) rule.multipliers = get_as<std::vector<double>>(j, "multipliers");
    if (j.contains("values")) rule.values = get_as<std::vector<double>>(j, "values");
    if (j.contains("eps")) rule.eps = get_as<double>(j, "eps");
    return rule;
  }
  if (type == "theorem") {
    TheoremLambda rule;
    if (j.contains("eps")) rule.eps = get_as<double>(j, "eps");
    if (j.contains("beta")) rule.beta = get_as<double>(j, "beta");
    if (j.contains("degree")) rule.degree = get_as<int>(j, "degree");
    return rule;
  }
  if (type == "fixed") return FixedLambda{get_as<double>(j, "value")};
  throw Error(ErrorKind::InvalidArgument, "unknown lambda rule '" + type + "' (bic|theorem|fixed)");
}

SolverConfig parse_solver_config(const json& j) {
  reject_unknown(j,
                 {"max_iterations", "tol_rel_objective", "tol_kkt", "initial_step", "backtrack_factor",
                  "restart_on_nonmonotone"},
                 "solver");
  SolverConfig s;
  if (j.contains("max_iterations")) s.max_iterations = get_as<int>(j, "max_iterations");
  if (j.contains("tol_rel_objective")) s.tol_rel_objective = get_as<double>(j, "tol_rel_objective");
  if (j.contains("tol_kkt")) s.tol_kkt = get_as<double>(j, "tol_kkt");
  if (j.contains("initial_step")) s.initial_step = get_as<double>(j, "initial_step");
  if (j.contains("backtrack_factor")) s.backtrack_factor = get_as<double>(j, "backtrack_factor");
  if (j.contains("restart_on_nonmonotone")) s.restart_on_nonmonotone = get_as<bool>(j, "restart_on_nonmonotone");
  s.validate();
  return s;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw Error(ErrorKind::InvalidArgument, "methods must not be empty");
  if (n_grid.empty()) throw Error(ErrorKind::InvalidArgument, "n_grid must not be empty");
  if (beta_grid.empty()) throw Error(ErrorKind::InvalidArgument, "beta_grid must not be empty");
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "seeds must not be empty");
  for (auto n : n_grid) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample sizes must be positive");
  }
  for (double b : beta_grid) {
    HypergraphSpec probe = spec;
    probe.beta = b;
    probe.validate();
  }
  if (spec.p > kEnumerationLimit) {
    throw Error(ErrorKind::Capability, "experiments sample exactly and need p <= " +
                                           std::to_string(kEnumerationLimit));
  }
  if (support_threshold && !(*support_threshold >= 0)) {
    throw Error(ErrorKind::InvalidArgument, "support threshold must be >= 0");
  }
  if (jobs < 1) throw Error(ErrorKind::InvalidArgument, "jobs must be >= 1");
  LearnConfig probe{.lambda_rule = lambda_rule, .solver = solver};
  probe.validate();
}

ExperimentConfig parse_experiment_config(const json& j) {
  reject_unknown(j,
                 {"p", "k", "d", "sign_mode", "coupling_scale", "methods", "n_grid", "beta_grid", "seeds",
                  "lambda_rule", "support_threshold", "bic_scaling", "reconcile", "solver", "output_path",
                  "jobs", "record_timing"},
                 "experiment config");
  ExperimentConfig cfg;
  if (j.contains("p")) cfg.spec.p = get_as<int>(j, "p");
  if (j.contains("k")) cfg.spec.k = get_as<int>(j, "k");
  if (j.contains("d")) cfg.spec.d = get_as<int>(j, "d");
  if (j.contains("sign_mode")) cfg.spec.sign_mode = parse_sign_mode(get_as<std::string>(j, "sign_mode"));
  if (j.contains("coupling_scale")) {
    cfg.spec.coupling_scale = parse_coupling_scale(get_as<std::string>(j, "coupling_scale"));
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : get_as<std::vector<std::string>>(j, "methods")) cfg.methods.push_back(parse_method(m));
  }
  if (j.contains("n_grid")) cfg.n_grid = get_as<std::vector<std::size_t>>(j, "n_grid");
  if (j.contains("beta_grid")) cfg.beta_grid = get_as<std::vector<double>>(j, "beta_grid");
  if (j.contains("seeds")) cfg.seeds = get_as<std::vector<std::uint64_t>>(j, "seeds");
  if (j.contains("lambda_rule")) cfg.lambda_rule = parse_lambda_rule(j.at("lambda_rule"));
  if (j.contains("support_threshold")) cfg.support_threshold = get_as<double>(j, "support_threshold");
  if (j.contains("bic_scaling")) cfg.bic_scaling = parse_bic_scaling(get_as<std::string>(j, "bic_scaling"));
  if (j.contains("reconcile")) cfg.reconcile = parse_reconcile(get_as<std::string>(j, "reconcile"));
  if (j.contains("solver")) cfg.solver = parse_solver_config(j.at("solver"));
  if (j.contains("output_path")) cfg.output_path = get_as<std::string>(j, "output_path");
  if (j.contains("jobs")) cfg.jobs = get_as<int>(j, "jobs");
  if (j.contains("record_timing")) cfg.record_timing = get_as<bool>(j, "record_timing");
  cfg.validate();
  return cfg;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto betas = cfg.beta_grid;
  auto ns = cfg.n_grid;
  auto methods = cfg.methods;
  auto seeds = cfg.seeds;
  std::sort(betas.begin(), betas.end());
  std::sort(ns.begin(), ns.end());
  std::sort(methods.begin(), methods.end());
  std::sort(seeds.begin(), seeds.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<ExperimentRow> rows;
  for (double b : betas) {
    for (auto n : ns) {
      for (auto m : methods) {
        for (auto s : seeds) {
          ExperimentRow row;
          row.beta = b;
          row.n = n;
          row.method = m;
          row.seed = s;
          rows.push_back(std::move(row));
        }
      }
    }
  }

  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    ExperimentRow& row = rows[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      HypergraphSpec spec = cfg.spec;
      spec.beta = row.beta;
      spec.seed = row.seed;
      const InteractionTensor truth = generate_model(spec);
      const SampleMatrix X = sample_exact(truth, row.n, row.seed);
      const LearnConfig learn{.method = row.method,
                              .lambda_rule = cfg.lambda_rule,
                              .support_threshold = cfg.support_threshold.value_or(spec.entry_magnitude() / 2),
                              .reconcile = cfg.reconcile,
                              .bic_scaling = cfg.bic_scaling,
                              .solver = cfg.solver,
                              .jobs = 1};
      const RecoveryReport report = recover_tensor(X, spec.k, learn, &truth);
      row.max_abs_error = report.metrics->max_abs_error;
      row.mean_node_l2 = report.metrics->mean_node_l2;
      row.support_exact = report.metrics->exact_support;
      row.lambda_selected = report.mean_lambda();
    } catch (const std::exception& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.max_abs_error = row.mean_node_l2 = row.lambda_selected = nan;
      row.support_exact = false;
      row.error = e.what();
    }
    if (cfg.record_timing) {
      row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3f", r.wall_time_s);
    out << format_double(r.beta) << ',' << r.n << ',' << to_string(r.method) << ',' << r.seed << ','
        << number(r.max_abs_error) << ',' << number(r.mean_node_l2) << ',' << (r.support_exact ? 1 : 0) << ','
        << number(r.lambda_selected) << ',' << timing << ',' << csv_field(r.error) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing results CSV");
}

double mean_max_abs_error(const std::vector<ExperimentRow>& rows, double beta, std::size_t n, Method method) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.beta == beta && r.n == n && r.method == method && r.error.empty()) {
      sum += r.max_abs_error;
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace kspin
