// Acceptance suite: one PASS/FAIL line per criterion.
//
//   kspin_acceptance [--criterion N]   (default: all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "kspin/commands.hpp"
#include "kspin/experiment.hpp"
#include "kspin/genes.hpp"
#include "kspin/hypergen.hpp"
#include "kspin/learner.hpp"
#include "kspin/objectives.hpp"
#include "kspin/sampler.hpp"

#ifndef KSPIN_DATA_DIR
#define KSPIN_DATA_DIR "data"
#endif

using namespace kspin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> random_sparse(std::size_t dim, std::size_t nonzero, double scale, std::mt19937_64& gen) {
  std::vector<double> v(dim, 0.0);
  std::uniform_real_distribution<double> w(-scale, scale);
  for (std::size_t i = 0; i < nonzero; ++i) v[gen() % dim] = w(gen);
  return v;
}

Outcome gradient_check() {
  std::mt19937_64 gen(11);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto X = sample_exact(oracle::random_tensor(8, 3, 6, 0.3, 500 + trial), 50, trial);
    const int r = 1 + trial % 8;
    const auto coeffs = random_sparse(21, 6, 0.3, gen);
    for (Method m : {Method::Rise, Method::Rple}) {
      const auto g = loss_eval(m, {r, 3, coeffs}, X).gradient;
      const auto fd = oracle::central_difference(
          [&](const std::vector<double>& c) { return loss_eval(m, {r, 3, c}, X).value; }, coeffs, 1e-5);
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        num += (g[i] - fd[i]) * (g[i] - fd[i]);
        den += fd[i] * fd[i];
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
  }
  return {worst < 1e-6, "worst relative error " + fmt("%.3g", worst) + " over 20 instances x 2 losses"};
}

std::vector<std::vector<double>> site_kernel(const InteractionTensor& J, int r) {
  const auto states = oracle::all_states(J.p());
  std::vector<std::vector<double>> K(states.size(), std::vector<double>(states.size(), 0.0));
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::vector<std::int8_t> x(states[s].begin(), states[s].end());
    const double up = conditional_prob(J, x, r);
    const std::size_t bit = std::size_t{1} << (r - 1);
    K[s][s | bit] += up;
    K[s][s & ~bit] += 1.0 - up;
  }
  return K;
}

Outcome sampler_fidelity() {
  // Hyperedge couplings uniform in [-1, 1], i.e. tensor entries up to 1/3!.
  const auto J = oracle::random_tensor(4, 3, 3, 1.0 / 6, 2024);
  const auto exact = oracle::pmf_table(J);
  const double tv_exact = oracle::total_variation(oracle::empirical_pmf(sample_exact(J, 1000000, 1)), exact);
  GibbsConfig gibbs;
  gibbs.seed = 2;
  const double tv_gibbs = oracle::total_variation(oracle::empirical_pmf(sample_gibbs(J, 100000, gibbs)), exact);

  auto P = site_kernel(J, 1);
  for (int r = 2; r <= 4; ++r) {
    const auto K = site_kernel(J, r);
    std::vector<std::vector<double>> next(P.size(), std::vector<double>(P.size(), 0.0));
    for (std::size_t i = 0; i < P.size(); ++i) {
      for (std::size_t m = 0; m < P.size(); ++m) {
        for (std::size_t j = 0; j < P.size(); ++j) next[i][j] += P[i][m] * K[m][j];
      }
    }
    P = next;
  }
  double drift = 0.0;
  for (std::size_t j = 0; j < exact.size(); ++j) {
    double flow = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) flow += exact[i] * P[i][j];
    drift = std::max(drift, std::abs(flow - exact[j]));
  }
  const auto strong = oracle::random_tensor(4, 3, 3, 1.0, 2024);
  const double tv_strong =
      oracle::total_variation(oracle::empirical_pmf(sample_gibbs(strong, 100000, gibbs)), oracle::pmf_table(strong));
  const double tv_exact_strong =
      oracle::total_variation(oracle::empirical_pmf(sample_exact(strong, 1000000, 3)), oracle::pmf_table(strong));
  std::cout << "INFO criterion 2: Gibbs defaults with tensor entries in [-1, 1]: TV " << fmt("%.4f", tv_strong) << '\n';
  return {tv_exact < 0.01 && tv_exact_strong < 0.01 && tv_gibbs < 0.02 && drift < 1e-12,
          "TV exact " + fmt("%.4f", tv_exact) + " (tensor entries in [-1, 1]: " + fmt("%.4f", tv_exact_strong) + "), TV Gibbs " + fmt("%.4f", tv_gibbs) + ", sweep drift " +
              fmt("%.2g", drift)};
}

Outcome inequalities() {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-20, 20);
  double worst_lc = 1e300;
  double worst_exp = 1e300;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen);
    const double a = u(gen);
    const double t = std::tanh(x);
    worst_lc = std::min(worst_lc, logcosh(x + a) - logcosh(x) - a * t - (1 - t * t) * a * a / (2 + 2 * std::abs(a)));
  }
  for (int i = 0; i < 10000; ++i) {
    const double z = 1.5 * u(gen);
    worst_exp = std::min(worst_exp, std::exp(-z) - 1 + z - z * z / (2 + std::abs(z)));
  }
  return {worst_lc >= -1e-12 && worst_exp >= -1e-12,
          "min slack log-cosh " + fmt("%.3g", worst_lc) + ", exponential " + fmt("%.3g", worst_exp)};
}

Outcome solver_vs_oracle() {
  double worst = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto X = sample_exact(oracle::random_tensor(5, 3, 4, 0.4, 700 + seed), 200, seed);
    const int r = 1 + seed;
    for (Method m : {Method::Rise, Method::Rple}) {
      const int mo = m == Method::Rise ? 0 : 1;
      for (double lambda : {0.01, 0.1, 1.0}) {
        const auto fit = fit_node(X, r, 3, m, lambda, SolverConfig{});
        const auto cd = oracle::coordinate_descent(mo, X, r, 3, lambda);
        const double a = oracle::node_loss(mo, X, r, 3, fit.coeffs.coeffs) + lambda * oracle::l1(fit.coeffs.coeffs);
        const double b = oracle::node_loss(mo, X, r, 3, cd) + lambda * oracle::l1(cd);
        worst = std::max(worst, std::abs(a - b));
      }
    }
  }
  return {worst < 1e-6, "worst objective gap " + fmt("%.3g", worst) + " over 5 seeds x 2 methods x 3 lambdas"};
}

ExperimentConfig simulation(std::vector<std::size_t> n_grid, std::vector<double> beta_grid, int seeds) {
  ExperimentConfig cfg;
  cfg.n_grid = std::move(n_grid);
  cfg.beta_grid = std::move(beta_grid);
  for (int s = 0; s < seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  cfg.record_timing = false;
  return cfg;
}

Outcome structure_recovery() {
  const auto rows = run_experiment(simulation({100000}, {1.0}, 5));
  bool pass = true;
  std::string detail;
  for (Method m : {Method::Rise, Method::Rple}) {
    int exact = 0;
    double worst = 0.0;
    for (const auto& row : rows) {
      if (row.method != m) continue;
      exact += row.support_exact;
      worst = std::max(worst, row.max_abs_error);
      if (!row.error.empty()) worst = INFINITY;
    }
    pass = pass && exact >= 4 && worst < 0.15;
    detail += std::string(to_string(m)) + " exact support " + std::to_string(exact) + "/5, max error " + fmt("%.4f", worst) + "; ";
  }

  // Same graph with every tensor entry equal to beta.
  HypergraphSpec literal;
  const ExactModel model(generate_model(literal));
  double top = 0.0;
  std::vector<double> masses;
  for (std::uint64_t s = 0; s < model.state_count(); ++s) masses.push_back(model.pmf(s));
  std::partial_sort(masses.begin(), masses.begin() + 2, masses.end(), std::greater<>());
  top = masses[0] + masses[1];
  std::cout << "INFO criterion 5: entries +-beta/k! (beta=1); with entries +-1 the two most likely states carry "
            << fmt("%.6f", top) << " of the mass\n";
  return {pass, detail};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Outcome rate_check() {
  const std::vector<std::size_t> ns{1000, 10000, 100000};
  const auto rows = run_experiment(simulation(ns, {1.0}, 10));
  bool pass = true;
  std::string detail;
  for (Method m : {Method::Rise, Method::Rple}) {
    std::vector<double> lx;
    std::vector<double> ly;
    std::string means;
    for (std::size_t n : ns) {
      const double e = mean_max_abs_error(rows, 1.0, n, m);
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(e));
      means += fmt("%.4f", e) + " ";
    }
    const double s = slope(lx, ly);
    pass = pass && s >= -0.7 && s <= -0.3;
    detail += std::string(to_string(m)) + " slope " + fmt("%.3f", s) + " (means " + means + "); ";
  }
  return {pass, detail};
}

Outcome beta_monotonicity() {
  const std::vector<double> betas{1.0, 1.5, 2.0, 2.5};
  const auto rows = run_experiment(simulation({10000}, betas, 10));
  bool pass = true;
  std::string detail;
  for (Method m : {Method::Rise, Method::Rple}) {
    std::string means;
    double prev = -1.0;
    bool increasing = true;
    for (double b : betas) {
      const double e = mean_max_abs_error(rows, b, 10000, m);
      increasing = increasing && e > prev;
      prev = e;
      means += fmt("%.4f", e) + " ";
    }
    pass = pass && increasing;
    detail += std::string(to_string(m)) + (increasing ? " increasing" : " NOT increasing") + " (" + means + "); ";
  }

  // Same cells with the per-node lambda held at the lambda scale.
  auto fixed = simulation({10000}, betas, 10);
  fixed.methods = {Method::Rise};
  fixed.lambda_rule = FixedLambda{lambda_scale(16, 3, 10000, 0.05)};
  const auto fixed_rows = run_experiment(fixed);
  std::cout << "INFO criterion 7: rise with fixed lambda " << fmt("%.4f", lambda_scale(16, 3, 10000, 0.05)) << ":";
  for (double b : betas) std::cout << ' ' << fmt("%.4f", mean_max_abs_error(fixed_rows, b, 10000, Method::Rise));
  std::cout << '\n';
  return {pass, detail};
}

Outcome theorem_arithmetic() {
  const double rple = theorem_lambda(Method::Rple, 16, 3, 100000, 0.05);
  // 4 sqrt(2) k! sqrt(log(4 C(15,2) / 0.05) / n), and 4 * 105 / 0.05 = 8400.
  const double hand = 4 * std::sqrt(2.0) * 6 * std::sqrt(std::log(8400.0) / 100000);
  const bool value = std::abs(rple - 0.3226) <= 0.0005 && std::abs(rple - hand) < 1e-12;
  const double quarter = theorem_lambda(Method::Rple, 16, 3, 400000, 0.05);
  const bool root_n = std::abs(rple / quarter - 2.0) < 1e-12;
  const double base = theorem_lambda(Method::Rise, 16, 3, 100000, 0.05, 0.0, 0);
  const double hot = theorem_lambda(Method::Rise, 16, 3, 100000, 0.05, 0.7, 3);
  const bool exp_scale = std::abs(hot / base / std::exp(6 * 0.7 * 3) - 1.0) < 1e-12 && std::abs(base - rple / 2) < 1e-15;
  return {value && root_n && exp_scale, "RPLE lambda " + fmt("%.6f", rple) + ", n x4 ratio " + fmt("%.12f", rple / quarter) +
                                            ", RISE exp ratio " + fmt("%.12f", hot / base / std::exp(12.6))};
}

Outcome screening_property() {
  HypergraphSpec spec{.p = 6, .k = 3, .d = 2, .beta = 0.6, .coupling_scale = CouplingScale::Hyperedge, .seed = 5};
  const auto J = generate_model(spec);
  const auto stats = graph_stats(J);
  const double lambda = theorem_lambda(Method::Rise, 6, 3, 100000, 0.05, stats.beta_max, stats.d_max);
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto X = sample_exact(J, 100000, 9000 + trial);
    double g = 0.0;
    for (int r = 1; r <= 6; ++r) {
      for (double v : rise_eval({r, 3, neighborhood(J, TupleIndex(6, 3, r))}, X).gradient) g = std::max(g, std::abs(v));
    }
    worst = std::max(worst, g);
    ok += g < lambda;
  }
  return {ok >= 95, std::to_string(ok) + "/100 trials below lambda " + fmt("%.4f", lambda) + ", worst max-norm " +
                        fmt("%.4f", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome gene_pipeline() {
  const std::string data = std::string(KSPIN_DATA_DIR) + "/synthetic_genes.csv";
  const fs::path base = fs::temp_directory_path() / "kspin_acceptance_genes";
  fs::remove_all(base);
  std::ostringstream out;
  std::ostringstream err;
  bool pass = true;
  for (const char* run : {"a", "b"}) {
    const int code = run_cli({"genes", "--data", data, "--class-column", "class", "--ignore-columns", "sample", "--out",
                              (base / run).string()},
                             out, err);
    if (code != 0) return {false, "genes exited with " + std::to_string(code) + ": " + err.str()};
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    ++files;
    pass = pass && slurp(entry.path()) == slurp(base / "b" / entry.path().filename());
  }
  const bool identical = pass && files > 0;

  // Planted triangle G2,G5,G7 first in every cohort.
  bool triangle = true;
  for (const char* label : {"normal", "tumor"}) {
    std::istringstream lines(slurp(base / "a" / (std::string(label) + "_hyperedges.csv")));
    std::string header;
    std::string first;
    std::getline(lines, header);
    std::getline(lines, first);
    triangle = triangle && first.rfind("1,2,5,7,G2,G5,G7,", 0) == 0;
  }

  // Strict-above-mean rule, recomputed from the raw table for a few cells.
  const auto table = read_gene_file(data, "class", {"sample"});
  std::vector<std::size_t> tumor;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (table.classes[i] == "tumor") tumor.push_back(i);
  }
  const auto cohort = binarize(table, tumor);
  bool cells = true;
  for (int v : {0, 3, 6}) {
    double mean = 0.0;
    for (std::size_t i : tumor) mean += table.columns[static_cast<std::size_t>(v)][i];
    mean /= static_cast<double>(tumor.size());
    for (std::size_t j : {std::size_t{0}, std::size_t{17}, tumor.size() - 1}) {
      const int expect = table.columns[static_cast<std::size_t>(v)][tumor[j]] > mean ? 1 : -1;
      cells = cells && cohort.X.at(j, v) == expect;
    }
  }
  fs::remove_all(base);
  return {identical && triangle && cells, std::string("byte-identical ") + (identical ? "yes" : "no") + " (" +
                                              std::to_string(files) + " files), triangle first " +
                                              (triangle ? "yes" : "no") + ", binarization spot checks " +
                                              (cells ? "ok" : "wrong")};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"gradient correctness", gradient_check},
    {"sampler fidelity", sampler_fidelity},
    {"technical inequalities", inequalities},
    {"solver correctness", solver_vs_oracle},
    {"structure recovery", structure_recovery},
    {"rate check", rate_check},
    {"beta monotonicity", beta_monotonicity},
    {"theorem lambda arithmetic", theorem_arithmetic},
    {"interaction-screening moment", screening_property},
    {"gene pipeline determinism", gene_pipeline},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: kspin_acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (which.empty()) {
    for (int c = 1; c <= static_cast<int>(kCriteria.size()); ++c) which.push_back(c);
  }
  bool all = true;
  for (int c : which) {
    if (c < 1 || c > static_cast<int>(kCriteria.size())) {
      std::cerr << "no criterion " << c << '\n';
      return 2;
    }
    const auto& [name, run] = kCriteria[static_cast<std::size_t>(c - 1)];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << name << "): " << o.detail << " ["
              << fmt("%.1f", secs) << " s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
