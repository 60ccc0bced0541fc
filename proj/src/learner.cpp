#include "kspin/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "kspin/combinatorics.hpp"
#include "kspin/error.hpp"
#include "kspin/parallel.hpp"

namespace kspin {

namespace {

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

std::vector<double> resolve_grid(const BicGridLambda& rule, int p, int k, std::size_t n) {
  if (!rule.values.empty()) return rule.values;
  const double scale = lambda_scale(p, k, n, rule.eps);
  std::vector<double> grid = rule.multipliers.empty() ? default_lambda_multipliers() : rule.multipliers;
  for (auto& c : grid) c *= scale;
  return grid;
}

}  // namespace

void LearnConfig::validate() const {
  solver.validate();
  if (!(support_threshold >= 0)) throw Error(ErrorKind::InvalidArgument, "support threshold must be >= 0");
  if (const auto* f = std::get_if<FixedLambda>(&lambda_rule); f && !(f->value >= 0)) {
    throw Error(ErrorKind::InvalidArgument, "fixed lambda must be >= 0");
  }
  if (const auto* b = std::get_if<BicGridLambda>(&lambda_rule)) {
    for (double v : b->values) {
      if (!(v >= 0)) throw Error(ErrorKind::InvalidArgument, "lambda grid values must be >= 0");
    }
    for (double c : b->multipliers) {
      if (!(c >= 0)) throw Error(ErrorKind::InvalidArgument, "lambda multipliers must be >= 0");
    }
  }
}

Reconcile parse_reconcile(const std::string& text) {
  if (text == "mean") return Reconcile::Mean;
  if (text == "min") return Reconcile::MinMagnitude;
  if (text == "max") return Reconcile::MaxMagnitude;
  throw Error(ErrorKind::InvalidArgument, "unknown reconcile mode '" + text + "' (mean|min|max)");
}

BicScaling parse_bic_scaling(const std::string& text) {
  if (text == "scaled") return BicScaling::SampleScaled;
  if (text == "literal") return BicScaling::Literal;
  throw Error(ErrorKind::InvalidArgument, "unknown BIC scaling '" + text + "' (scaled|literal)");
}

double lambda_scale(int p, int k, std::size_t n, double eps) {
  if (!(eps > 0 && eps < 1)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0,1)");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  const double tuples = static_cast<double>(binomial(p - 1, k - 1));
  return std::sqrt(std::log(4.0 * tuples / eps) / static_cast<double>(n));
}

double theorem_lambda(Method method, int p, int k, std::size_t n, double eps, double beta, int d) {
  const double base = factorial(k) * lambda_scale(p, k, n, eps);
  if (method == Method::Rple) return 4.0 * std::sqrt(2.0) * base;
  return 2.0 * std::sqrt(2.0) * std::exp(factorial(k) * beta * d) * base;
}

std::vector<double> default_lambda_multipliers() {
  constexpr int kPoints = 20;
  std::vector<double> out(kPoints);
  for (int i = 0; i < kPoints; ++i) out[i] = std::exp2(4.0 - 10.0 * i / (kPoints - 1));
  return out;
}

FitResult fit_node(const NodeDesign& design, Method method, double lambda, const SolverConfig& cfg,
                   std::optional<std::span<const double>> warm) {
  const LossOracle oracle = [&design, method](std::span<const double> x) { return design.evaluate(method, x); };
  FitResult fit = minimize_l1(oracle, design.dim(), lambda, cfg, warm);
  fit.coeffs.r = design.center();
  fit.coeffs.k = design.k();
  return fit;
}

FitResult fit_node(const SampleMatrix& X, int r, int k, Method method, double lambda,
                   const SolverConfig& cfg, std::optional<std::span<const double>> warm) {
  return fit_node(NodeDesign(X, r, k), method, lambda, cfg, warm);
}

std::size_t degrees_of_freedom(std::span<const double> coeffs) {
  return static_cast<std::size_t>(
      std::count_if(coeffs.begin(), coeffs.end(), [](double c) { return std::abs(c) > kDfTolerance; }));
}

BicSelection bic_select(const NodeDesign& design, Method method, std::span<const double> grid,
                        const SolverConfig& cfg, BicScaling scaling) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "lambda grid is empty");
  std::vector<double> lambdas(grid.begin(), grid.end());
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

  const double n = static_cast<double>(design.sample_count());
  const double log_p = std::log(static_cast<double>(design.index().p()));
  BicSelection best;
  double best_bic = INFINITY;
  std::vector<double> warm;
  for (double lambda : lambdas) {
    FitResult fit = warm.empty() ? fit_node(design, method, lambda, cfg)
                                 : fit_node(design, method, lambda, cfg, std::span<const double>(warm));
    const std::vector<double>& coeffs = fit.coeffs.coeffs;
    BicPoint point;
    point.lambda = lambda;
    point.loss = fit.objective_trace.back() - lambda * l1_norm(coeffs);
    point.df = degrees_of_freedom(coeffs);
    point.bic = (scaling == BicScaling::SampleScaled ? n * point.loss : point.loss) +
                static_cast<double>(point.df) * log_p;
    best.trace.push_back(point);
    warm = coeffs;
    // Lambdas arrive in decreasing order, so `<=` keeps the smallest on ties.
    if (point.bic <= best_bic) {
      best_bic = point.bic;
      best.lambda = lambda;
      best.fit = std::move(fit);
    }
  }
  return best;
}

BicSelection bic_select(const SampleMatrix& X, int r, int k, Method method, std::span<const double> grid,
                        const SolverConfig& cfg, BicScaling scaling) {
  return bic_select(NodeDesign(X, r, k), method, grid, cfg, scaling);
}

double RecoveryReport::mean_lambda() const {
  if (nodes.empty()) return 0.0;
  double s = 0.0;
  for (const auto& node : nodes) s += node.lambda;
  return s / static_cast<double>(nodes.size());
}

std::vector<std::pair<Hyperedge, double>> ranked_edges(const InteractionTensor& J) {
  auto edges = J.sorted_entries();
  std::stable_sort(edges.begin(), edges.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.second) > std::abs(b.second); });
  return edges;
}

RecoveryMetrics score_recovery(const InteractionTensor& estimate, const std::vector<NodeReport>& nodes,
                               const InteractionTensor& truth) {
  if (truth.p() != estimate.p() || truth.k() != estimate.k()) {
    throw Error(ErrorKind::Shape, "truth tensor dimensions differ from the estimate");
  }
  RecoveryMetrics m;
  for (const auto& [edge, w] : estimate.entries()) m.max_abs_error = std::max(m.max_abs_error, std::abs(w - truth.get(edge)));
  for (const auto& [edge, w] : truth.entries()) {
    m.max_abs_error = std::max(m.max_abs_error, std::abs(estimate.get(edge) - w));
    if (estimate.entries().count(edge)) ++m.true_positives;
  }
  m.true_edges = truth.edge_count();
  m.estimated_edges = estimate.edge_count();
  m.precision = m.estimated_edges ? static_cast<double>(m.true_positives) / m.estimated_edges : 1.0;
  m.recall = m.true_edges ? static_cast<double>(m.true_positives) / m.true_edges : 1.0;
  m.exact_support = m.true_positives == m.true_edges && m.true_positives == m.estimated_edges;

  for (const auto& node : nodes) {
    const TupleIndex index(truth.p(), truth.k(), node.node);
    const std::vector<double> target = neighborhood(truth, index);
    double sq = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t) {
      const double d = node.coeffs.coeffs[t] - target[t];
      sq += d * d;
    }
    m.node_l2.push_back(std::sqrt(sq));
  }
  if (!m.node_l2.empty()) {
    m.mean_node_l2 = std::accumulate(m.node_l2.begin(), m.node_l2.end(), 0.0) / m.node_l2.size();
  }
  return m;
}

RecoveryReport recover_tensor(const SampleMatrix& X, int k, const LearnConfig& cfg,
                              const InteractionTensor* truth) {
  cfg.validate();
  const int p = X.p();
  if (k < 2 || k > p) throw Error(ErrorKind::InvalidArgument, "need 2 <= k <= p");
  if (truth && (truth->p() != p || truth->k() != k)) {
    throw Error(ErrorKind::Shape, "truth tensor dimensions differ from the samples");
  }

  std::vector<NodeReport> nodes(static_cast<std::size_t>(p));
  parallel_for(nodes.size(), cfg.jobs, [&](std::size_t slot) {
    const int r = static_cast<int>(slot) + 1;
    NodeReport& out = nodes[slot];
    out.node = r;
    try {
      const NodeDesign design(X, r, k);
      FitResult fit;
      if (const auto* fixed = std::get_if<FixedLambda>(&cfg.lambda_rule)) {
        out.lambda = fixed->value;
        fit = fit_node(design, cfg.method, out.lambda, cfg.solver);
      } else if (const auto* thm = std::get_if<TheoremLambda>(&cfg.lambda_rule)) {
        out.lambda = theorem_lambda(cfg.method, p, k, X.n(), thm->eps, thm->beta.value_or(1.0),
                                    thm->degree.value_or(1));
        fit = fit_node(design, cfg.method, out.lambda, cfg.solver);
      } else {
        const auto grid = resolve_grid(std::get<BicGridLambda>(cfg.lambda_rule), p, k, X.n());
        BicSelection sel = bic_select(design, cfg.method, grid, cfg.solver, cfg.bic_scaling);
        out.lambda = sel.lambda;
        out.bic_trace = std::move(sel.trace);
        fit = std::move(sel.fit);
      }
      out.iterations = fit.iterations;
      out.converged = fit.converged;
      out.kkt_residual = fit.kkt_residual;
      out.overflow = fit.overflow_seen;
      out.coeffs = std::move(fit.coeffs);
    } catch (const Error& e) {
      throw Error(e.kind(), "node " + std::to_string(r) + ": " + e.what());
    }
  });

  // Collect the k per-node estimates of every hyperedge; absent ones stay 0.
  std::map<Hyperedge, std::vector<double>> votes;
  for (const auto& node : nodes) {
    const TupleIndex index(p, k, node.node);
    for (std::size_t t = 0; t < index.size(); ++t) {
      const double c = node.coeffs.coeffs[t];
      if (c == 0.0) continue;
      Hyperedge edge = index.unrank(t);
      edge.push_back(node.node);
      std::sort(edge.begin(), edge.end());
      const auto slot = static_cast<std::size_t>(std::find(edge.begin(), edge.end(), node.node) - edge.begin());
      auto& v = votes.try_emplace(std::move(edge), std::vector<double>(static_cast<std::size_t>(k), 0.0)).first->second;
      v[slot] = c;
    }
  }

  RecoveryReport report{cfg.method, X.n(), cfg.support_threshold, InteractionTensor(p, k), std::move(nodes), {}, {}};
  for (const auto& [edge, v] : votes) {
    double w = 0.0;
    switch (cfg.reconcile) {
      case Reconcile::Mean:
        w = std::accumulate(v.begin(), v.end(), 0.0) / k;
        break;
      case Reconcile::MinMagnitude:
        w = *std::min_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        break;
      case Reconcile::MaxMagnitude:
        w = *std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        break;
    }
    if (w != 0.0 && std::abs(w) >= cfg.support_threshold) {
      report.estimate.set(edge, w);
      report.support.push_back(edge);
    }
  }
  if (truth) report.metrics = score_recovery(report.estimate, report.nodes, *truth);
  return report;
}

nlohmann::json report_to_json(const RecoveryReport& report) {
  using nlohmann::json;
  json out;
  out["method"] = std::string(to_string(report.method));
  out["p"] = report.estimate.p();
  out["k"] = report.estimate.k();
  out["n"] = report.n;
  out["support_threshold"] = report.support_threshold;
  json edges = json::array();
  for (const auto& [edge, w] : ranked_edges(report.estimate)) edges.push_back({{"nodes", edge}, {"weight", w}});
  out["edges"] = std::move(edges);
  json nodes = json::array();
  for (const auto& node : report.nodes) {
    json trace = json::array();
    for (const auto& pt : node.bic_trace) {
      trace.push_back({{"lambda", pt.lambda}, {"bic", pt.bic}, {"loss", pt.loss}, {"df", pt.df}});
    }
    nodes.push_back({{"node", node.node},
                     {"lambda", node.lambda},
                     {"iterations", node.iterations},
                     {"converged", node.converged},
                     {"kkt_residual", node.kkt_residual},
                     {"overflow", node.overflow},
                     {"bic_trace", std::move(trace)}});
  }
  out["nodes"] = std::move(nodes);
  if (report.metrics) {
    const auto& m = *report.metrics;
    out["metrics"] = {{"max_abs_error", m.max_abs_error},
                      {"node_l2", m.node_l2},
                      {"mean_node_l2", m.mean_node_l2},
                      {"true_edges", m.true_edges},
                      {"estimated_edges", m.estimated_edges},
                      {"true_positives", m.true_positives},
                      {"precision", m.precision},
                      {"recall", m.recall},
                      {"exact_support", m.exact_support}};
  } else {
    out["metrics"] = nullptr;
  }
  return out;
}

}  // namespace kspin
