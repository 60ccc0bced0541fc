#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kspin/objectives.hpp"
#include "kspin/optimizer.hpp"
#include "kspin/samples.hpp"
#include "kspin/tensor.hpp"

namespace kspin {

// Coefficients with |value| above this count toward df(lambda).
inline constexpr double kDfTolerance = 1e-8;

struct FixedLambda {
  double value = 0.1;
};

// Closed-form lambda from the error-rate theorems. RISE needs beta and d;
// when absent they default to beta = 1 and d = 1 (evaluation use only).
struct TheoremLambda {
  double eps = 0.05;
  std::optional<double> beta;
  std::optional<int> degree;
};

// Per-node BIC minimization over lambda = c * sqrt(log(4 C(p-1,k-1) / eps) / n)
// for each multiplier c (or over `values` verbatim when non-empty).
struct BicGridLambda {
  std::vector<double> multipliers;  // empty: default 20-point grid, c in [2^-6, 2^4]
  std::vector<double> values;
  double eps = 0.05;
};

using LambdaRule = std::variant<FixedLambda, TheoremLambda, BicGridLambda>;

// How the k per-node estimates of one hyperedge become a single weight.
enum class Reconcile { Mean, MinMagnitude, MaxMagnitude };

// SampleScaled: n * average loss + df log p. Literal: average loss + df log p.
enum class BicScaling { SampleScaled, Literal };

struct LearnConfig {
  Method method = Method::Rise;
  LambdaRule lambda_rule = BicGridLambda{};
  double support_threshold = 0.0;
  Reconcile reconcile = Reconcile::Mean;
  BicScaling bic_scaling = BicScaling::SampleScaled;
  SolverConfig solver;
  int jobs = 1;

  void validate() const;
};

Reconcile parse_reconcile(const std::string& text);
BicScaling parse_bic_scaling(const std::string& text);

// sqrt(log(4 C(p-1,k-1) / eps) / n).
double lambda_scale(int p, int k, std::size_t n, double eps);

// RPLE: 4 sqrt(2) k! lambda_scale. RISE: 2 sqrt(2) k! e^{k! beta d} lambda_scale.
double theorem_lambda(Method method, int p, int k, std::size_t n, double eps, double beta = 0.0,
                      int d = 0);

// The 20 default multipliers 2^{4}, ..., 2^{-6}, log-spaced, decreasing.
std::vector<double> default_lambda_multipliers();

FitResult fit_node(const NodeDesign& design, Method method, double lambda, const SolverConfig& cfg,
                   std::optional<std::span<const double>> warm = std::nullopt);
FitResult fit_node(const SampleMatrix& X, int r, int k, Method method, double lambda,
                   const SolverConfig& cfg, std::optional<std::span<const double>> warm = std::nullopt);

struct BicPoint {
  double lambda = 0.0;
  double bic = 0.0;
  double loss = 0.0;
  std::size_t df = 0;
};

struct BicSelection {
  double lambda = 0.0;
  FitResult fit;
  std::vector<BicPoint> trace;  // in fitting order (decreasing lambda)
};

std::size_t degrees_of_freedom(std::span<const double> coeffs);

BicSelection bic_select(const NodeDesign& design, Method method, std::span<const double> grid,
                        const SolverConfig& cfg, BicScaling scaling = BicScaling::SampleScaled);
BicSelection bic_select(const SampleMatrix& X, int r, int k, Method method, std::span<const double> grid,
                        const SolverConfig& cfg, BicScaling scaling = BicScaling::SampleScaled);

struct NodeReport {
  int node = 1;
  double lambda = 0.0;
  std::vector<BicPoint> bic_trace;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  bool overflow = false;
  NeighborhoodVector coeffs;
};

struct RecoveryMetrics {
  double max_abs_error = 0.0;
  std::vector<double> node_l2;
  double mean_node_l2 = 0.0;
  std::size_t true_edges = 0;
  std::size_t estimated_edges = 0;
  std::size_t true_positives = 0;
  double precision = 1.0;
  double recall = 1.0;
  bool exact_support = true;
};

struct RecoveryReport {
  Method method = Method::Rise;
  std::size_t n = 0;
  double support_threshold = 0.0;
  InteractionTensor estimate;
  std::vector<NodeReport> nodes;
  std::vector<Hyperedge> support;  // sorted lexicographically
  std::optional<RecoveryMetrics> metrics;

  double mean_lambda() const;
};

// Fits every node, reconciles each hyperedge's k estimates, drops weights
// below the support threshold and, when truth is given, scores the result.
RecoveryReport recover_tensor(const SampleMatrix& X, int k, const LearnConfig& cfg,
                              const InteractionTensor* truth = nullptr);

RecoveryMetrics score_recovery(const InteractionTensor& estimate, const std::vector<NodeReport>& nodes,
                               const InteractionTensor& truth);

// Edges of J sorted by |weight| descending, ties in lexicographic order.
std::vector<std::pair<Hyperedge, double>> ranked_edges(const InteractionTensor& J);

nlohmann::json report_to_json(const RecoveryReport& report);

}  // namespace kspin
