#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kspin/hypergen.hpp"
#include "kspin/learner.hpp"

namespace kspin {

// Simulation sweep over (beta, n, method, seed) cells. Each cell draws its
// own hypergraph from `seed`, samples exactly and recovers the tensor.
struct ExperimentConfig {
  HypergraphSpec spec{.coupling_scale = CouplingScale::Hyperedge};  // beta and seed come from the grids
  std::vector<Method> methods{Method::Rise, Method::Rple};
  std::vector<std::size_t> n_grid;
  std::vector<double> beta_grid;
  std::vector<std::uint64_t> seeds;
  LambdaRule lambda_rule = BicGridLambda{};
  BicScaling bic_scaling = BicScaling::SampleScaled;
  Reconcile reconcile = Reconcile::Mean;
  SolverConfig solver;
  std::optional<double> support_threshold;  // default: half the true entry magnitude
  std::string output_path;
  int jobs = 1;
  bool record_timing = true;

  void validate() const;
};

// Keys: p k d sign_mode coupling_scale methods n_grid beta_grid seeds
// lambda_rule support_threshold bic_scaling reconcile solver output_path jobs
// record_timing. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig read_experiment_config(const std::string& path);

// {"type": "bic", "multipliers": [...], "values": [...], "eps": e}
// {"type": "theorem", "eps": e, "beta": b, "degree": d}
// {"type": "fixed", "value": v}
LambdaRule parse_lambda_rule(const nlohmann::json& j);
SolverConfig parse_solver_config(const nlohmann::json& j);

struct ExperimentRow {
  double beta = 0.0;
  std::size_t n = 0;
  Method method = Method::Rise;
  std::uint64_t seed = 0;
  double max_abs_error = 0.0;
  double mean_node_l2 = 0.0;
  bool support_exact = false;
  double lambda_selected = 0.0;  // mean of the per-node choices
  double wall_time_s = 0.0;
  std::string error;  // empty on success
};

// Rows sorted by (beta, n, method, seed) whatever the completion order. A
// failing cell yields a row with `error` set and NaN metrics.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kResultsHeader =
    "beta,n,method,seed,max_abs_error,mean_node_l2,support_exact,lambda_selected,wall_time_s,error";

void write_results_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

// Mean of max_abs_error over successful rows matching (beta, n, method).
// NaN when none match.
double mean_max_abs_error(const std::vector<ExperimentRow>& rows, double beta, std::size_t n, Method method);

}  // namespace kspin
