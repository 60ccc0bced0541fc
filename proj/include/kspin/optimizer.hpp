#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kspin/objectives.hpp"

namespace kspin {

struct SolverConfig {
  int max_iterations = 5000;
  double tol_rel_objective = 1e-9;
  double tol_kkt = 1e-6;
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  bool restart_on_nonmonotone = true;

  void validate() const;
};

struct FitResult {
  NeighborhoodVector coeffs;
  std::vector<double> objective_trace;  // smooth loss + lambda * ||x||_1 per accepted step
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  bool overflow_seen = false;
};

// Value and gradient of a convex differentiable loss at a point.
using LossOracle = std::function<LossEval(std::span<const double>)>;

// sign(v_i) * max(|v_i| - t, 0); InvalidArgument for t < 0.
std::vector<double> soft_threshold(std::span<const double> v, double t);

// max_i distance from -grad_i to lambda * subdifferential of |x_i|.
double kkt_residual(std::span<const double> x, std::span<const double> grad, double lambda);

/// Minimizes loss(x) + lambda * ||x||_1 over R^dim.
///
/// FISTA with backtracking on the quadratic upper bound of the smooth part.
/// A step that would raise the composite objective is replaced by a plain
/// proximal step from the last accepted point (momentum reset), which keeps
/// the trace monotone. Stops when the KKT residual is below tol_kkt and the
/// objective moved less than tol_rel_objective (relative) over the last five
/// accepted steps. Starts from warm_start when given, else from zero.
/// Only the `coeffs` vector of the result is filled; callers set r and k.
FitResult minimize_l1(const LossOracle& loss, std::size_t dim, double lambda, const SolverConfig& cfg,
                      std::optional<std::span<const double>> warm_start = std::nullopt);

}  // namespace kspin
