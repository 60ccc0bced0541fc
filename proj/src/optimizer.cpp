#include "kspin/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kspin/error.hpp"

namespace kspin {

namespace {

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

bool all_finite(const LossEval& e) {
  if (!std::isfinite(e.value)) return false;
  return std::all_of(e.gradient.begin(), e.gradient.end(), [](double g) { return std::isfinite(g); });
}

void prox_step(std::span<const double> y, std::span<const double> grad, double step, double lambda,
               std::vector<double>& out) {
  out.resize(y.size());
  const double t = step * lambda;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y[i] - step * grad[i];
    const double mag = std::abs(v) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, v) : 0.0;
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be positive");
  if (!(tol_rel_objective > 0) || !(tol_kkt > 0) || !(initial_step > 0)) {
    throw Error(ErrorKind::InvalidArgument, "solver tolerances and initial step must be positive");
  }
  if (!(backtrack_factor > 0 && backtrack_factor < 1)) {
    throw Error(ErrorKind::InvalidArgument, "backtrack_factor must lie in (0,1)");
  }
}

std::vector<double> soft_threshold(std::span<const double> v, double t) {
  if (!(t >= 0)) throw Error(ErrorKind::InvalidArgument, "soft threshold needs t >= 0");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

double kkt_residual(std::span<const double> x, std::span<const double> grad, double lambda) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] != 0.0 ? std::abs(grad[i] + std::copysign(lambda, x[i]))
                                 : std::max(std::abs(grad[i]) - lambda, 0.0);
    worst = std::max(worst, r);
  }
  return worst;
}

FitResult minimize_l1(const LossOracle& loss, std::size_t dim, double lambda, const SolverConfig& cfg,
                      std::optional<std::span<const double>> warm_start) {
  cfg.validate();
  if (!(lambda >= 0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::InvalidArgument, "lambda must be finite and non-negative");
  }
  FitResult result;
  std::vector<double> x(dim, 0.0);
  if (warm_start) {
    if (warm_start->size() != dim) throw Error(ErrorKind::Shape, "warm start has wrong length");
    x.assign(warm_start->begin(), warm_start->end());
  }

  LossEval at_x = loss(x);
  if (!all_finite(at_x) || at_x.gradient.size() != dim) {
    throw Error(ErrorKind::InvalidModel, "loss is not finite at the starting point");
  }
  result.overflow_seen = at_x.overflow;
  double objective = at_x.value + lambda * l1_norm(x);
  result.objective_trace.push_back(objective);
  result.kkt_residual = kkt_residual(x, at_x.gradient, lambda);

  double lipschitz = 1.0 / cfg.initial_step;
  double momentum = 1.0;
  std::vector<double> y = x;
  LossEval at_y = at_x;
  std::vector<double> z;
  std::vector<double> x_prev;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    result.iterations = it;
    LossEval at_z;
    while (true) {
      prox_step(y, at_y.gradient, 1.0 / lipschitz, lambda, z);
      at_z = loss(z);
      result.overflow_seen = result.overflow_seen || at_z.overflow;
      if (all_finite(at_z)) {
        double lin = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          const double d = z[i] - y[i];
          lin += at_y.gradient[i] * d;
          sq += d * d;
        }
        const double bound = at_y.value + lin + 0.5 * lipschitz * sq;
        if (at_z.value <= bound + 1e-15 * std::abs(at_y.value)) break;
      }
      lipschitz /= cfg.backtrack_factor;
      if (!std::isfinite(lipschitz) || lipschitz > 1e300) {
        throw Error(ErrorKind::Numeric, "backtracking failed to find a step size");
      }
    }
    const double candidate = at_z.value + lambda * l1_norm(z);

    if (cfg.restart_on_nonmonotone && candidate > objective && y != x) {
      // Momentum overshot: retry as a plain proximal step from x.
      y = x;
      at_y = at_x;
      momentum = 1.0;
      continue;
    }

    x_prev.swap(x);
    x.swap(z);
    at_x = std::move(at_z);
    objective = candidate;
    result.objective_trace.push_back(objective);
    result.kkt_residual = kkt_residual(x, at_x.gradient, lambda);

    const std::size_t len = result.objective_trace.size();
    if (result.kkt_residual <= cfg.tol_kkt && len >= 6) {
      const double before = result.objective_trace[len - 6];
      const double rel = std::abs(before - objective) / std::max(std::abs(objective), 1.0);
      if (rel < cfg.tol_rel_objective) {
        result.converged = true;
        break;
      }
    }

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next_momentum;
    momentum = next_momentum;
    bool moved = false;
    y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      y[i] = x[i] + beta * (x[i] - x_prev[i]);
      moved = moved || y[i] != x[i];
    }
    if (moved) {
      at_y = loss(y);
      result.overflow_seen = result.overflow_seen || at_y.overflow;
      if (!all_finite(at_y)) {
        y = x;
        at_y = at_x;
        momentum = 1.0;
      }
    } else {
      at_y = at_x;
    }
  }

  result.coeffs.coeffs = std::move(x);
  return result;
}

}  // namespace kspin
