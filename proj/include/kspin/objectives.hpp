#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kspin/samples.hpp"
#include "kspin/tensor.hpp"

namespace kspin {

enum class Method { Rise, Rple };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);  // "rise" | "rple", case-insensitive

// Largest C(p-1,k-1) for which per-node features and Gram matrices are held densely.
inline constexpr std::size_t kDenseLimit = 20000;

// Exponent arguments of the screening loss are clamped to +/- this value.
inline constexpr double kExpClamp = 700.0;

// log(cosh(x)) without overflow: |x| + log1p(exp(-2|x|)) - log 2.
double logcosh(double x);

/// Coefficients J_r of one node's regression, indexed by TupleIndex(p, k, r).
struct NeighborhoodVector {
  int r = 1;
  int k = 2;
  std::vector<double> coeffs;
};

struct LossEval {
  double value = 0.0;
  std::vector<double> gradient;
  bool overflow = false;  // some exponent argument hit kExpClamp
};

/// Samples of one node's regression, grouped by the configuration of the other
/// p-1 spins.
///
/// Both losses depend on a sample only through x_r and the monomial vector
/// of x_{-r}, so samples sharing x_{-r} collapse into one row carrying the
/// fractions of samples with x_r = +1 and x_r = -1. Rows hold the +/-1
/// monomials densely when C(p-1,k-1) <= dense_limit and are recomputed per
/// evaluation otherwise.
class NodeDesign {
 public:
  NodeDesign(const SampleMatrix& X, int r, int k, std::size_t dense_limit = kDenseLimit);

  const TupleIndex& index() const noexcept { return index_; }
  int center() const noexcept { return index_.center(); }
  int k() const noexcept { return index_.k(); }
  std::size_t dim() const noexcept { return index_.size(); }
  std::size_t sample_count() const noexcept { return n_; }
  std::size_t rows() const noexcept { return up_.size(); }
  bool materialized() const noexcept { return !features_.empty(); }

  // Average loss and its gradient at coeffs.
  LossEval evaluate(Method method, std::span<const double> coeffs) const;

  // (1/n) sum_i X_r^(i) X_r^(i)^T over the monomial vectors.
  Eigen::MatrixXd gram() const;

 private:
  void row_features(std::size_t row, std::span<double> out) const;
  void linear_predictor(std::span<const double> coeffs, Eigen::VectorXd& s) const;
  void accumulate_gradient(const Eigen::VectorXd& c, std::span<double> grad) const;

  TupleIndex index_;
  std::size_t n_;
  int p_;
  std::vector<double> up_;    // fraction of samples in the row with x_r = +1
  std::vector<double> down_;  // fraction with x_r = -1
  std::vector<std::int8_t> rest_;  // one representative configuration per row (streaming path)
  std::vector<double> features_;   // rows x dim, row-major (dense path)
};

// Negative log-pseudolikelihood of node Jr.r and its gradient.
LossEval rple_eval(const NeighborhoodVector& Jr, const SampleMatrix& X);

// Interaction screening objective of node Jr.r and its gradient.
LossEval rise_eval(const NeighborhoodVector& Jr, const SampleMatrix& X);

LossEval loss_eval(Method method, const NeighborhoodVector& Jr, const SampleMatrix& X);

// Empirical Gram matrix of node r's monomials; Capability error past kDenseLimit.
Eigen::MatrixXd empirical_gram(const SampleMatrix& X, int r, int k);

// Minimum eigenvalue of a symmetric matrix; Shape error when not symmetric.
double restricted_eigen_diag(const Eigen::MatrixXd& Q);

}  // namespace kspin
