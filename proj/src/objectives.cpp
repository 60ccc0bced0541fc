#include "kspin/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "kspin/combinatorics.hpp"
#include "kspin/error.hpp"

namespace kspin {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kLog2 = 0.69314718055994530942;

void check_shape(const NeighborhoodVector& Jr, const SampleMatrix& X) {
  if (Jr.k < 2 || Jr.k > X.p()) throw Error(ErrorKind::Shape, "interaction order incompatible with samples");
  if (Jr.r < 1 || Jr.r > X.p()) throw Error(ErrorKind::Shape, "center node outside the sample columns");
  const auto expected = binomial(X.p() - 1, Jr.k - 1);
  if (Jr.coeffs.size() != expected) {
    throw Error(ErrorKind::Shape, "neighborhood vector has " + std::to_string(Jr.coeffs.size()) +
                                      " entries, expected C(p-1,k-1) = " + std::to_string(expected));
  }
}

}  // namespace

std::string_view to_string(Method m) noexcept { return m == Method::Rise ? "rise" : "rple"; }

Method parse_method(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "rise") return Method::Rise;
  if (lower == "rple") return Method::Rple;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(text) + "' (rise|rple)");
}

double logcosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - kLog2;
}

NodeDesign::NodeDesign(const SampleMatrix& X, int r, int k, std::size_t dense_limit)
    : index_(X.p(), k, r), n_(X.n()), p_(X.p()) {
  const auto p = static_cast<std::size_t>(p_);
  const auto slot = static_cast<std::size_t>(r - 1);

  // Keys are rows with the center spin zeroed; equal keys share x_{-r}.
  std::vector<std::int8_t> keys(X.data());
  for (std::size_t i = 0; i < n_; ++i) keys[i * p + slot] = 0;
  std::vector<std::size_t> order(n_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return keys.data() + i * p; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::memcmp(key(a), key(b), p) < 0; });

  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_;) {
    const std::size_t head = order[j];
    double up = 0.0;
    double down = 0.0;
    for (; j < n_ && std::memcmp(key(order[j]), key(head), p) == 0; ++j) {
      (X.at(order[j], r - 1) > 0 ? up : down) += inv_n;
    }
    up_.push_back(up);
    down_.push_back(down);
    const SpinView x = X.row(head);
    rest_.insert(rest_.end(), x.begin(), x.end());
  }

  if (dim() <= dense_limit) {
    features_.resize(rows() * dim());
    for (std::size_t g = 0; g < rows(); ++g) row_features(g, {features_.data() + g * dim(), dim()});
  }
}

void NodeDesign::row_features(std::size_t row, std::span<double> out) const {
  const std::int8_t* x = rest_.data() + row * static_cast<std::size_t>(p_);
  for (std::size_t t = 0; t < dim(); ++t) {
    int sign = 1;
    for (int v : index_.members(t)) sign *= x[v];
    out[t] = sign;
  }
}

void NodeDesign::linear_predictor(std::span<const double> coeffs, Eigen::VectorXd& s) const {
  const double kfact = factorial(k());
  const Eigen::Map<const Eigen::VectorXd> J(coeffs.data(), static_cast<Eigen::Index>(dim()));
  s.resize(static_cast<Eigen::Index>(rows()));
  if (materialized()) {
    const Eigen::Map<const RowMatrix> F(features_.data(), static_cast<Eigen::Index>(rows()),
                                        static_cast<Eigen::Index>(dim()));
    s.noalias() = F * J;
  } else {
    std::vector<double> buf(dim());
    for (std::size_t g = 0; g < rows(); ++g) {
      row_features(g, buf);
      s[static_cast<Eigen::Index>(g)] = Eigen::Map<const Eigen::VectorXd>(buf.data(), J.size()).dot(J);
    }
  }
  s *= kfact;
}

void NodeDesign::accumulate_gradient(const Eigen::VectorXd& c, std::span<double> grad) const {
  const double kfact = factorial(k());
  Eigen::Map<Eigen::VectorXd> G(grad.data(), static_cast<Eigen::Index>(dim()));
  if (materialized()) {
    const Eigen::Map<const RowMatrix> F(features_.data(), static_cast<Eigen::Index>(rows()),
                                        static_cast<Eigen::Index>(dim()));
    G.noalias() = F.transpose() * c;
  } else {
    G.setZero();
    std::vector<double> buf(dim());
    for (std::size_t g = 0; g < rows(); ++g) {
      row_features(g, buf);
      G += c[static_cast<Eigen::Index>(g)] * Eigen::Map<const Eigen::VectorXd>(buf.data(), G.size());
    }
  }
  G *= kfact;
}

LossEval NodeDesign::evaluate(Method method, std::span<const double> coeffs) const {
  if (coeffs.size() != dim()) throw Error(ErrorKind::Shape, "coefficient vector has wrong length");
  Eigen::VectorXd s;  // k m_r per row
  linear_predictor(coeffs, s);
  Eigen::VectorXd c(s.size());  // d(row loss)/d(s)
  LossEval out;
  double value = 0.0;
  if (method == Method::Rise) {
    for (Eigen::Index g = 0; g < s.size(); ++g) {
      // x_r = +1 contributes exp(-s), x_r = -1 contributes exp(+s).
      double a = -s[g];
      if (std::abs(a) > kExpClamp) {
        a = std::copysign(kExpClamp, a);
        out.overflow = true;
      }
      const double e_up = std::exp(a);
      const double e_down = std::exp(-a);
      value += up_[g] * e_up + down_[g] * e_down;
      c[g] = -up_[g] * e_up + down_[g] * e_down;
    }
  } else {
    for (Eigen::Index g = 0; g < s.size(); ++g) {
      const double both = up_[g] + down_[g];
      const double net = up_[g] - down_[g];
      value += both * (logcosh(s[g]) + kLog2) - net * s[g];
      c[g] = both * std::tanh(s[g]) - net;
    }
  }
  out.value = value;
  out.gradient.assign(dim(), 0.0);
  accumulate_gradient(c, out.gradient);
  return out;
}

Eigen::MatrixXd NodeDesign::gram() const {
  if (!materialized()) {
    throw Error(ErrorKind::Capability, "Gram matrix needs C(p-1,k-1) <= " + std::to_string(kDenseLimit));
  }
  const Eigen::Map<const RowMatrix> F(features_.data(), static_cast<Eigen::Index>(rows()),
                                      static_cast<Eigen::Index>(dim()));
  Eigen::VectorXd w(static_cast<Eigen::Index>(rows()));
  for (std::size_t g = 0; g < rows(); ++g) w[static_cast<Eigen::Index>(g)] = up_[g] + down_[g];
  Eigen::MatrixXd Q = F.transpose() * w.asDiagonal() * F;
  // Exact unit diagonal and symmetry regardless of summation order.
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    Q(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) Q(j, i) = Q(i, j);
  }
  return Q;
}

LossEval loss_eval(Method method, const NeighborhoodVector& Jr, const SampleMatrix& X) {
  check_shape(Jr, X);
  const NodeDesign design(X, Jr.r, Jr.k);
  return design.evaluate(method, Jr.coeffs);
}

LossEval rple_eval(const NeighborhoodVector& Jr, const SampleMatrix& X) {
  return loss_eval(Method::Rple, Jr, X);
}

LossEval rise_eval(const NeighborhoodVector& Jr, const SampleMatrix& X) {
  return loss_eval(Method::Rise, Jr, X);
}

Eigen::MatrixXd empirical_gram(const SampleMatrix& X, int r, int k) {
  if (binomial(X.p() - 1, k - 1) > kDenseLimit) {
    throw Error(ErrorKind::Capability, "Gram matrix needs C(p-1,k-1) <= " + std::to_string(kDenseLimit));
  }
  return NodeDesign(X, r, k).gram();
}

double restricted_eigen_diag(const Eigen::MatrixXd& Q) {
  if (Q.rows() != Q.cols() || Q.rows() == 0) throw Error(ErrorKind::Shape, "matrix is not square");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::Shape, "matrix is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Q, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Numeric, "eigen-solve failed");
  return solver.eigenvalues().minCoeff();
}

}  // namespace kspin
