#include "kspin/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "kspin/combinatorics.hpp"
#include "kspin/error.hpp"
#include "kspin/random.hpp"

namespace kspin {

namespace {

void require_enumerable(int p) {
  if (p > kEnumerationLimit) {
    throw Error(ErrorKind::Capability, "exact enumeration supports p <= " +
                                           std::to_string(kEnumerationLimit) + ", got p=" +
                                           std::to_string(p));
  }
}

}  // namespace

ExactModel::ExactModel(const InteractionTensor& J) : p_(J.p()), scale_(factorial(J.k())) {
  require_enumerable(p_);
  for (const auto& [edge, w] : J.sorted_entries()) {
    std::uint32_t mask = 0;
    for (int v : edge) mask |= std::uint32_t{1} << (v - 1);
    masks_.push_back(mask);
    weights_.push_back(w);
  }
  // Online log-sum-exp.
  double mx = -INFINITY;
  double acc = 0.0;
  for (std::uint64_t s = 0; s < state_count(); ++s) {
    const double h = hamiltonian(s);
    if (h > mx) {
      acc = acc * std::exp(mx - h) + 1.0;
      mx = h;
    } else {
      acc += std::exp(h - mx);
    }
  }
  log_z_ = mx + std::log(acc);
}

double ExactModel::hamiltonian(std::uint64_t state) const {
  const auto s = static_cast<std::uint32_t>(state);
  double h = 0.0;
  for (std::size_t e = 0; e < masks_.size(); ++e) {
    // Product of spins is -1 to the number of members at -1.
    const int negatives = std::popcount(masks_[e] & ~s);
    h += (negatives & 1) ? -weights_[e] : weights_[e];
  }
  return scale_ * h;
}

double ExactModel::pmf(std::uint64_t state) const { return std::exp(hamiltonian(state) - log_z_); }

double ExactModel::pmf(SpinView x) const {
  validate_spins(x, p_);
  return pmf(encode(x));
}

std::uint64_t ExactModel::encode(SpinView x) {
  std::uint64_t s = 0;
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v] > 0) s |= std::uint64_t{1} << v;
  }
  return s;
}

void ExactModel::decode(std::uint64_t state, std::span<std::int8_t> out) {
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = ((state >> v) & 1u) ? 1 : -1;
}

double partition_function(const InteractionTensor& J) { return ExactModel(J).log_partition(); }

double pmf(const InteractionTensor& J, SpinView x) { return ExactModel(J).pmf(x); }

double conditional_prob(const InteractionTensor& J, SpinView x, int r) {
  const double km = J.k() * local_field(J, x, r);
  // Stable logistic of 2 k m_r.
  const double z = 2.0 * km;
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

SampleMatrix sample_exact(const InteractionTensor& J, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  const ExactModel model(J);
  Rng rng(seed, {0x65786163u});

  std::vector<double> u(n);
  for (auto& v : u) v = rng.uniform();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return u[a] < u[b] || (u[a] == u[b] && a < b);
  });

  const auto p = static_cast<std::size_t>(J.p());
  std::vector<std::int8_t> data(n * p);
  std::size_t next = 0;
  double cdf = 0.0;
  std::uint64_t last_positive = 0;
  for (std::uint64_t s = 0; s < model.state_count() && next < n; ++s) {
    const double w = model.pmf(s);
    if (w > 0.0) last_positive = s;
    cdf += w;
    while (next < n && u[order[next]] < cdf) {
      ExactModel::decode(s, std::span<std::int8_t>(data.data() + order[next] * p, p));
      ++next;
    }
  }
  // Rounding can leave the final cumulative mass a hair below 1.
  for (; next < n; ++next) {
    ExactModel::decode(last_positive, std::span<std::int8_t>(data.data() + order[next] * p, p));
  }
  return SampleMatrix(n, J.p(), std::move(data));
}

SampleMatrix sample_gibbs(const InteractionTensor& J, std::size_t n, const GibbsConfig& cfg) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  if (cfg.burn_in_sweeps < 0) throw Error(ErrorKind::InvalidArgument, "burn_in_sweeps must be >= 0");
  if (cfg.thin_sweeps < 1) throw Error(ErrorKind::InvalidArgument, "thin_sweeps must be >= 1");

  Rng rng(cfg.seed, {0x67696262u, cfg.chain});
  const auto incidence = J.incidence();
  const double kfact = factorial(J.k());
  const auto p = static_cast<std::size_t>(J.p());

  std::vector<std::int8_t> x(p);
  for (auto& s : x) s = rng.coin() ? 1 : -1;

  auto sweep = [&] {
    for (std::size_t v = 0; v < p; ++v) {
      double field = 0.0;
      for (const auto& inc : incidence[v]) {
        int sign = 1;
        for (int u : inc.others) sign *= x[static_cast<std::size_t>(u)];
        field += inc.weight * sign;
      }
      const double z = 2.0 * kfact * field;  // 2 k m_r
      const double prob_up = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      x[v] = rng.uniform() < prob_up ? 1 : -1;
    }
  };

  for (long s = 0; s < cfg.burn_in_sweeps; ++s) sweep();
  std::vector<std::int8_t> data;
  data.reserve(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (long s = 0; s < cfg.thin_sweeps; ++s) sweep();
    data.insert(data.end(), x.begin(), x.end());
  }
  return SampleMatrix(n, J.p(), std::move(data));
}

}  // namespace kspin
