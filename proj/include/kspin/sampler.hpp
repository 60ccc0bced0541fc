#pragma once

#include <cstdint>
#include <vector>

#include "kspin/samples.hpp"
#include "kspin/tensor.hpp"

namespace kspin {

// Largest p for which the 2^p state space is enumerated.
inline constexpr int kEnumerationLimit = 25;

/// Exact law P_J(x) = exp(H(x)) / Z over {-1,+1}^p, by streaming enumeration.
///
/// State s encodes x with bit (v-1) set iff x_v = +1. The log-partition
/// function is computed once at construction; the state space is never stored.
class ExactModel {
 public:
  explicit ExactModel(const InteractionTensor& J);

  int p() const noexcept { return p_; }
  std::uint64_t state_count() const noexcept { return std::uint64_t{1} << p_; }
  double log_partition() const noexcept { return log_z_; }

  double hamiltonian(std::uint64_t state) const;
  double pmf(std::uint64_t state) const;
  double pmf(SpinView x) const;

  static std::uint64_t encode(SpinView x);
  static void decode(std::uint64_t state, std::span<std::int8_t> out);

 private:
  int p_;
  double scale_;  // k!
  std::vector<std::uint32_t> masks_;
  std::vector<double> weights_;
  double log_z_ = 0.0;
};

struct GibbsConfig {
  long burn_in_sweeps = 1000;
  long thin_sweeps = 10;
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;  // stream id, so parallel chains never share draws
};

// log Z(J); Capability error when p exceeds kEnumerationLimit.
double partition_function(const InteractionTensor& J);

double pmf(const InteractionTensor& J, SpinView x);

// P(X_r = +1 | x_{-r}) = 1 / (1 + exp(-2 k m_r(x))).
double conditional_prob(const InteractionTensor& J, SpinView x, int r);

// n i.i.d. draws by inverse CDF over the enumerated states.
SampleMatrix sample_exact(const InteractionTensor& J, std::size_t n, std::uint64_t seed);

// Single-site sequential-sweep Gibbs chain from a uniform random start; keeps
// every thin_sweeps-th sweep after burn_in_sweeps.
SampleMatrix sample_gibbs(const InteractionTensor& J, std::size_t n, const GibbsConfig& cfg);

}  // namespace kspin
