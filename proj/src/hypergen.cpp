#include "kspin/hypergen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kspin/combinatorics.hpp"
#include "kspin/error.hpp"
#include "kspin/random.hpp"

namespace kspin {

SignMode parse_sign_mode(const std::string& text) {
  if (text == "positive") return SignMode::AllPositive;
  if (text == "rademacher") return SignMode::Rademacher;
  throw Error(ErrorKind::InvalidArgument, "unknown sign mode '" + text + "' (positive|rademacher)");
}

std::string to_string(SignMode mode) { return mode == SignMode::AllPositive ? "positive" : "rademacher"; }

CouplingScale parse_coupling_scale(const std::string& text) {
  if (text == "tensor") return CouplingScale::Tensor;
  if (text == "hyperedge") return CouplingScale::Hyperedge;
  throw Error(ErrorKind::InvalidArgument, "unknown coupling scale '" + text + "' (tensor|hyperedge)");
}

std::string to_string(CouplingScale scale) { return scale == CouplingScale::Tensor ? "tensor" : "hyperedge"; }

double HypergraphSpec::entry_magnitude() const {
  return coupling_scale == CouplingScale::Tensor ? beta : beta / factorial(k);
}

void HypergraphSpec::validate() const {
  if (p < 1 || k < 2 || d < 1) throw Error(ErrorKind::InvalidArgument, "need p >= 1, k >= 2, d >= 1");
  if (k > p) throw Error(ErrorKind::InvalidArgument, "k exceeds p");
  if ((static_cast<long long>(d) * p) % k != 0) {
    throw Error(ErrorKind::InvalidArgument, "d*p = " + std::to_string(d * p) + " is not divisible by k = " +
                                                std::to_string(k));
  }
  if (static_cast<std::uint64_t>(d) > binomial(p - 1, k - 1)) {
    throw Error(ErrorKind::InvalidArgument, "degree d exceeds the number of distinct hyperedges per node");
  }
  if (!(beta > 0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
}

std::vector<Hyperedge> random_regular_uniform(const HypergraphSpec& spec, int max_attempts) {
  spec.validate();
  Rng rng(spec.seed, {0x6879706572u});
  std::vector<int> stubs;
  for (int v = 1; v <= spec.p; ++v) stubs.insert(stubs.end(), static_cast<std::size_t>(spec.d), v);
  const auto k = static_cast<std::size_t>(spec.k);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::swap(stubs[i - 1], stubs[rng.below(i)]);
    }
    std::set<Hyperedge> edges;
    bool ok = true;
    for (std::size_t g = 0; ok && g < stubs.size(); g += k) {
      Hyperedge e(stubs.begin() + static_cast<std::ptrdiff_t>(g),
                  stubs.begin() + static_cast<std::ptrdiff_t>(g + k));
      std::sort(e.begin(), e.end());
      ok = std::adjacent_find(e.begin(), e.end()) == e.end() && edges.insert(std::move(e)).second;
    }
    if (ok) return {edges.begin(), edges.end()};
  }
  throw Error(ErrorKind::GenerationFailure,
              "no simple hypergraph after " + std::to_string(max_attempts) + " configuration-model draws");
}

InteractionTensor assign_couplings(int p, int k, const std::vector<Hyperedge>& edges, double beta,
                                   SignMode mode, std::uint64_t seed) {
  if (!(beta > 0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  Rng rng(seed, {0x7369676eu});
  InteractionTensor J(p, k);
  for (const auto& e : edges) {
    const double sign = (mode == SignMode::Rademacher && rng.coin()) ? -1.0 : 1.0;
    J.set(e, sign * beta);
  }
  return J;
}

InteractionTensor generate_model(const HypergraphSpec& spec) {
  return assign_couplings(spec.p, spec.k, random_regular_uniform(spec), spec.entry_magnitude(), spec.sign_mode, spec.seed);
}

}  // namespace kspin
