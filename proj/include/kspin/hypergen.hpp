#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kspin/tensor.hpp"

namespace kspin {

enum class SignMode { AllPositive, Rademacher };

SignMode parse_sign_mode(const std::string& text);  // "positive" | "rademacher"
std::string to_string(SignMode mode);

// Tensor: every stored entry is +/-beta. Hyperedge: beta is the coefficient
// of the hyperedge's monomial in the Hamiltonian, so entries are +/-beta/k!.
enum class CouplingScale { Tensor, Hyperedge };

CouplingScale parse_coupling_scale(const std::string& text);  // "tensor" | "hyperedge"
std::string to_string(CouplingScale scale);

struct HypergraphSpec {
  int p = 16;
  int k = 3;
  int d = 3;
  SignMode sign_mode = SignMode::AllPositive;
  double beta = 1.0;
  CouplingScale coupling_scale = CouplingScale::Tensor;
  std::uint64_t seed = 0;

  // Magnitude of every stored tensor entry under coupling_scale.
  double entry_magnitude() const;

  // InvalidArgument unless k <= p, k*|E| = d*p is integral and d <= C(p-1,k-1).
  void validate() const;
};

inline constexpr int kMaxGenerationAttempts = 10000;

// d-regular k-uniform hypergraph by the configuration model: d stubs per
// node, a uniformly random partition into groups of k, rejected and redrawn
// whenever a group repeats a node or two groups coincide. Edges are sorted.
std::vector<Hyperedge> random_regular_uniform(const HypergraphSpec& spec,
                                              int max_attempts = kMaxGenerationAttempts);

// Weight +beta on every edge, or +/-beta with independent fair signs.
InteractionTensor assign_couplings(int p, int k, const std::vector<Hyperedge>& edges, double beta,
                                   SignMode mode, std::uint64_t seed);

// random_regular_uniform followed by assign_couplings with entry_magnitude(),
// both driven by spec.seed.
InteractionTensor generate_model(const HypergraphSpec& spec);

}  // namespace kspin
