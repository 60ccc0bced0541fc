#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kspin {

// Node ids are 1-based in every public signature and in files; arrays indexed
// by node are 0-based (slot r-1 holds node r).

// Strictly increasing tuple of node ids.
using Hyperedge = std::vector<int>;

// A configuration x in {-1,+1}^p.
using SpinView = std::span<const std::int8_t>;

struct HyperedgeHash {
  std::size_t operator()(const Hyperedge& e) const noexcept;
};

// Throws InvalidSample unless x has length p and every entry is +1 or -1.
void validate_spins(SpinView x, int p);

/// Symmetric, zero-diagonal order-k coupling tensor over p nodes.
///
/// Only strictly increasing tuples are stored; any ordering of a tuple reads
/// the same weight and any tuple with a repeated node reads zero. Writing a
/// zero weight removes the entry, so the stored keys are exactly the support.
class InteractionTensor {
 public:
  using Map = std::unordered_map<Hyperedge, double, HyperedgeHash>;

  InteractionTensor(int p, int k);

  int p() const noexcept { return p_; }
  int k() const noexcept { return k_; }
  std::size_t edge_count() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Weight of an arbitrarily ordered k-tuple.
  double get(std::span<const int> tuple) const;

  // Stores the weight under the sorted tuple. Repeated ids are rejected.
  void set(std::span<const int> tuple, double weight);

  const Map& entries() const noexcept { return entries_; }

  // Entries in lexicographic tuple order.
  std::vector<std::pair<Hyperedge, double>> sorted_entries() const;

  // For each node (0-based slot), the stored edges containing it, as the
  // remaining k-1 members (0-based) plus the weight.
  struct Incidence {
    std::vector<int> others;
    double weight;
  };
  std::vector<std::vector<Incidence>> incidence() const;

  // Applies a relabeling: node r becomes perm[r-1] (perm is a permutation of 1..p).
  InteractionTensor relabeled(std::span<const int> perm) const;

  friend bool operator==(const InteractionTensor& a, const InteractionTensor& b);

 private:
  Hyperedge canonical(std::span<const int> tuple, bool allow_repeats, bool& repeated) const;

  int p_;
  int k_;
  Map entries_;
};

/// Dense indexing of the (k-1)-subsets of [p] \ {r} in colexicographic order.
class TupleIndex {
 public:
  TupleIndex(int p, int k, int r);

  int p() const noexcept { return p_; }
  int k() const noexcept { return k_; }
  int center() const noexcept { return r_; }
  std::size_t size() const noexcept { return size_; }

  // Rank of a strictly increasing (k-1)-tuple of 1-based ids excluding r.
  std::size_t rank(std::span<const int> tuple) const;

  // Inverse of rank, as 1-based ids.
  std::vector<int> unrank(std::size_t index) const;

  // Members of the tuple at `index` as 0-based node slots (k-1 entries).
  std::span<const int> members(std::size_t index) const {
    const auto w = static_cast<std::size_t>(k_ - 1);
    return {members_.data() + index * w, w};
  }

 private:
  int p_;
  int k_;
  int r_;
  std::size_t size_;
  std::vector<int> members_;
};

std::size_t rank_tuple(std::span<const int> tuple, int r, int p, int k);

// Sum over all ordered k-tuples of J * spin product, i.e. k! times the sum
// over stored hyperedges.
double hamiltonian(const InteractionTensor& J, SpinView x);

// Products of x over each tuple of `index`, in rank order.
std::vector<double> local_monomials(SpinView x, const TupleIndex& index);
void local_monomials(SpinView x, const TupleIndex& index, std::span<double> out);

// m_r(x): sum over ordered (k-1)-tuples of J_{r,...} times the spin product,
// equal to (k-1)! <J_r, local_monomials(x, r)>.
double local_field(const InteractionTensor& J, SpinView x, int r);

// Dense neighborhood slice J_r, indexed by `index`.
std::vector<double> neighborhood(const InteractionTensor& J, const TupleIndex& index);

struct GraphStats {
  double beta_max = 0.0;
  std::vector<int> degree;
  int d_max = 0;
};

GraphStats graph_stats(const InteractionTensor& J);

}  // namespace kspin
