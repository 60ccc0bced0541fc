#include "kspin/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kspin/combinatorics.hpp"
#include "kspin/error.hpp"

namespace kspin {

namespace {

std::string tuple_text(std::span<const int> t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

}  // namespace

std::size_t HyperedgeHash::operator()(const Hyperedge& e) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (int v : e) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

void validate_spins(SpinView x, int p) {
  if (static_cast<int>(x.size()) != p) {
    throw Error(ErrorKind::InvalidSample, "spin vector has length " + std::to_string(x.size()) +
                                              ", expected " + std::to_string(p));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 1 && x[i] != -1) {
      throw Error(ErrorKind::InvalidSample,
                  "spin " + std::to_string(i + 1) + " is " + std::to_string(x[i]) + ", expected +1/-1");
    }
  }
}

InteractionTensor::InteractionTensor(int p, int k) : p_(p), k_(k) {
  if (p < 1) throw Error(ErrorKind::InvalidArgument, "node count p must be positive");
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "interaction order k must be at least 2");
  if (k > p) throw Error(ErrorKind::InvalidArgument, "interaction order k exceeds node count p");
}

Hyperedge InteractionTensor::canonical(std::span<const int> tuple, bool allow_repeats,
                                       bool& repeated) const {
  if (static_cast<int>(tuple.size()) != k_) {
    throw Error(ErrorKind::InvalidTuple, "tuple " + tuple_text(tuple) + " does not have " +
                                             std::to_string(k_) + " entries");
  }
  Hyperedge e(tuple.begin(), tuple.end());
  for (int v : e) {
    if (v < 1 || v > p_) {
      throw Error(ErrorKind::InvalidTuple,
                  "tuple " + tuple_text(tuple) + " has an id outside [1," + std::to_string(p_) + "]");
    }
  }
  std::sort(e.begin(), e.end());
  repeated = std::adjacent_find(e.begin(), e.end()) != e.end();
  if (repeated && !allow_repeats) {
    throw Error(ErrorKind::InvalidTuple, "tuple " + tuple_text(tuple) + " repeats a node");
  }
  return e;
}

double InteractionTensor::get(std::span<const int> tuple) const {
  bool repeated = false;
  const Hyperedge e = canonical(tuple, true, repeated);
  if (repeated) return 0.0;
  const auto it = entries_.find(e);
  return it == entries_.end() ? 0.0 : it->second;
}

void InteractionTensor::set(std::span<const int> tuple, double weight) {
  if (!std::isfinite(weight)) {
    throw Error(ErrorKind::InvalidArgument, "non-finite weight for " + tuple_text(tuple));
  }
  bool repeated = false;
  Hyperedge e = canonical(tuple, false, repeated);
  if (weight == 0.0) {
    entries_.erase(e);
  } else {
    entries_[std::move(e)] = weight;
  }
}

std::vector<std::pair<Hyperedge, double>> InteractionTensor::sorted_entries() const {
  std::vector<std::pair<Hyperedge, double>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::vector<InteractionTensor::Incidence>> InteractionTensor::incidence() const {
  std::vector<std::vector<Incidence>> inc(static_cast<std::size_t>(p_));
  for (const auto& [edge, w] : sorted_entries()) {
    for (int v : edge) {
      Incidence item{{}, w};
      for (int u : edge) {
        if (u != v) item.others.push_back(u - 1);
      }
      inc[static_cast<std::size_t>(v - 1)].push_back(std::move(item));
    }
  }
  return inc;
}

InteractionTensor InteractionTensor::relabeled(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != p_) {
    throw Error(ErrorKind::InvalidArgument, "permutation length does not match p");
  }
  InteractionTensor out(p_, k_);
  std::vector<int> mapped(static_cast<std::size_t>(k_));
  for (const auto& [edge, w] : entries_) {
    for (int i = 0; i < k_; ++i) mapped[i] = perm[static_cast<std::size_t>(edge[i] - 1)];
    out.set(mapped, w);
  }
  return out;
}

bool operator==(const InteractionTensor& a, const InteractionTensor& b) {
  return a.p_ == b.p_ && a.k_ == b.k_ && a.entries_ == b.entries_;
}

TupleIndex::TupleIndex(int p, int k, int r) : p_(p), k_(k), r_(r) {
  if (k < 2 || k > p) throw Error(ErrorKind::InvalidArgument, "need 2 <= k <= p");
  if (r < 1 || r > p) throw Error(ErrorKind::InvalidTuple, "center node out of range");
  size_ = static_cast<std::size_t>(binomial(p - 1, k - 1));
  const int w = k - 1;
  const int m = p - 1;
  members_.resize(size_ * static_cast<std::size_t>(w));
  // Colex successor over positions 0..m-1 of the relabeled set [p] \ {r}.
  std::vector<int> c(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) c[i] = i;
  const int center = r - 1;
  for (std::size_t idx = 0; idx < size_; ++idx) {
    for (int i = 0; i < w; ++i) {
      members_[idx * w + i] = c[i] < center ? c[i] : c[i] + 1;
    }
    int i = 0;
    while (i < w && c[i] + 1 == (i + 1 < w ? c[i + 1] : m)) ++i;
    if (i == w) break;
    ++c[i];
    for (int j = 0; j < i; ++j) c[j] = j;
  }
}

std::size_t TupleIndex::rank(std::span<const int> tuple) const {
  return rank_tuple(tuple, r_, p_, k_);
}

std::vector<int> TupleIndex::unrank(std::size_t index) const {
  if (index >= size_) throw Error(ErrorKind::InvalidTuple, "tuple rank out of range");
  std::vector<int> out;
  for (int v : members(index)) out.push_back(v + 1);
  return out;
}

std::size_t rank_tuple(std::span<const int> tuple, int r, int p, int k) {
  if (static_cast<int>(tuple.size()) != k - 1) {
    throw Error(ErrorKind::InvalidTuple, "tuple " + tuple_text(tuple) + " must have k-1 entries");
  }
  std::size_t rank = 0;
  int prev = 0;
  for (int i = 0; i < k - 1; ++i) {
    const int v = tuple[i];
    if (v < 1 || v > p || v == r || v <= prev) {
      throw Error(ErrorKind::InvalidTuple,
                  "tuple " + tuple_text(tuple) + " is not strictly increasing in [1,p] \\ {r}");
    }
    prev = v;
    const int pos = v < r ? v - 1 : v - 2;  // position within [p] \ {r}, 0-based
    rank += static_cast<std::size_t>(binomial(pos, i + 1));
  }
  return rank;
}

double hamiltonian(const InteractionTensor& J, SpinView x) {
  validate_spins(x, J.p());
  double sum = 0.0;
  for (const auto& [edge, w] : J.sorted_entries()) {
    int sign = 1;
    for (int v : edge) sign *= x[static_cast<std::size_t>(v - 1)];
    sum += w * sign;
  }
  return factorial(J.k()) * sum;
}

void local_monomials(SpinView x, const TupleIndex& index, std::span<double> out) {
  validate_spins(x, index.p());
  if (out.size() != index.size()) throw Error(ErrorKind::Shape, "monomial buffer has wrong length");
  for (std::size_t t = 0; t < index.size(); ++t) {
    int sign = 1;
    for (int v : index.members(t)) sign *= x[static_cast<std::size_t>(v)];
    out[t] = sign;
  }
}

std::vector<double> local_monomials(SpinView x, const TupleIndex& index) {
  std::vector<double> out(index.size());
  local_monomials(x, index, out);
  return out;
}

double local_field(const InteractionTensor& J, SpinView x, int r) {
  validate_spins(x, J.p());
  if (r < 1 || r > J.p()) throw Error(ErrorKind::InvalidTuple, "node out of range");
  const TupleIndex index(J.p(), J.k(), r);
  const std::vector<double> slice = neighborhood(J, index);
  double dot = 0.0;
  for (std::size_t t = 0; t < slice.size(); ++t) {
    if (slice[t] == 0.0) continue;
    int sign = 1;
    for (int v : index.members(t)) sign *= x[static_cast<std::size_t>(v)];
    dot += slice[t] * sign;
  }
  return factorial(J.k() - 1) * dot;
}

std::vector<double> neighborhood(const InteractionTensor& J, const TupleIndex& index) {
  if (index.p() != J.p() || index.k() != J.k()) {
    throw Error(ErrorKind::Shape, "tuple index does not match tensor dimensions");
  }
  std::vector<double> slice(index.size(), 0.0);
  const int r = index.center();
  std::vector<int> rest;
  for (const auto& [edge, w] : J.entries()) {
    if (!std::binary_search(edge.begin(), edge.end(), r)) continue;
    rest.clear();
    for (int v : edge) {
      if (v != r) rest.push_back(v);
    }
    slice[index.rank(rest)] = w;
  }
  return slice;
}

GraphStats graph_stats(const InteractionTensor& J) {
  GraphStats s;
  s.degree.assign(static_cast<std::size_t>(J.p()), 0);
  for (const auto& [edge, w] : J.entries()) {
    s.beta_max = std::max(s.beta_max, std::abs(w));
    for (int v : edge) ++s.degree[static_cast<std::size_t>(v - 1)];
  }
  for (int d : s.degree) s.d_max = std::max(s.d_max, d);
  return s;
}

}  // namespace kspin
