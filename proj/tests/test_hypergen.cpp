#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "kspin/error.hpp"
#include "kspin/hypergen.hpp"

using namespace kspin;

namespace {

std::vector<int> degrees(int p, const std::vector<Hyperedge>& edges) {
  std::vector<int> d(static_cast<std::size_t>(p), 0);
  for (const auto& e : edges) {
    for (int v : e) ++d[static_cast<std::size_t>(v - 1)];
  }
  return d;
}

}  // namespace

TEST(RandomRegularUniform, SixteenNodeDefault) {
  HypergraphSpec spec;
  const auto edges = random_regular_uniform(spec);
  EXPECT_EQ(edges.size(), 16u);
  EXPECT_EQ(degrees(16, edges), std::vector<int>(16, 3));
  EXPECT_EQ(std::set<Hyperedge>(edges.begin(), edges.end()).size(), 16u);
  for (const auto& e : edges) {
    EXPECT_TRUE(std::is_sorted(e.begin(), e.end()));
    EXPECT_EQ(std::adjacent_find(e.begin(), e.end()), e.end());
  }
}

TEST(RandomRegularUniform, ForcedSingleEdge) {
  HypergraphSpec spec{.p = 4, .k = 4, .d = 1};
  EXPECT_EQ(random_regular_uniform(spec), (std::vector<Hyperedge>{{1, 2, 3, 4}}));
}

TEST(RandomRegularUniform, SixNodeAudit) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    HypergraphSpec spec{.p = 6, .k = 3, .d = 2, .seed = seed};
    const auto edges = random_regular_uniform(spec);
    EXPECT_EQ(edges.size(), 4u);
    EXPECT_EQ(degrees(6, edges), std::vector<int>(6, 2));
  }
}

TEST(RandomRegularUniform, SeedsGiveDistinctGraphs) {
  std::set<std::vector<Hyperedge>> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    HypergraphSpec spec;
    spec.seed = seed;
    seen.insert(random_regular_uniform(spec));
  }
  EXPECT_GE(seen.size(), 99u);
}

TEST(RandomRegularUniform, InfeasibleSpecs) {
  auto kind_of = [](const HypergraphSpec& s) {
    try {
      random_regular_uniform(s);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of({.p = 5, .k = 3, .d = 2}), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of({.p = 3, .k = 4, .d = 1}), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of({.p = 4, .k = 3, .d = 4}), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of({.p = 9, .k = 3, .d = 29}), ErrorKind::InvalidArgument);
  // d = 28 asks for all C(9,3) triples, which a few random pairings will not hit.
  try {
    random_regular_uniform({.p = 9, .k = 3, .d = 28}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GenerationFailure);
  }
}

TEST(AssignCouplings, SignsAndMagnitudes) {
  HypergraphSpec spec;
  const auto edges = random_regular_uniform(spec);
  const auto J = assign_couplings(16, 3, edges, 1.0, SignMode::AllPositive, 0);
  for (const auto& [e, w] : J.entries()) EXPECT_EQ(w, 1.0);
  EXPECT_EQ(graph_stats(J).beta_max, 1.0);
  EXPECT_EQ(graph_stats(J).d_max, 3);

  const auto a = assign_couplings(16, 3, edges, 0.5, SignMode::Rademacher, 9);
  const auto b = assign_couplings(16, 3, edges, 0.5, SignMode::Rademacher, 9);
  EXPECT_TRUE(a == b);
  for (const auto& [e, w] : a.entries()) EXPECT_EQ(std::abs(w), 0.5);
  EXPECT_THROW(assign_couplings(16, 3, edges, 0.0, SignMode::AllPositive, 0), Error);
}

TEST(AssignCouplings, RademacherSignsAreBalanced) {
  std::vector<Hyperedge> edges;
  for (int a = 1; a <= 41 && edges.size() < 10000; ++a) {
    for (int b = a + 1; b <= 41 && edges.size() < 10000; ++b) {
      for (int c = b + 1; c <= 41 && edges.size() < 10000; ++c) edges.push_back({a, b, c});
    }
  }
  ASSERT_EQ(edges.size(), 10000u);
  const auto J = assign_couplings(41, 3, edges, 1.0, SignMode::Rademacher, 4);
  double mean = 0.0;
  for (const auto& [e, w] : J.entries()) mean += w / 1e4;
  EXPECT_LT(std::abs(mean), 3 / std::sqrt(1e4));
}

TEST(GenerateModel, CouplingScale) {
  HypergraphSpec spec;
  spec.beta = 1.5;
  EXPECT_EQ(spec.entry_magnitude(), 1.5);
  const auto literal = generate_model(spec);
  spec.coupling_scale = CouplingScale::Hyperedge;
  EXPECT_DOUBLE_EQ(spec.entry_magnitude(), 0.25);
  const auto per_edge = generate_model(spec);
  ASSERT_EQ(literal.edge_count(), per_edge.edge_count());
  for (const auto& [e, w] : literal.entries()) EXPECT_DOUBLE_EQ(per_edge.get(e), w / 6);
  EXPECT_EQ(parse_coupling_scale("hyperedge"), CouplingScale::Hyperedge);
  EXPECT_THROW(parse_coupling_scale("edge"), Error);
  EXPECT_THROW(parse_sign_mode("negative"), Error);
}
