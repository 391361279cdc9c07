#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcommit/graph.hpp"

using namespace qc;

namespace {

WeightedGraph triangle(double p = 0.5) { return WeightedGraph(3, {{0, 1, p}, {1, 2, p}, {0, 2, p}}); }

std::vector<EdgeId> ids(const ResidualView& r) { return r.alive_edges().to_vector(); }

}  // namespace

TEST(WeightedGraph, RejectsBadInput) {
  EXPECT_THROW(WeightedGraph(2, {{0, 1, 0.0}}), std::invalid_argument);
  EXPECT_THROW(WeightedGraph(2, {{0, 1, 1.5}}), std::invalid_argument);
  EXPECT_THROW(WeightedGraph(2, {{0, 0, 0.5}}), std::invalid_argument);
  EXPECT_THROW(WeightedGraph(2, {{0, 2, 0.5}}), std::invalid_argument);
  EXPECT_THROW(WeightedGraph(2, {{0, 1, 0.5}, {1, 0, 0.3}}), std::invalid_argument);
  EXPECT_THROW(WeightedGraph(2, {{0, 1, std::nan("")}}), std::invalid_argument);
}

TEST(WeightedGraph, IsolatedIdsAreNotCounted) {
  WeightedGraph g(5, {{0, 1, 0.5}, {1, 2, 0.5}});
  EXPECT_EQ(g.v(), 3);
  EXPECT_EQ(g.e(), 2);
  EXPECT_EQ(sparsity_excess(g), -1);
}

TEST(Scenario, ProbabilityOneAlwaysPresent) {
  WeightedGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  Rng rng(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_scenario(g, rng).present, g.all_edges());
}

TEST(Scenario, MarginalsWithinFourSigma) {
  WeightedGraph g(4, {{0, 1, 0.5}, {1, 2, 0.1}, {2, 3, 0.9}});
  Rng rng(2024);
  const int k = 100000;
  std::vector<int> hits(3, 0);
  for (int i = 0; i < k; ++i) sample_scenario(g, rng).present.for_each([&](EdgeId e) { ++hits[e]; });
  for (EdgeId e = 0; e < 3; ++e) {
    double p = g.p(e);
    EXPECT_NEAR(hits[e] / double(k), p, 4 * std::sqrt(p * (1 - p) / k));
  }
  EXPECT_NEAR(hits[0] / double(k), 0.5, 0.01);
}

TEST(Scenario, DeterministicGivenSeed) {
  Rng a(99), b(99);
  auto g = oracle::complete_graph(6, 0.5);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_scenario(g, a).present, sample_scenario(g, b).present);
}

TEST(Residual, RemoveEdge) {
  WeightedGraph path(3, {{0, 1, 0.5}, {1, 2, 0.5}});
  EXPECT_EQ(ids(remove_edge(ResidualView(path), 0)), std::vector<EdgeId>{1});

  WeightedGraph single(2, {{0, 1, 0.5}});
  auto r = remove_edge(ResidualView(single), 0);
  EXPECT_TRUE(r.empty());
  EXPECT_EQ(r.v(), 0);

  auto t = remove_edge(ResidualView(triangle()), 1);
  EXPECT_EQ(ids(t), (std::vector<EdgeId>{0, 2}));
  EXPECT_EQ(t.v(), 3);
  EXPECT_THROW(remove_edge(t, 1), ContractViolation);
}

TEST(Residual, RemoveNeighborhood) {
  EXPECT_TRUE(remove_neighborhood(ResidualView(triangle()), 2).empty());
  WeightedGraph p3(4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}});
  EXPECT_TRUE(remove_neighborhood(ResidualView(p3), 1).empty());
  WeightedGraph star(4, {{0, 1, 0.5}, {0, 2, 0.5}, {0, 3, 0.5}});
  auto r = remove_neighborhood(ResidualView(star), 0);
  EXPECT_TRUE(r.empty());
  EXPECT_FALSE(r.node_alive(0));
  EXPECT_THROW(remove_neighborhood(r, 0), ContractViolation);
}

TEST(Residual, RemovalsCommuteAndNest) {
  Rng rng(5);
  for (int it = 0; it < 200; ++it) {
    auto g = oracle::random_graph(rng, 7, 10);
    ResidualView r(g);
    EdgeId a = static_cast<EdgeId>(rng.below(g.e()));
    EdgeId b = static_cast<EdgeId>(rng.below(g.e()));
    if (a != b) EXPECT_EQ(ids(r.without_edge(a).without_edge(b)), ids(r.without_edge(b).without_edge(a)));
    EXPECT_TRUE(r.without_neighborhood(a).alive_edges().is_subset_of(r.without_edge(a).alive_edges()));
  }
}

TEST(Residual, DegreesTrackRemovals) {
  Rng rng(11);
  for (int it = 0; it < 100; ++it) {
    auto g = oracle::random_graph(rng, 8, 14);
    ResidualView r(g);
    while (!r.empty()) {
      EdgeId e = r.alive_edges().to_vector()[rng.below(static_cast<std::uint64_t>(r.e()))];
      r = rng.bernoulli(0.5) ? r.without_edge(e) : r.without_neighborhood(e);
      ResidualView fresh(g, r.alive_edges());
      for (NodeId x = 0; x < g.node_count(); ++x) {
        ASSERT_EQ(r.degree(x), fresh.degree(x));
        ASSERT_EQ(r.weighted_degree_fixed(x), fresh.weighted_degree_fixed(x));
      }
      ASSERT_EQ(r.v(), fresh.v());
      auto pend = r.pendant_edges();
      ASSERT_EQ(r.lowest_pendant(), pend.empty() ? -1 : pend.front());
    }
  }
}

TEST(Structure, PendantEdges) {
  WeightedGraph p3(4, {{0, 1, 0.5}, {1, 2, 0.5}, {2, 3, 0.5}});
  EXPECT_EQ(pendant_edges(ResidualView(p3)), (std::vector<EdgeId>{0, 2}));
  EXPECT_TRUE(pendant_edges(ResidualView(oracle::cycle_graph(4, 0.5))).empty());
  WeightedGraph single(2, {{0, 1, 0.5}});
  EXPECT_EQ(pendant_edges(ResidualView(single)), std::vector<EdgeId>{0});
}

TEST(Structure, PendantFreeIffMinDegreeTwo) {
  Rng rng(3);
  for (int it = 0; it < 300; ++it) {
    auto g = oracle::random_graph(rng, 6, static_cast<int>(3 + rng.below(10)));
    ResidualView r(g);
    bool min2 = true;
    for (NodeId x : r.alive_nodes()) min2 = min2 && r.degree(x) >= 2;
    EXPECT_EQ(pendant_edges(r).empty(), min2);
  }
}

TEST(Structure, Components) {
  WeightedGraph two(4, {{0, 1, 0.5}, {2, 3, 0.5}});
  EXPECT_EQ(connected_components(ResidualView(two)).size(), 2u);
  EXPECT_EQ(connected_components(ResidualView(triangle())).size(), 1u);
  EXPECT_TRUE(connected_components(ResidualView(two).without_edge(0).without_edge(1)).empty());
}

TEST(Structure, SparsityExcess) {
  WeightedGraph tree(5, {{0, 1, 0.5}, {1, 2, 0.5}, {1, 3, 0.5}, {3, 4, 0.5}});
  EXPECT_EQ(sparsity_excess(tree), -1);
  EXPECT_EQ(sparsity_excess(oracle::cycle_graph(5, 0.5)), 0);
  EXPECT_EQ(sparsity_excess(oracle::complete_graph(4, 0.5)), 2);
  EXPECT_EQ(sparsity_excess(ResidualView(oracle::complete_graph(4, 0.5))), 2);
}

TEST(Rng, SubSeedsDiffer) {
  EXPECT_NE(sub_seed(1, {0, 0}), sub_seed(1, {0, 1}));
  EXPECT_NE(sub_seed(1, {0, 1}), sub_seed(1, {1, 0}));
  EXPECT_EQ(sub_seed(42, {3, 4}), sub_seed(42, {3, 4}));
}
