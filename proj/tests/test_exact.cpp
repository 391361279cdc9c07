#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "qcommit/decision_tree.hpp"
#include "qcommit/heuristics.hpp"

using namespace qc;

TEST(Tree, LeafAndSingleQuery) {
  WeightedGraph g(2, {{0, 1, 0.25}});
  EXPECT_EQ(evaluate_tree(nullptr, g), 0.0);
  EXPECT_DOUBLE_EQ(evaluate_tree(make_tree(0, nullptr, nullptr), g), 0.25);
}

TEST(Tree, RejectsDeadQuery) {
  auto g = oracle::path_graph({0.5, 0.5});
  // e1 is dead after e0 succeeds
  auto t = make_tree(0, make_tree(1, nullptr, nullptr), nullptr);
  EXPECT_THROW(evaluate_tree(t, g), std::invalid_argument);
  EXPECT_THROW(evaluate_tree(make_tree(5, nullptr, nullptr), g), std::invalid_argument);
}

TEST(Tree, PathOfTwo) {
  // query e0 then e1 on failure: p0 + (1 - p0) p1
  auto g = oracle::path_graph({0.3, 0.6});
  auto t = make_tree(0, nullptr, make_tree(1, nullptr, nullptr));
  EXPECT_DOUBLE_EQ(evaluate_tree(t, g), 0.3 + 0.7 * 0.6);
  EXPECT_EQ(tree_size(t), 2u);
  EXPECT_EQ(tree_height(t), 2u);
}

TEST(Tree, DumpFormat) {
  auto g = oracle::path_graph({0.5, 0.25});
  std::ostringstream os;
  dump_tree(os, make_tree(0, nullptr, make_tree(1, nullptr, nullptr)), g);
  EXPECT_EQ(os.str(),
            "query 0-1 p=0.5\n"
            "  yes: stop\n"
            "  no: query 1-2 p=0.25\n"
            "    yes: stop\n"
            "    no: stop\n");
}

TEST(Opt, KnownValues) {
  WeightedGraph one(2, {{0, 1, 0.4}});
  EXPECT_DOUBLE_EQ(opt_value(one), 0.4);
  // triangle: any order matches one edge iff some edge exists
  WeightedGraph tri(3, {{0, 1, 0.9}, {1, 2, 0.5}, {0, 2, 0.1}});
  EXPECT_NEAR(opt_value(tri), 0.955, 1e-15);
  // three-edge path: cross-check with the test recursion
  auto p3 = oracle::path_graph({0.5, 0.5, 0.5});
  EXPECT_NEAR(opt_value(p3), oracle::opt(p3), 1e-15);
  // all-certain graphs reach the maximum matching
  auto k5 = oracle::complete_graph(5, 1.0);
  EXPECT_DOUBLE_EQ(opt_value(k5), 2.0);
}

TEST(Opt, AgreesWithIndependentRecursion) {
  Rng rng(101);
  for (int it = 0; it < 300; ++it) {
    auto g = oracle::random_graph(rng, 3 + static_cast<int>(rng.below(5)), 1 + static_cast<int>(rng.below(9)));
    ASSERT_NEAR(opt_value(g), oracle::opt(g), 1e-12);
  }
}

TEST(Opt, TreeAndPolicyAchieveValue) {
  Rng rng(102);
  for (int it = 0; it < 100; ++it) {
    auto g = oracle::random_graph(rng, 6, 1 + static_cast<int>(rng.below(8)));
    OptOracle o(g);
    auto t = o.tree(o.full_mask());
    ASSERT_NEAR(evaluate_tree(t, g), o.value(), 1e-12);
    auto pol = opt_policy(g);
    ASSERT_NEAR(evaluate_strategy(g, *pol), o.value(), 1e-12);
    ASSERT_NEAR(oracle::scenario_value(g, *pol), o.value(), 1e-12);
  }
}

TEST(Opt, SandwichedBetweenHeuristicsAndExpectedMaximum) {
  Rng rng(103);
  for (int it = 0; it < 60; ++it) {
    auto g = oracle::random_graph(rng, 7, 1 + static_cast<int>(rng.below(9)));
    const double o = opt_value(g);
    ASSERT_LE(o, oracle::expected_mu(g) + 1e-12);
    for (const auto& n : heuristic_names()) ASSERT_LE(evaluate_strategy(g, *heuristic(n)), o + 1e-12) << n;
  }
}

TEST(Opt, CapEnforced) {
  auto g = oracle::complete_graph(7, 0.5);  // 21 edges
  EXPECT_THROW(opt_value(g), std::invalid_argument);
  EXPECT_NO_THROW(opt_value(oracle::complete_graph(5, 0.5), OptOptions{10, 1 << 20}));
  EXPECT_THROW(opt_value(oracle::complete_graph(5, 0.5), OptOptions{18, 5}), std::runtime_error);
}

TEST(Evaluate, StrategyAndInducedTreeAgree) {
  Rng rng(104);
  for (int it = 0; it < 50; ++it) {
    auto g = oracle::random_graph(rng, 8, 10);
    for (const auto& n : heuristic_names()) {
      auto s = heuristic(n);
      ASSERT_NEAR(evaluate_tree(induced_tree(g, *s), g), evaluate_strategy(g, *s), 1e-12) << n;
    }
  }
}

TEST(Evaluate, FromResidual) {
  auto g = oracle::path_graph({0.5, 0.5, 0.5});
  ResidualView r = ResidualView(g).without_edge(1);
  // two isolated edges remain
  EXPECT_DOUBLE_EQ(evaluate_strategy(r, *max_prob()), 1.0);
}
