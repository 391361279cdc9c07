#include <gtest/gtest.h>

#include "qcommit/io.hpp"
#include "qcommit/kidney.hpp"

using namespace qc;

namespace {

// Line number reported for a malformed document, or 0 if it parsed.
int error_line(const std::string& text) {
  try {
    parse_instance_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Io, ParsesWithCommentsAndLabels) {
  auto inst = parse_instance_text(
      "# three pairs\n"
      "qc-graph 1\n"
      "nodes 3\n\n"
      "edge 0 1 0.25   # first\n"
      "edge 2 1 1\n"
      "label 1 O/A\n");
  const auto& g = inst.graph;
  EXPECT_EQ(g.node_count(), 3);
  ASSERT_EQ(g.e(), 2);
  EXPECT_EQ(g.edge(0).p, 0.25);
  EXPECT_EQ(g.edge(1).u, 2);
  ASSERT_EQ(inst.labels.size(), 3u);
  EXPECT_FALSE(inst.labels[0]);
  EXPECT_EQ(to_string(*inst.labels[1]), "O/A");
}

TEST(Io, NoLabelsMeansEmptyLabelVector) {
  auto inst = parse_instance_text("qc-graph 1\nnodes 4\n");
  EXPECT_EQ(inst.graph.e(), 0);
  EXPECT_TRUE(inst.labels.empty());
}

TEST(Io, RejectsMalformedInputWithLineNumbers) {
  EXPECT_THROW(parse_instance_text(""), ParseError);
  EXPECT_EQ(error_line("graph 1\n"), 1);
  EXPECT_EQ(error_line("qc-graph 2\n"), 1);
  EXPECT_EQ(error_line("qc-graph 1\nedge 0 1 0.5\n"), 2);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 2\nnodes 2\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes -1\n"), 2);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 1 0.5\nedge 1 0 0.5\n"), 4);  // duplicate
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 1 1 0.5\n"), 3);                // self-loop
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 3 0.5\n"), 3);                // node >= n
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 1 0\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 1 1.5\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 1 nan\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 1 0.5x\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nedge 0 1\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nlabel 0 O-A\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nlabel 0 O/A\nlabel 0 A/O\n"), 4);
  EXPECT_EQ(error_line("qc-graph 1\nnodes 3\nvertex 0\n"), 3);
  EXPECT_EQ(error_line("qc-graph 1\n"), 1);  // missing nodes
  try {
    parse_instance_text("qc-graph 1\nnodes 3\nedge 0 1 2\n", "x.qc");
    FAIL() << "accepted p = 2";
  } catch (const ParseError& e) {
    EXPECT_STREQ(e.what(), "x.qc:3: probability 2 outside (0,1]");
  }
}

TEST(Io, RoundTripIsExact) {
  auto k = generate_instance(60, GeneratorConfig{}, 5);
  const std::string text = to_text(k.instance);
  auto back = parse_instance_text(text);
  ASSERT_EQ(back.graph.e(), k.instance.graph.e());
  for (EdgeId e = 0; e < back.graph.e(); ++e) EXPECT_EQ(back.graph.p(e), k.instance.graph.p(e));
  ASSERT_EQ(back.labels.size(), 60u);
  for (std::size_t x = 0; x < 60; ++x) EXPECT_EQ(*back.labels[x], *k.instance.labels[x]);
  EXPECT_EQ(to_text(back), text);
  EXPECT_THROW(load_instance("/nonexistent/graph.qc"), std::runtime_error);
}
