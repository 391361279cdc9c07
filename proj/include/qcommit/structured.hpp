#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcommit/labels.hpp"
#include "qcommit/strategy.hpp"

namespace qc {

namespace detail {

// Edges of E(u_k), then E(u_{k-1}), ..., E(u_1), each in ascending index,
// restricted to partners in V. Every U x V pair must be an edge.
inline std::vector<EdgeId> sequential_order(const WeightedGraph& g, const std::vector<NodeId>& U,
                                            const std::vector<NodeId>& V) {
  std::vector<EdgeId> order;
  for (auto it = U.rbegin(); it != U.rend(); ++it) {
    std::vector<EdgeId> block;
    for (NodeId v : V) {
      EdgeId e = g.find_edge(*it, v);
      if (e < 0)
        throw std::invalid_argument("bipartite subgraph is not complete: missing edge " + std::to_string(*it) + "-" +
                                    std::to_string(v));
      block.push_back(e);
    }
    std::sort(block.begin(), block.end());
    order.insert(order.end(), block.begin(), block.end());
  }
  return order;
}

inline void require_clique(const WeightedGraph& g, const std::vector<NodeId>& nodes) {
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (g.find_edge(nodes[a], nodes[b]) < 0)
        throw std::invalid_argument("graph is not complete: missing edge " + std::to_string(nodes[a]) + "-" +
                                    std::to_string(nodes[b]));
}

inline std::vector<NodeId> nonisolated_nodes(const WeightedGraph& g) {
  std::vector<NodeId> out;
  for (NodeId x = 0; x < g.node_count(); ++x)
    if (g.degree(x) > 0) out.push_back(x);
  return out;
}

// First floor(k/2) nodes against the next floor(k/2).
inline std::vector<EdgeId> clique_order(const WeightedGraph& g, const std::vector<NodeId>& nodes) {
  require_clique(g, nodes);
  const std::size_t h = nodes.size() / 2;
  std::vector<NodeId> U(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(h));
  std::vector<NodeId> V(nodes.begin() + static_cast<std::ptrdiff_t>(h), nodes.begin() + static_cast<std::ptrdiff_t>(2 * h));
  return sequential_order(g, U, V);
}

}  // namespace detail

/// Queries every surviving edge of u_k, then of u_{k-1}, down to u_1, where
/// `order` = (u_1, ..., u_k) is the class U of a complete bipartite graph.
/// With an empty `order`, U is the smaller class (ties: the class holding the
/// lowest node id), listed by ascending id.
inline StrategyPtr bipartite_sequential(const WeightedGraph& g, std::vector<NodeId> order = {}) {
  std::vector<int> side(static_cast<std::size_t>(g.node_count()), -1);
  const auto nodes = detail::nonisolated_nodes(g);
  if (order.empty()) {
    // two-colour from the lowest node
    if (!nodes.empty()) {
      std::vector<NodeId> stack{nodes.front()};
      side[static_cast<std::size_t>(nodes.front())] = 0;
      while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (EdgeId e : g.incident(x)) {
          NodeId y = g.other(e, x);
          if (side[static_cast<std::size_t>(y)] < 0) {
            side[static_cast<std::size_t>(y)] = 1 - side[static_cast<std::size_t>(x)];
            stack.push_back(y);
          } else if (side[static_cast<std::size_t>(y)] == side[static_cast<std::size_t>(x)]) {
            throw std::invalid_argument("graph is not bipartite");
          }
        }
      }
    }
    std::array<std::vector<NodeId>, 2> cls;
    for (NodeId x : nodes) {
      if (side[static_cast<std::size_t>(x)] < 0) throw std::invalid_argument("graph is not complete bipartite");
      cls[static_cast<std::size_t>(side[static_cast<std::size_t>(x)])].push_back(x);
    }
    order = cls[1].size() < cls[0].size() ? cls[1] : cls[0];
    std::fill(side.begin(), side.end(), -1);
  }
  for (NodeId u : order) {
    if (u < 0 || u >= g.node_count() || g.degree(u) == 0) throw std::invalid_argument("order names an isolated or unknown node");
    if (side[static_cast<std::size_t>(u)] == 0) throw std::invalid_argument("order repeats a node");
    side[static_cast<std::size_t>(u)] = 0;
  }
  std::vector<NodeId> V;
  for (NodeId x : nodes)
    if (side[static_cast<std::size_t>(x)] != 0) V.push_back(x);
  for (const Edge& e : g.edges())
    if ((side[static_cast<std::size_t>(e.u)] == 0) == (side[static_cast<std::size_t>(e.v)] == 0))
      throw std::invalid_argument("graph is not bipartite with the given class");
  return std::make_unique<StaticOrder>("bipartiteSeq", detail::sequential_order(g, order, V));
}

/// Complete graph on k nodes: bipartite_sequential on the first floor(k/2)
/// nodes (by id) against the next floor(k/2).
inline StrategyPtr clique_strategy(const WeightedGraph& g) {
  return std::make_unique<StaticOrder>("clique", detail::clique_order(g, detail::nonisolated_nodes(g)));
}

/// Splits a labelled instance into blood-type groups G_{i,j} and runs, in the
/// fixed type order O, A, B, AB: the bipartite strategy on G'_{i,j} x G'_{j,i}
/// for i < j (larger class trimmed to its lowest ids) and the clique strategy
/// on G_{i,i}. Edges inside G_{i,j} for i != j and edges between unrelated
/// groups are never queried.
inline StrategyPtr blood_type_decomposition(const Instance& inst) {
  const WeightedGraph& g = inst.graph;
  if (inst.labels.size() != static_cast<std::size_t>(g.node_count()))
    throw std::invalid_argument("bloodDecomp needs one blood-type label per node");
  std::array<std::array<std::vector<NodeId>, 4>, 4> groups;
  for (NodeId x : detail::nonisolated_nodes(g)) {
    const auto& l = inst.labels[static_cast<std::size_t>(x)];
    if (!l) throw std::invalid_argument("node " + std::to_string(x) + " has no blood-type label");
    groups[static_cast<std::size_t>(l->patient)][static_cast<std::size_t>(l->donor)].push_back(x);
  }
  std::vector<EdgeId> order;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i; j < 4; ++j) {
      std::vector<EdgeId> part;
      if (i == j) {
        part = detail::clique_order(g, groups[i][i]);
      } else {
        const auto& a = groups[i][j];
        const auto& b = groups[j][i];
        for (NodeId u : a)
          for (NodeId v : b)
            if (g.find_edge(u, v) < 0)
              throw std::invalid_argument("group pair is not complete bipartite: missing edge " + std::to_string(u) +
                                          "-" + std::to_string(v));
        const std::size_t t = std::min(a.size(), b.size());
        std::vector<NodeId> U(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(t));
        std::vector<NodeId> V(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(t));
        part = detail::sequential_order(g, U, V);
      }
      order.insert(order.end(), part.begin(), part.end());
    }
  }
  return std::make_unique<StaticOrder>("bloodDecomp", std::move(order));
}

}  // namespace qc
