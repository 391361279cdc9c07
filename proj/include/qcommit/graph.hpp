#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcommit/edge_set.hpp"
#include "qcommit/rng.hpp"

namespace qc {

/// Raised when a caller breaks a documented precondition (e.g. removing an edge
/// that is not alive, or a strategy naming a dead edge).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double p = 1.0;
};

/// Immutable undirected graph whose edges carry existence probabilities in (0,1].
/// Edge indices are dense and stable; they double as bit positions in EdgeSet.
/// Node ids live in 0..node_count()-1; isolated ids are allowed in the id space
/// but never counted by v().
class WeightedGraph {
 public:
  WeightedGraph() = default;

  WeightedGraph(int node_count, std::vector<Edge> edges) : node_count_(node_count), edges_(std::move(edges)) {
    if (node_count < 0) throw std::invalid_argument("negative node count");
    std::vector<std::pair<NodeId, NodeId>> keys;
    keys.reserve(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      auto& e = edges_[i];
      if (e.u < 0 || e.v < 0 || e.u >= node_count || e.v >= node_count)
        throw std::invalid_argument("edge " + std::to_string(i) + " references a node outside 0.." +
                                    std::to_string(node_count - 1));
      if (e.u == e.v) throw std::invalid_argument("edge " + std::to_string(i) + " is a self-loop");
      if (!(e.p > 0.0) || e.p > 1.0 || !std::isfinite(e.p))
        throw std::invalid_argument("edge " + std::to_string(i) + " has probability outside (0,1]");
      keys.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
      throw std::invalid_argument("duplicate edge");

    offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[static_cast<std::size_t>(e.u) + 1];
      ++offsets_[static_cast<std::size_t>(e.v) + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incidence_.resize(edges_.size() * 2);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(edges_[i].u)]++)] = static_cast<EdgeId>(i);
      incidence_[static_cast<std::size_t>(fill[static_cast<std::size_t>(edges_[i].v)]++)] = static_cast<EdgeId>(i);
    }
    for (NodeId x = 0; x < node_count; ++x)
      if (degree(x) > 0) ++nonisolated_;
  }

  int node_count() const noexcept { return node_count_; }
  /// Number of non-isolated nodes.
  int v() const noexcept { return nonisolated_; }
  int e() const noexcept { return static_cast<int>(edges_.size()); }

  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  double p(EdgeId e) const { return edge(e).p; }

  std::span<const EdgeId> incident(NodeId x) const {
    auto b = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(x)]);
    auto n = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(x) + 1]) - b;
    return std::span<const EdgeId>(incidence_).subspan(b, n);
  }
  int degree(NodeId x) const { return offsets_[static_cast<std::size_t>(x) + 1] - offsets_[static_cast<std::size_t>(x)]; }

  NodeId other(EdgeId e, NodeId x) const {
    const auto& ed = edge(e);
    return ed.u == x ? ed.v : ed.u;
  }
  bool touches(EdgeId e, NodeId x) const { return edge(e).u == x || edge(e).v == x; }
  bool share_endpoint(EdgeId a, EdgeId b) const {
    const auto& ea = edge(a);
    return touches(b, ea.u) || touches(b, ea.v);
  }

  EdgeId find_edge(NodeId a, NodeId b) const {
    if (a < 0 || b < 0 || a >= node_count_ || b >= node_count_) return -1;
    for (EdgeId e : incident(a))
      if (other(e, a) == b) return e;
    return -1;
  }

  EdgeSet all_edges() const { return EdgeSet(edges_.size(), true); }
  EdgeSet no_edges() const { return EdgeSet(edges_.size(), false); }

 private:
  int node_count_ = 0;
  int nonisolated_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<EdgeId> incidence_;
};

/// One realization: the set of edges that exist.
struct Scenario {
  EdgeSet present;
  bool contains(EdgeId e) const { return present.contains(e); }
};

/// Includes each edge independently with its probability, in edge-index order.
inline Scenario sample_scenario(const WeightedGraph& g, Rng& rng) {
  Scenario s{g.no_edges()};
  for (EdgeId e = 0; e < g.e(); ++e)
    if (rng.bernoulli(g.p(e))) s.present.insert(e);
  return s;
}

struct Matching {
  std::vector<EdgeId> edges;  // ascending

  std::size_t size() const noexcept { return edges.size(); }
  bool contains(EdgeId e) const { return std::binary_search(edges.begin(), edges.end(), e); }
  friend bool operator==(const Matching&, const Matching&) = default;
};

inline bool is_valid_matching(const WeightedGraph& g, const Matching& m) {
  std::vector<char> used(static_cast<std::size_t>(g.node_count()), 0);
  for (EdgeId e : m.edges) {
    if (e < 0 || e >= g.e()) return false;
    auto& ed = g.edge(e);
    if (used[static_cast<std::size_t>(ed.u)] || used[static_cast<std::size_t>(ed.v)]) return false;
    used[static_cast<std::size_t>(ed.u)] = used[static_cast<std::size_t>(ed.v)] = 1;
  }
  return std::is_sorted(m.edges.begin(), m.edges.end());
}

/// Residual graph: a set of alive edges over a shared base graph. Nodes are
/// alive iff they have an alive incident edge. Copies are independent values;
/// the base graph must outlive every view onto it.
class ResidualView {
 public:
  ResidualView() = default;

  explicit ResidualView(const WeightedGraph& g) : ResidualView(g, g.all_edges()) {}

  ResidualView(const WeightedGraph& g, EdgeSet alive) : g_(&g), alive_(std::move(alive)) {
    const auto n = static_cast<std::size_t>(g.node_count());
    degree_.assign(n, 0);
    xor_edges_.assign(n, 0);
    wdeg_.assign(n, 0);
    alive_.for_each([&](EdgeId e) { attach(e); });
  }

  const WeightedGraph& base() const noexcept { return *g_; }
  const EdgeSet& alive_edges() const noexcept { return alive_; }

  bool alive(EdgeId e) const { return alive_.contains(e); }
  bool node_alive(NodeId x) const { return degree_[static_cast<std::size_t>(x)] > 0; }
  int degree(NodeId x) const { return degree_[static_cast<std::size_t>(x)]; }
  /// Sum of probabilities of alive incident edges, in units of 2^-40.
  std::int64_t weighted_degree_fixed(NodeId x) const { return wdeg_[static_cast<std::size_t>(x)]; }
  double weighted_degree(NodeId x) const { return static_cast<double>(weighted_degree_fixed(x)) * 0x1.0p-40; }

  int e() const noexcept { return edge_count_; }
  int v() const noexcept { return node_count_; }
  bool empty() const noexcept { return edge_count_ == 0; }

  std::vector<NodeId> alive_nodes() const {
    std::vector<NodeId> out;
    for (NodeId x = 0; x < static_cast<NodeId>(degree_.size()); ++x)
      if (degree_[static_cast<std::size_t>(x)] > 0) out.push_back(x);
    return out;
  }

  /// The single alive edge at a degree-1 node.
  EdgeId sole_edge(NodeId x) const { return xor_edges_[static_cast<std::size_t>(x)]; }

  // In-place updates used by the simulation engine.
  void erase_edge(EdgeId e) {
    require_alive(e);
    detach(e);
  }
  void erase_neighborhood(EdgeId e) {
    require_alive(e);
    const auto& ed = g_->edge(e);
    for (NodeId x : {ed.u, ed.v})
      for (EdgeId f : g_->incident(x))
        if (alive_.contains(f)) detach(f);
  }

  ResidualView without_edge(EdgeId e) const {
    ResidualView r = *this;
    r.erase_edge(e);
    return r;
  }
  ResidualView without_neighborhood(EdgeId e) const {
    ResidualView r = *this;
    r.erase_neighborhood(e);
    return r;
  }

  /// Alive edges with an endpoint of degree 1, ascending.
  std::vector<EdgeId> pendant_edges() const {
    std::vector<EdgeId> out;
    alive_.for_each([&](EdgeId e) {
      const auto& ed = g_->edge(e);
      if (degree(ed.u) == 1 || degree(ed.v) == 1) out.push_back(e);
    });
    return out;
  }

  /// Lowest-index pendant edge, or -1. O(node_count).
  EdgeId lowest_pendant() const {
    EdgeId best = -1;
    for (std::size_t x = 0; x < degree_.size(); ++x)
      if (degree_[x] == 1 && (best < 0 || xor_edges_[x] < best)) best = xor_edges_[x];
    return best;
  }

  /// Partition of the alive edges into connected pieces, ordered by lowest edge.
  std::vector<EdgeSet> connected_components() const {
    std::vector<EdgeSet> out;
    EdgeSet seen = g_->no_edges();
    std::vector<NodeId> stack;
    alive_.for_each([&](EdgeId start) {
      if (seen.contains(start)) return;
      EdgeSet comp = g_->no_edges();
      seen.insert(start);
      comp.insert(start);
      stack = {g_->edge(start).u, g_->edge(start).v};
      while (!stack.empty()) {
        NodeId x = stack.back();
        stack.pop_back();
        for (EdgeId f : g_->incident(x)) {
          if (!alive_.contains(f) || seen.contains(f)) continue;
          seen.insert(f);
          comp.insert(f);
          stack.push_back(g_->other(f, x));
        }
      }
      out.push_back(std::move(comp));
    });
    return out;
  }

  /// e - v of the alive subgraph.
  int sparsity_excess() const noexcept { return edge_count_ - node_count_; }

  /// Restriction to a subset of the alive edges.
  ResidualView restricted_to(const EdgeSet& edges) const { return ResidualView(*g_, alive_ & edges); }

 private:
  void require_alive(EdgeId e) const {
    if (e < 0 || e >= g_->e() || !alive_.contains(e))
      throw ContractViolation("edge " + std::to_string(e) + " is not alive in the residual graph");
  }

  static std::int64_t fixed(double p) { return std::llround(std::ldexp(p, 40)); }

  void attach(EdgeId e) {
    const auto& ed = g_->edge(e);
    for (NodeId x : {ed.u, ed.v}) {
      auto i = static_cast<std::size_t>(x);
      if (degree_[i]++ == 0) ++node_count_;
      xor_edges_[i] ^= e;
      wdeg_[i] += fixed(ed.p);
    }
    ++edge_count_;
  }

  void detach(EdgeId e) {
    alive_.erase(e);
    const auto& ed = g_->edge(e);
    for (NodeId x : {ed.u, ed.v}) {
      auto i = static_cast<std::size_t>(x);
      if (--degree_[i] == 0) --node_count_;
      xor_edges_[i] ^= e;
      wdeg_[i] -= fixed(ed.p);
    }
    --edge_count_;
  }

  const WeightedGraph* g_ = nullptr;
  EdgeSet alive_;
  std::vector<int> degree_;
  std::vector<EdgeId> xor_edges_;
  std::vector<std::int64_t> wdeg_;
  int edge_count_ = 0;
  int node_count_ = 0;
};

inline std::vector<EdgeId> pendant_edges(const ResidualView& r) { return r.pendant_edges(); }
inline std::vector<EdgeSet> connected_components(const ResidualView& r) { return r.connected_components(); }
inline int sparsity_excess(const ResidualView& r) { return r.sparsity_excess(); }
inline int sparsity_excess(const WeightedGraph& g) { return g.e() - g.v(); }
inline ResidualView remove_edge(const ResidualView& r, EdgeId e) { return r.without_edge(e); }
inline ResidualView remove_neighborhood(const ResidualView& r, EdgeId e) { return r.without_neighborhood(e); }

}  // namespace qc
