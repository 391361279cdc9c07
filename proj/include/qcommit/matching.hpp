#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "qcommit/detail/weighted_blossom.hpp"
#include "qcommit/graph.hpp"

namespace qc {

namespace detail {

// Alive nodes renumbered 0..k-1, alive edges listed by increasing index.
struct CompactView {
  std::vector<int> local;  // node id -> local id or -1
  std::vector<NodeId> global;
  std::vector<EdgeId> edges;

  CompactView() = default;
  explicit CompactView(const ResidualView& r) { rebuild(r); }

  void rebuild(const ResidualView& r) {
    const auto& g = r.base();
    local.assign(static_cast<std::size_t>(g.node_count()), -1);
    global.clear();
    edges.clear();
    r.alive_edges().for_each([&](EdgeId e) {
      edges.push_back(e);
      for (NodeId x : {g.edge(e).u, g.edge(e).v}) {
        if (local[static_cast<std::size_t>(x)] < 0) {
          local[static_cast<std::size_t>(x)] = static_cast<int>(global.size());
          global.push_back(x);
        }
      }
    });
  }
  int n() const { return static_cast<int>(global.size()); }
};

// Edmonds' blossom algorithm for maximum cardinality, O(n^3).
class CardinalityBlossom {
 public:
  explicit CardinalityBlossom(int n) : n_(n), adj_(static_cast<std::size_t>(n)) {}

  void add_edge(int a, int b) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }

  std::vector<int> solve() {
    match_.assign(n_, -1);
    // Greedy start; augmenting paths fix the rest.
    for (int v = 0; v < n_; ++v) {
      if (match_[v] != -1) continue;
      for (int w : adj_[v]) {
        if (match_[w] == -1) {
          match_[v] = w;
          match_[w] = v;
          break;
        }
      }
    }
    for (int v = 0; v < n_; ++v) {
      if (match_[v] != -1) continue;
      int end = find_path(v);
      while (end != -1) {
        int pv = parent_[end];
        int ppv = match_[pv];
        match_[end] = pv;
        match_[pv] = end;
        end = ppv;
      }
    }
    return match_;
  }

 private:
  int lca(int a, int b) {
    std::vector<char> used(static_cast<std::size_t>(n_), 0);
    while (true) {
      a = base_[a];
      used[a] = 1;
      if (match_[a] == -1) break;
      a = parent_[match_[a]];
    }
    while (true) {
      b = base_[b];
      if (used[b]) return b;
      b = parent_[match_[b]];
    }
  }

  void mark_path(int v, int b, int child) {
    while (base_[v] != b) {
      blossom_[base_[v]] = blossom_[base_[match_[v]]] = 1;
      parent_[v] = child;
      child = match_[v];
      v = parent_[match_[v]];
    }
  }

  int find_path(int root) {
    used_.assign(n_, 0);
    parent_.assign(n_, -1);
    base_.resize(n_);
    std::iota(base_.begin(), base_.end(), 0);
    used_[root] = 1;
    std::vector<int> q{root};
    for (std::size_t qh = 0; qh < q.size(); ++qh) {
      int v = q[qh];
      for (int to : adj_[v]) {
        if (base_[v] == base_[to] || match_[v] == to) continue;
        if (to == root || (match_[to] != -1 && parent_[match_[to]] != -1)) {
          int curbase = lca(v, to);
          blossom_.assign(n_, 0);
          mark_path(v, curbase, to);
          mark_path(to, curbase, v);
          for (int i = 0; i < n_; ++i) {
            if (blossom_[base_[i]]) {
              base_[i] = curbase;
              if (!used_[i]) {
                used_[i] = 1;
                q.push_back(i);
              }
            }
          }
        } else if (parent_[to] == -1) {
          parent_[to] = v;
          if (match_[to] == -1) return to;
          used_[match_[to]] = 1;
          q.push_back(match_[to]);
        }
      }
    }
    return -1;
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> match_, parent_, base_;
  std::vector<char> used_, blossom_;
};

inline Matching collect(const CompactView& cv, const WeightedGraph& g, const std::vector<int>& mate) {
  Matching m;
  for (EdgeId e : cv.edges) {
    int a = cv.local[static_cast<std::size_t>(g.edge(e).u)];
    int b = cv.local[static_cast<std::size_t>(g.edge(e).v)];
    if (mate[a] == b) m.edges.push_back(e);
  }
  return m;
}

}  // namespace detail

/// Maximum-cardinality matching of the alive subgraph.
inline Matching max_cardinality_matching(const ResidualView& r) {
  detail::CompactView cv(r);
  const auto& g = r.base();
  detail::CardinalityBlossom solver(cv.n());
  for (EdgeId e : cv.edges)
    solver.add_edge(cv.local[static_cast<std::size_t>(g.edge(e).u)], cv.local[static_cast<std::size_t>(g.edge(e).v)]);
  return detail::collect(cv, g, solver.solve());
}

inline Matching max_cardinality_matching(const WeightedGraph& g) { return max_cardinality_matching(ResidualView(g)); }

namespace detail {

// Warm-started blossom on one graph with fixed integer weights.
template <class W>
class WarmMatcher {
 public:
  WarmMatcher(const WeightedGraph& g, const std::vector<W>& comp) : g_(&g) {
    std::vector<WeightedEdge<W>> edges;
    edges.reserve(comp.size());
    for (EdgeId e = 0; e < g.e(); ++e) edges.push_back({g.edge(e).u, g.edge(e).v, comp[static_cast<std::size_t>(e)]});
    solver_.load(g.node_count(), std::move(edges));
  }

  Matching solve(const ResidualView& r) {
    const auto& alive = r.alive_edges();
    // saved duals stay feasible only on subgraphs of the last solve
    const bool warm = warm_ && alive.is_subset_of(last_);
    const auto& now = alive.words();
    const auto& before = last_.words();
    for (std::size_t i = 0; i < now.size(); ++i) {
      std::uint64_t flip = warm_ ? now[i] ^ before[i] : ~std::uint64_t{0};
      for (; flip; flip &= flip - 1) {
        const auto e = static_cast<int>(i * 64 + static_cast<std::size_t>(std::countr_zero(flip)));
        if (e < g_->e()) solver_.set_alive(e, (now[i] >> (e & 63)) & 1);
      }
    }
    last_ = alive;
    const auto& mate = solver_.solve_alive(warm);
    warm_ = true;
    Matching m;
    for (std::size_t v = 0; v < mate.size(); ++v) {
      const int p = mate[v];
      // report each edge once, from its first endpoint
      if (p >= 0 && (p & 1)) m.edges.push_back(p >> 1);
    }
    std::sort(m.edges.begin(), m.edges.end());
    return m;
  }

  void forget() { warm_ = false; }

 private:
  const WeightedGraph* g_;
  WeightedBlossom<W> solver_;
  bool warm_ = false;
  EdgeSet last_;
};

}  // namespace detail


/// Maximum-weight matching that can be re-solved cheaply on shrinking
/// residual graphs. Each solve keeps its matching and dual values; the next
/// solve on a subgraph starts from them, so only the vertices exposed by the
/// removals need new augmenting work. `w` is indexed by edge id.
///
/// Weights are quantized to 30 bits relative to the largest entry of w
/// (a power-of-two scale, so small integer weights are exact).
/// Among matchings of equal quantized weight the one whose edge set is
/// lexicographically first wins: compare characteristic vectors by increasing
/// edge index, the matching that contains the first differing edge is
/// preferred. This is exact when the graph has at most 62 edges; above that a
/// cheaper perturbation (sum of e() - index) is used that is deterministic but
/// only favours low indices.
class IncrementalWeightedMatching {
 public:
  IncrementalWeightedMatching(const WeightedGraph& g, std::span<const double> w) : g_(&g), impl_(make(g, w)) {}

  Matching solve(const ResidualView& r) {
    if (&r.base() != g_) throw std::invalid_argument("residual view belongs to another graph");
    return std::visit([&](auto& m) { return m.solve(r); }, impl_);
  }

  /// Drops the saved state; the next solve starts cold.
  void forget() {
    std::visit([](auto& m) { m.forget(); }, impl_);
  }

 private:
  using Impl = std::variant<detail::WarmMatcher<std::int64_t>, detail::WarmMatcher<__int128>>;

  static Impl make(const WeightedGraph& g, std::span<const double> w) {
    using W = __int128;
    if (w.size() != static_cast<std::size_t>(g.e())) throw std::invalid_argument("weight vector size differs from edge count");
    // Scaling depends only on the full weight vector, never on the alive set,
    // so the induced order on matchings is the same for every residual view.
    double wmax = 0;
    for (double x : w) {
      if (!std::isfinite(x) || x < 0) throw std::invalid_argument("edge weights must be finite and nonnegative");
      wmax = std::max(wmax, x);
    }
    // power-of-two scale keeps small integers and dyadic weights exact, so
    // exact ties between sums survive quantization
    double scale = 0;
    if (wmax > 0) {
      int ex;
      std::frexp(wmax, &ex);  // wmax < 2^ex
      scale = std::ldexp(1.0, 30 - ex);
    }
    const int E = g.e();
    std::vector<W> comp(static_cast<std::size_t>(E));
    // bonus sum over any matching is at most (n/2)*E < K
    const W K = static_cast<W>(g.node_count() / 2) * E + 1;
    W top = 0;
    for (EdgeId e = 0; e < E; ++e) {
      const W q = static_cast<W>(std::llround(w[static_cast<std::size_t>(e)] * scale));
      comp[static_cast<std::size_t>(e)] = E <= 62 ? (q << E) | (W{1} << (E - 1 - e)) : q * K + (E - e);
      top = std::max(top, comp[static_cast<std::size_t>(e)]);
    }
    // blossom intermediates stay below 4 * max weight
    if (top < (W{1} << 58)) return Impl(std::in_place_index<0>, g, std::vector<std::int64_t>(comp.begin(), comp.end()));
    return Impl(std::in_place_index<1>, g, comp);
  }

  const WeightedGraph* g_;
  // 64-bit arithmetic whenever every dual and slack provably fits
  Impl impl_;
};

/// Maximum-weight matching of the alive subgraph, solved from scratch. Same
/// weights and tie-break as IncrementalWeightedMatching.
inline Matching max_weight_matching(const ResidualView& r, std::span<const double> w) {
  return IncrementalWeightedMatching(r.base(), w).solve(r);
}

inline Matching max_weight_matching(const WeightedGraph& g, std::span<const double> w) {
  return max_weight_matching(ResidualView(g), w);
}

/// True iff no edge of the scenario has both endpoints uncovered by m.
inline bool is_maximal_in(const Matching& m, const Scenario& s, const WeightedGraph& g) {
  std::vector<char> covered(static_cast<std::size_t>(g.node_count()), 0);
  for (EdgeId e : m.edges) covered[g.edge(e).u] = covered[g.edge(e).v] = 1;
  bool maximal = true;
  s.present.for_each([&](EdgeId e) {
    if (!covered[g.edge(e).u] && !covered[g.edge(e).v]) maximal = false;
  });
  return maximal;
}

}  // namespace qc
