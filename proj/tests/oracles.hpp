#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the graph container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "qcommit/graph.hpp"
#include "qcommit/rng.hpp"
#include "qcommit/strategy.hpp"

namespace oracle {

using qc::EdgeId;
using qc::WeightedGraph;

inline std::uint64_t bit(EdgeId e) { return std::uint64_t{1} << e; }

inline std::uint64_t mask_of_set(const qc::EdgeSet& s) { return s.words().empty() ? 0 : s.words()[0]; }

inline std::uint64_t full_mask(const WeightedGraph& g) { return g.e() == 64 ? ~0ULL : bit(g.e()) - 1; }

inline std::uint64_t closed_nbr(const WeightedGraph& g, EdgeId e) {
  std::uint64_t m = 0;
  for (EdgeId f = 0; f < g.e(); ++f) {
    const auto& a = g.edge(e);
    const auto& b = g.edge(f);
    if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v) m |= bit(f);
  }
  return m;
}

/// Maximum matching size of the edges in mask, by exhaustive branching.
inline int mu(const WeightedGraph& g, std::uint64_t mask) {
  if (!mask) return 0;
  const EdgeId e = std::countr_zero(mask);
  return std::max(mu(g, mask & ~bit(e)), 1 + mu(g, mask & ~closed_nbr(g, e)));
}

/// All matchings inside mask as bitmasks.
inline void all_matchings(const WeightedGraph& g, std::uint64_t mask, std::uint64_t cur, std::vector<std::uint64_t>& out) {
  if (!mask) {
    out.push_back(cur);
    return;
  }
  const EdgeId e = std::countr_zero(mask);
  all_matchings(g, mask & ~bit(e), cur, out);
  all_matchings(g, mask & ~closed_nbr(g, e), cur | bit(e), out);
}

/// Lexicographic preference: the matching containing the lowest index at
/// which the two differ wins.
inline bool lex_better(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t diff = a ^ b;
  if (!diff) return false;
  return (a >> std::countr_zero(diff)) & 1U;
}

inline std::uint64_t max_weight(const WeightedGraph& g, const std::vector<double>& w, std::uint64_t mask) {
  std::vector<std::uint64_t> ms;
  all_matchings(g, mask, 0, ms);
  std::uint64_t best = 0;
  double bw = -1;
  for (auto m : ms) {
    double s = 0;
    for (std::uint64_t x = m; x; x &= x - 1) s += w[static_cast<std::size_t>(std::countr_zero(x))];
    if (s > bw + 1e-12 || (std::abs(s - bw) <= 1e-12 && lex_better(m, best))) {
      bw = s;
      best = m;
    }
  }
  return best;
}

inline double scenario_probability(const WeightedGraph& g, std::uint64_t sigma) {
  double pr = 1;
  for (EdgeId e = 0; e < g.e(); ++e) pr *= (sigma & bit(e)) ? g.p(e) : 1.0 - g.p(e);
  return pr;
}

inline qc::Scenario scenario_of(const WeightedGraph& g, std::uint64_t sigma) {
  qc::Scenario s{g.no_edges()};
  for (EdgeId e = 0; e < g.e(); ++e)
    if (sigma & bit(e)) s.present.insert(e);
  return s;
}

/// E[mu(sigma)] by summing over all 2^e scenarios.
inline double expected_mu(const WeightedGraph& g) {
  double total = 0;
  for (std::uint64_t s = 0; s <= full_mask(g); ++s) total += scenario_probability(g, s) * mu(g, s);
  return total;
}

/// Expected matching size of a strategy by running it on every scenario.
inline double scenario_value(const WeightedGraph& g, qc::Strategy& s) {
  double total = 0;
  for (std::uint64_t sig = 0; sig <= full_mask(g); ++sig) {
    auto res = qc::run(g, s, scenario_of(g, sig));
    total += scenario_probability(g, sig) * static_cast<double>(res.matching.size());
  }
  return total;
}

/// Optimal adaptive value, plain recursion with a map memo.
inline double opt(const WeightedGraph& g, std::uint64_t mask, std::map<std::uint64_t, double>& memo) {
  if (!mask) return 0;
  if (auto it = memo.find(mask); it != memo.end()) return it->second;
  double best = 0;
  for (EdgeId e = 0; e < g.e(); ++e) {
    if (!(mask & bit(e))) continue;
    const double p = g.p(e);
    best = std::max(best, p * (1 + opt(g, mask & ~closed_nbr(g, e), memo)) + (1 - p) * opt(g, mask & ~bit(e), memo));
  }
  memo[mask] = best;
  return best;
}

inline double opt(const WeightedGraph& g) {
  std::map<std::uint64_t, double> memo;
  return opt(g, full_mask(g), memo);
}

// ---------------------------------------------------------------- generators

inline double uniform_open(qc::Rng& rng) {
  double u;
  do u = rng.uniform();
  while (u == 0.0);
  return u;
}

/// Simple graph on n nodes with m distinct random edges.
inline WeightedGraph random_graph(qc::Rng& rng, int n, int m) {
  std::vector<std::pair<int, int>> all;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) all.emplace_back(a, b);
  m = std::min<int>(m, static_cast<int>(all.size()));
  for (int i = 0; i < m; ++i) std::swap(all[static_cast<std::size_t>(i)], all[i + rng.below(all.size() - static_cast<std::size_t>(i))]);
  std::vector<qc::Edge> edges;
  for (int i = 0; i < m; ++i) edges.push_back({all[static_cast<std::size_t>(i)].first, all[static_cast<std::size_t>(i)].second, uniform_open(rng)});
  return WeightedGraph(n, edges);
}

/// Random tree on n nodes plus `extra` chords; connected with excess extra - 1.
inline WeightedGraph random_connected(qc::Rng& rng, int n, int extra) {
  std::vector<qc::Edge> edges;
  std::vector<std::vector<char>> has(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int v = 1; v < n; ++v) {
    int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
    edges.push_back({u, v, uniform_open(rng)});
    has[u][v] = has[v][u] = 1;
  }
  int tries = 0;
  while (extra > 0 && tries++ < 1000) {
    int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (a == b || has[a][b]) continue;
    has[a][b] = has[b][a] = 1;
    edges.push_back({std::min(a, b), std::max(a, b), uniform_open(rng)});
    --extra;
  }
  // shuffle edge order so index tie-breaks are not tied to the construction
  for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.below(i)]);
  return WeightedGraph(n, edges);
}

/// Random forest: each node after the first joins an earlier node or starts a new tree.
inline WeightedGraph random_forest(qc::Rng& rng, int n, int max_edges) {
  std::vector<qc::Edge> edges;
  for (int v = 1; v < n && static_cast<int>(edges.size()) < max_edges; ++v)
    if (rng.uniform() < 0.8) edges.push_back({static_cast<int>(rng.below(static_cast<std::uint64_t>(v))), v, uniform_open(rng)});
  for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.below(i)]);
  return WeightedGraph(n, edges);
}

inline WeightedGraph path_graph(const std::vector<double>& p) {
  std::vector<qc::Edge> edges;
  for (std::size_t i = 0; i < p.size(); ++i) edges.push_back({static_cast<int>(i), static_cast<int>(i + 1), p[i]});
  return WeightedGraph(static_cast<int>(p.size()) + 1, edges);
}

inline WeightedGraph cycle_graph(int n, double p) {
  std::vector<qc::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, p});
  return WeightedGraph(n, edges);
}

inline WeightedGraph complete_graph(int n, double p) {
  std::vector<qc::Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) edges.push_back({a, b, p});
  return WeightedGraph(n, edges);
}

/// K_{k,l}: left nodes 0..k-1, right nodes k..k+l-1.
inline WeightedGraph complete_bipartite(int k, int l, double p) {
  std::vector<qc::Edge> edges;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < l; ++b) edges.push_back({a, k + b, p});
  return WeightedGraph(k + l, edges);
}

}  // namespace oracle
