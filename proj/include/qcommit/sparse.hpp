#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qcommit/decision_tree.hpp"
#include "qcommit/strategy.hpp"

namespace qc {

/// A component of G \ V>=3, written u_1 e_1 u_2 ... e_q u_{q+1}. Oriented so
/// that u_1 is the endpoint with the smaller node id. q may be 0.
struct PathInfo {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;

  int q() const { return static_cast<int>(edges.size()); }
  NodeId first() const { return nodes.front(); }
  NodeId last() const { return nodes.back(); }
};

/// Sweep S(H, e_j): e_j, e_{j-1}, ..., e_1, then e_{j+1}, ..., e_q.
inline std::vector<EdgeId> sweep_order(const PathInfo& path, int j) {
  std::vector<EdgeId> out;
  for (int a = j; a >= 1; --a) out.push_back(path.edges[static_cast<std::size_t>(a - 1)]);
  for (int a = j + 1; a <= path.q(); ++a) out.push_back(path.edges[static_cast<std::size_t>(a - 1)]);
  return out;
}

struct PathDPResult {
  double expected_size = 0;
  double pr_u1 = 0;
  double pr_uq1 = 0;
  double pr_both = 0;
  // Joint laws of (u_1 matched, u_{q+1} matched), computed without
  // subtraction so impossible outcomes come out as exact zeros.
  double pr_u1_only = 0;
  double pr_uq1_only = 0;
  double pr_neither = 0;
};

/// Sweep statistics on a path with edge probabilities p[0..q-1] (0 for an
/// absent edge) probed at position j (1-based).
///
/// Left of the probe the sweep runs e_a, e_{a-1}, ..., e_1 on the prefix
/// e_1..e_a; with F(a) its expected size and G(a) = Pr(u_1 matched),
///   F(a) = p_a (1 + F(a-2)) + (1 - p_a) F(a-1),
///   G(a) = p_a G(a-2) + (1 - p_a) G(a-1),  G(1) = p_1,
/// F, G vanishing at 0 and -1. The right side is the mirror image. Given
/// the outcome of e_j the two sides are independent.
inline PathDPResult path_dp(const std::vector<double>& p, int j) {
  const int q = static_cast<int>(p.size());
  if (j < 1 || j > q) throw std::invalid_argument("probe position outside the path");
  auto P = [&](int a) { return p[static_cast<std::size_t>(a - 1)]; };

  // index shift by 1 so F[a+1] holds F(a), a >= -1
  std::vector<double> F(static_cast<std::size_t>(q) + 2, 0.0), G(F.size(), 0.0);
  for (int a = 1; a <= q; ++a) {
    const double pa = P(a);
    F[static_cast<std::size_t>(a + 1)] = pa * (1.0 + F[static_cast<std::size_t>(a - 1)]) + (1.0 - pa) * F[static_cast<std::size_t>(a)];
    G[static_cast<std::size_t>(a + 1)] =
        a == 1 ? pa : pa * G[static_cast<std::size_t>(a - 1)] + (1.0 - pa) * G[static_cast<std::size_t>(a)];
  }
  // Fr[b] = right sweep from e_b on e_b..e_q, defined for b <= q+2
  std::vector<double> Fr(static_cast<std::size_t>(q) + 3, 0.0), Gr(Fr.size(), 0.0);
  for (int b = q; b >= 1; --b) {
    const double pb = P(b);
    Fr[static_cast<std::size_t>(b)] = pb * (1.0 + Fr[static_cast<std::size_t>(b + 2)]) + (1.0 - pb) * Fr[static_cast<std::size_t>(b + 1)];
    Gr[static_cast<std::size_t>(b)] =
        b == q ? pb : pb * Gr[static_cast<std::size_t>(b + 2)] + (1.0 - pb) * Gr[static_cast<std::size_t>(b + 1)];
  }
  auto f = [&](int a) { return a < 1 ? 0.0 : F[static_cast<std::size_t>(a + 1)]; };
  auto g = [&](int a) { return a < 1 ? 0.0 : G[static_cast<std::size_t>(a + 1)]; };
  auto fr = [&](int b) { return b > q ? 0.0 : Fr[static_cast<std::size_t>(b)]; };
  auto gr = [&](int b) { return b > q ? 0.0 : Gr[static_cast<std::size_t>(b)]; };

  const double pj = P(j);
  // success of e_j kills e_{j-1} and e_{j+1}
  const double l_yes = j == 1 ? 1.0 : g(j - 2);
  const double r_yes = j == q ? 1.0 : gr(j + 2);
  const double l_no = g(j - 1);
  const double r_no = gr(j + 1);

  PathDPResult out;
  out.expected_size = pj * (1.0 + f(j - 2) + fr(j + 2)) + (1.0 - pj) * (f(j - 1) + fr(j + 1));
  out.pr_u1 = pj * l_yes + (1.0 - pj) * l_no;
  out.pr_uq1 = pj * r_yes + (1.0 - pj) * r_no;
  out.pr_both = pj * l_yes * r_yes + (1.0 - pj) * l_no * r_no;
  out.pr_u1_only = pj * l_yes * (1.0 - r_yes) + (1.0 - pj) * l_no * (1.0 - r_no);
  out.pr_uq1_only = pj * (1.0 - l_yes) * r_yes + (1.0 - pj) * (1.0 - l_no) * r_no;
  out.pr_neither = pj * (1.0 - l_yes) * (1.0 - r_yes) + (1.0 - pj) * (1.0 - l_no) * (1.0 - r_no);
  return out;
}

/// Vertex set V>=3, the paths of G \ V>=3 and the edges touching V>=3, for a
/// connected pendant-free graph. A graph with no node of degree >= 3 is a
/// single cycle; it is flagged and carries no paths.
class SparseDecomposition {
 public:
  SparseDecomposition(const ResidualView& r, int d) : g_(&r.base()), edges_(r.alive_edges()), d_(d) {
    const WeightedGraph& g = *g_;
    if (r.empty()) throw std::invalid_argument("decompose needs a nonempty graph");
    if (r.lowest_pendant() >= 0) throw std::invalid_argument("decompose needs a graph without pendant edges");
    if (r.connected_components().size() != 1) throw std::invalid_argument("decompose needs a connected graph");
    if (r.sparsity_excess() > d)
      throw std::invalid_argument("sparsity excess " + std::to_string(r.sparsity_excess()) + " exceeds d = " +
                                  std::to_string(d));

    const auto n = static_cast<std::size_t>(g.node_count());
    in_v3_.assign(n, 0);
    for (NodeId x : r.alive_nodes())
      if (r.degree(x) >= 3) {
        in_v3_[static_cast<std::size_t>(x)] = 1;
        v_ge3_.push_back(x);
      }
    is_cycle_ = v_ge3_.empty();

    path_of_.assign(static_cast<std::size_t>(g.e()), -1);
    pos_.assign(static_cast<std::size_t>(g.e()), 0);
    incident_mask_ = g.no_edges();
    edges_.for_each([&](EdgeId e) {
      const Edge& ed = g.edge(e);
      if (in_v3_[static_cast<std::size_t>(ed.u)] || in_v3_[static_cast<std::size_t>(ed.v)]) {
        incident_.push_back(e);
        incident_mask_.insert(e);
      }
    });

    if (!is_cycle_) build_paths(r);

    nbr_.assign(static_cast<std::size_t>(g.e()), EdgeSet());
    edges_.for_each([&](EdgeId e) {
      EdgeSet s = g.no_edges();
      for (NodeId x : {g.edge(e).u, g.edge(e).v})
        for (EdgeId f : g.incident(x))
          if (edges_.contains(f)) s.insert(f);
      nbr_[static_cast<std::size_t>(e)] = std::move(s);
    });
    node_edges_.assign(n, EdgeSet());
    for (const auto& path : paths_)
      for (NodeId x : {path.first(), path.last()}) {
        EdgeSet s = g.no_edges();
        for (EdgeId f : g.incident(x))
          if (edges_.contains(f)) s.insert(f);
        node_edges_[static_cast<std::size_t>(x)] = std::move(s);
      }
    path_masks_.assign(paths_.size(), g.no_edges());
    for (std::size_t i = 0; i < paths_.size(); ++i)
      for (EdgeId e : paths_[i].edges) path_masks_[i].insert(e);

    if (!is_cycle_) {
      if (static_cast<int>(v_ge3_.size()) > 2 * d) throw std::logic_error("decomposition: |V>=3| exceeds 2d");
      if (static_cast<int>(incident_.size()) > 6 * d) throw std::logic_error("decomposition: incident edges exceed 6d");
      if (static_cast<int>(paths_.size()) > 3 * d) throw std::logic_error("decomposition: path count exceeds 3d");
    }
  }

  const WeightedGraph& graph() const { return *g_; }
  const EdgeSet& edges() const { return edges_; }
  int d() const { return d_; }
  bool is_cycle() const { return is_cycle_; }
  const std::vector<NodeId>& v_ge3() const { return v_ge3_; }
  const std::vector<PathInfo>& paths() const { return paths_; }
  const std::vector<EdgeId>& incident_edges() const { return incident_; }
  bool in_v_ge3(NodeId x) const { return in_v3_[static_cast<std::size_t>(x)] != 0; }
  bool is_incident(EdgeId e) const { return incident_mask_.contains(e); }
  /// Path index of a path edge, or -1.
  int path_of(EdgeId e) const { return path_of_[static_cast<std::size_t>(e)]; }
  /// 1-based position of a path edge on its path.
  int position(EdgeId e) const { return pos_[static_cast<std::size_t>(e)]; }
  /// N(e) within the decomposed graph, e included.
  const EdgeSet& neighborhood(EdgeId e) const { return nbr_[static_cast<std::size_t>(e)]; }
  const EdgeSet& path_mask(int i) const { return path_masks_[static_cast<std::size_t>(i)]; }
  const EdgeSet& endpoint_edges(NodeId x) const { return node_edges_[static_cast<std::size_t>(x)]; }

  /// Edge probabilities along path i with 0 for edges absent from h.
  std::vector<double> path_probabilities(int i, const EdgeSet& h) const {
    std::vector<double> p;
    for (EdgeId e : paths_[static_cast<std::size_t>(i)].edges) p.push_back(h.contains(e) ? g_->p(e) : 0.0);
    return p;
  }

 private:
  void build_paths(const ResidualView& r) {
    const WeightedGraph& g = *g_;
    std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
    for (NodeId start : r.alive_nodes()) {
      if (in_v3_[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) continue;
      // collect the component of G \ V>=3 containing start
      std::vector<NodeId> comp{start};
      seen[static_cast<std::size_t>(start)] = 1;
      for (std::size_t i = 0; i < comp.size(); ++i)
        for (EdgeId f : inner_edges(comp[i])) {
          NodeId y = g.other(f, comp[i]);
          if (!seen[static_cast<std::size_t>(y)]) {
            seen[static_cast<std::size_t>(y)] = 1;
            comp.push_back(y);
          }
        }
      std::vector<NodeId> ends;
      for (NodeId x : comp)
        if (inner_edges(x).size() <= 1) ends.push_back(x);
      if (ends.empty()) throw std::logic_error("decomposition: component of G \\ V>=3 is a cycle");
      PathInfo path;
      NodeId cur = *std::min_element(ends.begin(), ends.end());
      EdgeId came = -1;
      path.nodes.push_back(cur);
      while (true) {
        EdgeId next = -1;
        for (EdgeId f : inner_edges(cur))
          if (f != came) next = f;
        if (next < 0) break;
        path.edges.push_back(next);
        cur = g.other(next, cur);
        came = next;
        path.nodes.push_back(cur);
      }
      const int idx = static_cast<int>(paths_.size());
      for (int a = 1; a <= path.q(); ++a) {
        path_of_[static_cast<std::size_t>(path.edges[static_cast<std::size_t>(a - 1)])] = idx;
        pos_[static_cast<std::size_t>(path.edges[static_cast<std::size_t>(a - 1)])] = a;
      }
      paths_.push_back(std::move(path));
    }
  }

  std::vector<EdgeId> inner_edges(NodeId x) const {
    std::vector<EdgeId> out;
    for (EdgeId f : g_->incident(x))
      if (edges_.contains(f) && !in_v3_[static_cast<std::size_t>(g_->other(f, x))]) out.push_back(f);
    return out;
  }

  const WeightedGraph* g_;
  EdgeSet edges_;
  int d_;
  bool is_cycle_ = false;
  std::vector<char> in_v3_;
  std::vector<NodeId> v_ge3_;
  std::vector<PathInfo> paths_;
  std::vector<EdgeId> incident_;
  EdgeSet incident_mask_;
  std::vector<int> path_of_, pos_;
  std::vector<EdgeSet> nbr_, node_edges_, path_masks_;
};

inline SparseDecomposition decompose(const ResidualView& r, int d) { return SparseDecomposition(r, d); }
inline SparseDecomposition decompose(const WeightedGraph& g, int d) { return SparseDecomposition(ResidualView(g), d); }

/// Path statistics for S(h, e) on a path of the decomposition.
inline PathDPResult path_dp(const ResidualView& h, const PathInfo& path, EdgeId e) {
  auto it = std::find(path.edges.begin(), path.edges.end(), e);
  if (it == path.edges.end()) throw std::invalid_argument("edge is not on the path");
  if (!h.alive(e)) throw std::invalid_argument("probe edge is not in the graph");
  std::vector<double> p;
  for (EdgeId f : path.edges) p.push_back(h.alive(f) ? h.base().p(f) : 0.0);
  return path_dp(p, static_cast<int>(it - path.edges.begin()) + 1);
}

/// S(h, e) as a runnable strategy; edges absent or dead at their turn are skipped.
inline StrategyPtr path_sweep_strategy(const ResidualView& h, const PathInfo& path, EdgeId e) {
  auto it = std::find(path.edges.begin(), path.edges.end(), e);
  if (it == path.edges.end()) throw std::invalid_argument("edge is not on the path");
  if (!h.alive(e)) throw std::invalid_argument("probe edge is not in the graph");
  return std::make_unique<StaticOrder>("sweep", sweep_order(path, static_cast<int>(it - path.edges.begin()) + 1));
}

/// One node strategy of a contracted decision tree: a single query of an
/// edge touching V>=3, or a path sweep defined by its first edge.
struct CdtAction {
  enum class Kind { Edge, Sweep };
  Kind kind = Kind::Edge;
  EdgeId edge = -1;
  friend bool operator==(const CdtAction&, const CdtAction&) = default;
};

struct CdtOutcome {
  double probability;
  EdgeSet residual;
};

/// Actions allowed at residual h, in ascending edge order.
inline std::vector<CdtAction> family_actions(const SparseDecomposition& dec, const EdgeSet& h) {
  std::vector<CdtAction> out;
  h.for_each([&](EdgeId e) {
    if (dec.is_incident(e))
      out.push_back({CdtAction::Kind::Edge, e});
    else if (dec.path_of(e) >= 0)
      out.push_back({CdtAction::Kind::Sweep, e});
  });
  return out;
}

/// Expected number of edges the action itself matches.
inline double action_gain(const SparseDecomposition& dec, const EdgeSet& h, const CdtAction& a) {
  if (a.kind == CdtAction::Kind::Edge) return dec.graph().p(a.edge);
  const int i = dec.path_of(a.edge);
  return path_dp(dec.path_probabilities(i, h), dec.position(a.edge)).expected_size;
}

/// Distinct residual graphs the action can leave, with their probabilities.
/// Identical residuals are merged; impossible ones are dropped.
inline std::vector<CdtOutcome> action_outcomes(const SparseDecomposition& dec, const EdgeSet& h, const CdtAction& a) {
  std::vector<CdtOutcome> out;
  auto add = [&](double prob, EdgeSet r) {
    if (!(prob > 0.0)) return;
    for (auto& o : out)
      if (o.residual == r) {
        o.probability += prob;
        return;
      }
    out.push_back({prob, std::move(r)});
  };
  if (a.kind == CdtAction::Kind::Edge) {
    const double p = dec.graph().p(a.edge);
    EdgeSet no = h;
    no.erase(a.edge);
    add(p, h - dec.neighborhood(a.edge));
    add(1.0 - p, std::move(no));
    return out;
  }
  const int i = dec.path_of(a.edge);
  const PathInfo& path = dec.paths()[static_cast<std::size_t>(i)];
  const auto r = path_dp(dec.path_probabilities(i, h), dec.position(a.edge));
  const EdgeSet base = h - dec.path_mask(i);
  const EdgeSet& e1 = dec.endpoint_edges(path.first());
  const EdgeSet& eq = dec.endpoint_edges(path.last());
  add(r.pr_both, base - e1 - eq);
  add(r.pr_u1_only, base - e1);
  add(r.pr_uq1_only, base - eq);
  add(r.pr_neither, base);
  return out;
}

struct CdtNode;
using Cdt = std::shared_ptr<const CdtNode>;

/// Contracted decision tree. A node without action is a leaf; otherwise
/// children follow action_outcomes order.
struct CdtNode {
  EdgeSet residual;
  std::optional<CdtAction> action;
  std::vector<Cdt> children;
};

namespace detail {

inline double evaluate_cdt_at(const CdtNode& t, const SparseDecomposition& dec, std::vector<CdtAction>& chain) {
  if (!t.action) return 0.0;
  const CdtAction& a = *t.action;
  auto allowed = family_actions(dec, t.residual);
  if (std::find(allowed.begin(), allowed.end(), a) == allowed.end())
    throw std::invalid_argument("CDT node uses an action outside the family for its residual graph");
  if (std::find(chain.begin(), chain.end(), a) != chain.end())
    throw std::invalid_argument("CDT repeats a strategy along a root-leaf path");
  auto outs = action_outcomes(dec, t.residual, a);
  if (outs.size() != t.children.size()) throw std::invalid_argument("CDT node has the wrong number of children");
  double v = action_gain(dec, t.residual, a);
  chain.push_back(a);
  for (std::size_t k = 0; k < outs.size(); ++k) {
    if (!t.children[k] || !(t.children[k]->residual == outs[k].residual))
      throw std::invalid_argument("CDT child does not match the residual graph it should represent");
    v += outs[k].probability * evaluate_cdt_at(*t.children[k], dec, chain);
  }
  chain.pop_back();
  return v;
}

}  // namespace detail

/// Bottom-up value of a CDT.
inline double evaluate_cdt(const Cdt& t, const SparseDecomposition& dec) {
  if (!t) throw std::invalid_argument("null CDT");
  std::vector<CdtAction> chain;
  return detail::evaluate_cdt_at(*t, dec, chain);
}

inline std::size_t cdt_height(const Cdt& t) {
  if (!t || !t->action) return 0;
  std::size_t h = 0;
  for (const auto& c : t->children) h = std::max(h, cdt_height(c));
  return 1 + h;
}

namespace detail {

inline DecisionTree expand_sweep(const SparseDecomposition& dec, const CdtNode& t, const std::vector<EdgeId>& order,
                                 std::size_t idx, const EdgeSet& r, std::vector<EdgeSet>& reached);

inline DecisionTree expand_at(const SparseDecomposition& dec, const CdtNode& t) {
  if (!t.action) return nullptr;
  const CdtAction& a = *t.action;
  auto outs = action_outcomes(dec, t.residual, a);
  auto child_for = [&](const EdgeSet& r) -> const CdtNode* {
    for (std::size_t k = 0; k < outs.size(); ++k)
      if (outs[k].residual == r) return t.children[k].get();
    return nullptr;
  };
  if (a.kind == CdtAction::Kind::Edge) {
    EdgeSet no = t.residual;
    no.erase(a.edge);
    const CdtNode* y = child_for(t.residual - dec.neighborhood(a.edge));
    const CdtNode* n = child_for(no);
    return make_tree(a.edge, y ? expand_at(dec, *y) : nullptr, n ? expand_at(dec, *n) : nullptr);
  }
  const PathInfo& path = dec.paths()[static_cast<std::size_t>(dec.path_of(a.edge))];
  std::vector<EdgeSet> reached;
  return expand_sweep(dec, t, sweep_order(path, dec.position(a.edge)), 0, t.residual, reached);
}

inline DecisionTree expand_sweep(const SparseDecomposition& dec, const CdtNode& t, const std::vector<EdgeId>& order,
                                 std::size_t idx, const EdgeSet& r, std::vector<EdgeSet>& reached) {
  while (idx < order.size() && !r.contains(order[idx])) ++idx;
  if (idx == order.size()) {
    auto outs = action_outcomes(dec, t.residual, *t.action);
    for (std::size_t k = 0; k < outs.size(); ++k)
      if (outs[k].residual == r) return expand_at(dec, *t.children[k]);
    // reachable only through probability-zero branches (p = 1 edges)
    return nullptr;
  }
  const EdgeId e = order[idx];
  EdgeSet no = r;
  no.erase(e);
  return make_tree(e, expand_sweep(dec, t, order, idx + 1, r - dec.neighborhood(e), reached),
                   expand_sweep(dec, t, order, idx + 1, no, reached));
}

}  // namespace detail

/// Plain decision tree with every sweep unrolled into single queries.
inline DecisionTree expand_cdt(const Cdt& t, const SparseDecomposition& dec) {
  if (!t) return nullptr;
  return detail::expand_at(dec, *t);
}

/// Number of complete CDTs in the family for residual h (saturates at
/// the largest double).
inline double count_family(const SparseDecomposition& dec, const EdgeSet& h) {
  std::unordered_map<EdgeSet, double> memo;
  std::function<double(const EdgeSet&)> count = [&](const EdgeSet& r) -> double {
    if (r.empty()) return 1.0;
    if (auto it = memo.find(r); it != memo.end()) return it->second;
    double total = 0;
    for (const auto& a : family_actions(dec, r)) {
      double prod = 1;
      for (const auto& o : action_outcomes(dec, r, a)) prod *= count(o.residual);
      total += prod;
    }
    memo.emplace(r, total);
    return total;
  };
  return count(h);
}

/// Every complete CDT of the family for residual h (leaves are empty graphs).
/// Subtrees are shared between trees. Throws if more than `limit` trees
/// would be produced for any residual.
inline std::vector<Cdt> enumerate_family(const SparseDecomposition& dec, const EdgeSet& h, std::size_t limit = 100000) {
  std::unordered_map<EdgeSet, std::vector<Cdt>> memo;
  std::function<const std::vector<Cdt>&(const EdgeSet&)> trees = [&](const EdgeSet& r) -> const std::vector<Cdt>& {
    if (auto it = memo.find(r); it != memo.end()) return it->second;
    std::vector<Cdt> out;
    if (r.empty()) {
      out.push_back(std::make_shared<const CdtNode>(CdtNode{r, std::nullopt, {}}));
    } else {
      for (const auto& a : family_actions(dec, r)) {
        auto outs = action_outcomes(dec, r, a);
        std::vector<const std::vector<Cdt>*> lists;
        for (const auto& o : outs) lists.push_back(&trees(o.residual));
        std::vector<std::size_t> pick(lists.size(), 0);
        while (true) {
          if (out.size() >= limit) throw std::length_error("CDT family exceeds the enumeration limit");
          CdtNode node{r, a, {}};
          for (std::size_t k = 0; k < lists.size(); ++k) node.children.push_back((*lists[k])[pick[k]]);
          out.push_back(std::make_shared<const CdtNode>(std::move(node)));
          std::size_t k = 0;
          while (k < pick.size() && ++pick[k] == lists[k]->size()) pick[k++] = 0;
          if (k == pick.size()) break;
        }
      }
    }
    return memo.emplace(r, std::move(out)).first->second;
  };
  return trees(h);
}

/// Maximum of the CDT value over the family, by memoized recursion on the
/// residual edge set. Equivalent to enumerating the family because the value
/// of a node only depends on its residual and its subtrees.
class FamilyDP {
 public:
  FamilyDP(SparseDecomposition dec, std::size_t max_entries) : dec_(std::move(dec)), max_entries_(max_entries) {}

  const SparseDecomposition& decomposition() const { return dec_; }

  double value(const EdgeSet& h) { return solve(h).value; }
  CdtAction best_action(const EdgeSet& h) {
    if (h.empty()) throw std::invalid_argument("no action on an empty residual");
    return solve(h).action;
  }

  Cdt best_cdt(const EdgeSet& h) {
    if (auto it = trees_.find(h); it != trees_.end()) return it->second;
    CdtNode node{h, std::nullopt, {}};
    if (!h.empty()) {
      node.action = best_action(h);
      for (const auto& o : action_outcomes(dec_, h, *node.action)) node.children.push_back(best_cdt(o.residual));
    }
    auto t = std::make_shared<const CdtNode>(std::move(node));
    trees_.emplace(h, t);
    return t;
  }

  std::size_t cache_size() const { return memo_.size(); }

 private:
  struct Entry {
    double value;
    CdtAction action;
  };

  Entry solve(const EdgeSet& h) {
    if (h.empty()) return {0.0, {}};
    if (auto it = memo_.find(h); it != memo_.end()) return it->second;
    Entry best{-1.0, {}};
    for (const auto& a : family_actions(dec_, h)) {
      double v = action_gain(dec_, h, a);
      for (const auto& o : action_outcomes(dec_, h, a)) v += o.probability * solve(o.residual).value;
      if (v > best.value) best = {v, a};
    }
    if (best.action.edge < 0) throw std::logic_error("family has no action for a nonempty residual");
    if (memo_.size() >= max_entries_)
      throw std::runtime_error("sparse solver memo table exceeded " + std::to_string(max_entries_) + " entries");
    memo_.emplace(h, best);
    return best;
  }

  SparseDecomposition dec_;
  std::size_t max_entries_;
  std::unordered_map<EdgeSet, Entry> memo_;
  std::unordered_map<EdgeSet, Cdt> trees_;
};

struct SparseOptions {
  std::size_t max_cache_entries = std::size_t{1} << 22;
};

/// Optimal values for d-sparse graphs: pendant edges first, then per
/// component either the cycle recursion or the family maximum.
class SparseSolver {
 public:
  SparseSolver(const WeightedGraph& g, int d, SparseOptions opt = {}) : g_(&g), d_(d), opt_(opt) {
    nbr_.reserve(static_cast<std::size_t>(g.e()));
    for (EdgeId e = 0; e < g.e(); ++e) {
      EdgeSet s = g.no_edges();
      for (NodeId x : {g.edge(e).u, g.edge(e).v})
        for (EdgeId f : g.incident(x)) s.insert(f);
      nbr_.push_back(std::move(s));
    }
    for (const auto& c : ResidualView(g).connected_components()) {
      ResidualView rc(g, c);
      if (rc.sparsity_excess() > d)
        throw std::invalid_argument("a component has sparsity excess " + std::to_string(rc.sparsity_excess()) +
                                    " > d = " + std::to_string(d));
    }
  }

  const WeightedGraph& graph() const { return *g_; }
  int d() const { return d_; }

  double value(const EdgeSet& r) {
    if (r.empty()) return 0.0;
    if (auto it = values_.find(r); it != values_.end()) return it->second;
    double v = 0;
    for (const auto& c : ResidualView(*g_, r).connected_components()) v += component_value(c);
    remember(values_, r, v);
    return v;
  }
  double value() { return value(g_->all_edges()); }

  /// Best first edge of a pendant-free cycle component.
  EdgeId cycle_edge(const EdgeSet& c) {
    component_value(c);
    return cycle_choice_.at(c);
  }

  FamilyDP& family(const EdgeSet& c) {
    auto it = families_.find(c);
    if (it == families_.end())
      it = families_.emplace(c, std::make_unique<FamilyDP>(decompose(ResidualView(*g_, c), d_), opt_.max_cache_entries)).first;
    return *it->second;
  }

  const EdgeSet& neighborhood(EdgeId e) const { return nbr_[static_cast<std::size_t>(e)]; }

 private:
  double component_value(const EdgeSet& c) {
    if (auto it = comp_values_.find(c); it != comp_values_.end()) return it->second;
    ResidualView rc(*g_, c);
    double v;
    if (EdgeId e = rc.lowest_pendant(); e >= 0) {
      v = branch(c, e);
    } else if (rc.sparsity_excess() == 0) {
      // pendant-free and connected with e = v: a cycle
      EdgeId best = -1;
      v = -1;
      c.for_each([&](EdgeId f) {
        double x = branch(c, f);
        if (x > v) {
          v = x;
          best = f;
        }
      });
      cycle_choice_[c] = best;
    } else {
      if (rc.sparsity_excess() > d_)
        throw std::invalid_argument("residual component exceeds the sparsity bound");
      v = family(c).value(c);
    }
    remember(comp_values_, c, v);
    return v;
  }

  double branch(const EdgeSet& c, EdgeId e) {
    const double p = g_->p(e);
    EdgeSet no = c;
    no.erase(e);
    return p * (1.0 + value(c - nbr_[static_cast<std::size_t>(e)])) + (1.0 - p) * value(no);
  }

  void remember(std::unordered_map<EdgeSet, double>& m, const EdgeSet& k, double v) {
    if (m.size() >= opt_.max_cache_entries)
      throw std::runtime_error("sparse solver memo table exceeded " + std::to_string(opt_.max_cache_entries) + " entries");
    m.emplace(k, v);
  }

  const WeightedGraph* g_;
  int d_;
  SparseOptions opt_;
  std::vector<EdgeSet> nbr_;
  std::unordered_map<EdgeSet, double> values_, comp_values_;
  std::unordered_map<EdgeSet, EdgeId> cycle_choice_;
  std::unordered_map<EdgeSet, std::unique_ptr<FamilyDP>> families_;
};

/// Runtime policy matching SparseSolver::value: lowest pendant edge while
/// any exists, otherwise take the component holding the lowest edge and
/// follow its optimal family tree (sweeps unrolled) until it is exhausted.
class SparseStrategy final : public Strategy {
 public:
  explicit SparseStrategy(std::shared_ptr<SparseSolver> solver) : solver_(std::move(solver)) {}

  std::string name() const override { return "sparseOpt"; }
  void start(const WeightedGraph&) override {
    family_ = nullptr;
    sweep_.clear();
    sweep_pos_ = 0;
  }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory&) override {
    while (true) {
      while (sweep_pos_ < sweep_.size()) {
        EdgeId e = sweep_[sweep_pos_++];
        if (r.alive(e)) return e;
      }
      sweep_.clear();
      sweep_pos_ = 0;
      if (family_) {
        EdgeSet h = r.alive_edges() & core_;
        if (h.empty()) {
          family_ = nullptr;
          continue;
        }
        CdtAction a = family_->best_action(h);
        if (a.kind == CdtAction::Kind::Edge) return a.edge;
        const auto& dec = family_->decomposition();
        sweep_ = sweep_order(dec.paths()[static_cast<std::size_t>(dec.path_of(a.edge))], dec.position(a.edge));
        continue;
      }
      if (r.empty()) return std::nullopt;
      if (EdgeId e = r.lowest_pendant(); e >= 0) return e;
      EdgeSet c = r.connected_components().front();
      if (ResidualView(r.base(), c).sparsity_excess() == 0) return solver_->cycle_edge(c);
      family_ = &solver_->family(c);
      core_ = std::move(c);
    }
  }
  StrategyPtr clone() const override { return std::make_unique<SparseStrategy>(*this); }

 private:
  std::shared_ptr<SparseSolver> solver_;
  FamilyDP* family_ = nullptr;
  EdgeSet core_;
  std::vector<EdgeId> sweep_;
  std::size_t sweep_pos_ = 0;
};

struct SparseSolution {
  StrategyPtr strategy;
  double value;
  std::shared_ptr<SparseSolver> solver;
};

/// Optimal strategy and its value for a graph whose components all have
/// sparsity excess at most d.
inline SparseSolution solve_sparse(const WeightedGraph& g, int d, SparseOptions opt = {}) {
  auto solver = std::make_shared<SparseSolver>(g, d, opt);
  double v = solver->value();
  return {std::make_unique<SparseStrategy>(solver), v, solver};
}

}  // namespace qc
