#pragma once

#include <bit>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qcommit/strategy.hpp"

namespace qc {

/// Binary decision tree. A null pointer is a leaf (stop). The residual graph
/// at a node is implicit: yes-child sees G \ N(edge), no-child sees G \ edge.
struct TreeNode {
  EdgeId edge = -1;
  std::shared_ptr<const TreeNode> yes;
  std::shared_ptr<const TreeNode> no;
};

using DecisionTree = std::shared_ptr<const TreeNode>;

inline DecisionTree make_tree(EdgeId e, DecisionTree yes, DecisionTree no) {
  return std::make_shared<const TreeNode>(TreeNode{e, std::move(yes), std::move(no)});
}

namespace detail {

inline double evaluate_tree_at(const TreeNode* t, const ResidualView& r) {
  if (!t) return 0.0;
  if (t->edge < 0 || t->edge >= r.base().e() || !r.alive(t->edge))
    throw std::invalid_argument("decision tree queries edge " + std::to_string(t->edge) +
                                " which is not alive at that node");
  const double p = r.base().p(t->edge);
  return p * (1.0 + evaluate_tree_at(t->yes.get(), r.without_neighborhood(t->edge))) +
         (1.0 - p) * evaluate_tree_at(t->no.get(), r.without_edge(t->edge));
}

}  // namespace detail

/// Expected matching size of a decision tree:
/// E(x) = p_e (1 + E(yes)) + (1 - p_e) E(no), E(leaf) = 0.
inline double evaluate_tree(const DecisionTree& t, const WeightedGraph& g) {
  return detail::evaluate_tree_at(t.get(), ResidualView(g));
}

inline double evaluate_tree(const DecisionTree& t, const ResidualView& r) { return detail::evaluate_tree_at(t.get(), r); }

inline std::size_t tree_size(const DecisionTree& t) { return t ? 1 + tree_size(t->yes) + tree_size(t->no) : 0; }
inline std::size_t tree_height(const DecisionTree& t) {
  return t ? 1 + std::max(tree_height(t->yes), tree_height(t->no)) : 0;
}

/// Indented text dump; one `query <u>-<v> p=<p>` line per internal node.
inline void dump_tree(std::ostream& os, const DecisionTree& t, const WeightedGraph& g, int indent = 0,
                      const std::string& tag = "") {
  os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << tag;
  if (!t) {
    os << "stop\n";
    return;
  }
  const Edge& e = g.edge(t->edge);
  std::ostringstream p;
  p << std::setprecision(12) << e.p;
  os << "query " << e.u << "-" << e.v << " p=" << p.str() << "\n";
  dump_tree(os, t->yes, g, indent + 1, "yes: ");
  dump_tree(os, t->no, g, indent + 1, "no: ");
}

struct OptOptions {
  int max_edges = 18;
  std::size_t max_cache_entries = std::size_t{1} << 24;
};

/// Bellman recursion over alive-edge bitmasks:
/// OPT(R) = max_e p_e (1 + OPT(R \ N(e))) + (1 - p_e) OPT(R \ e).
/// Ties go to the lowest edge index.
class OptOracle {
 public:
  explicit OptOracle(const WeightedGraph& g, OptOptions opt = {}) : g_(&g), opt_(opt) {
    if (g.e() > opt.max_edges || g.e() > 63)
      throw std::invalid_argument("brute-force optimum is capped at " + std::to_string(std::min(opt.max_edges, 63)) +
                                  " edges, graph has " + std::to_string(g.e()));
    nbr_.resize(static_cast<std::size_t>(g.e()));
    for (EdgeId e = 0; e < g.e(); ++e) {
      std::uint64_t m = 0;
      for (EdgeId f = 0; f < g.e(); ++f)
        if (g.share_endpoint(e, f)) m |= std::uint64_t{1} << f;
      nbr_[static_cast<std::size_t>(e)] = m | (std::uint64_t{1} << e);
    }
  }

  const WeightedGraph& graph() const { return *g_; }

  static std::uint64_t mask_of(const EdgeSet& s) { return s.words().empty() ? 0 : s.words()[0]; }
  std::uint64_t full_mask() const { return g_->e() == 64 ? ~0ULL : (std::uint64_t{1} << g_->e()) - 1; }

  double value(std::uint64_t mask) { return solve(mask).value; }
  double value() { return value(full_mask()); }
  EdgeId best_edge(std::uint64_t mask) { return solve(mask).edge; }

  DecisionTree tree(std::uint64_t mask) {
    if (mask == 0) return nullptr;
    if (auto it = trees_.find(mask); it != trees_.end()) return it->second;
    EdgeId e = best_edge(mask);
    auto t = make_tree(e, tree(mask & ~nbr_[static_cast<std::size_t>(e)]), tree(mask & ~(std::uint64_t{1} << e)));
    trees_.emplace(mask, t);
    return t;
  }

  std::size_t cache_size() const { return memo_.size(); }

 private:
  struct Entry {
    double value;
    EdgeId edge;
  };

  Entry solve(std::uint64_t mask) {
    if (mask == 0) return {0.0, -1};
    if (auto it = memo_.find(mask); it != memo_.end()) return it->second;
    Entry best{-1.0, -1};
    for (std::uint64_t m = mask; m; m &= m - 1) {
      const int e = std::countr_zero(m);
      const double p = g_->p(e);
      const double v = p * (1.0 + solve(mask & ~nbr_[static_cast<std::size_t>(e)]).value) +
                       (1.0 - p) * solve(mask & ~(std::uint64_t{1} << e)).value;
      if (v > best.value) best = {v, e};
    }
    if (memo_.size() >= opt_.max_cache_entries)
      throw std::runtime_error("brute-force memo table exceeded " + std::to_string(opt_.max_cache_entries) + " entries");
    memo_.emplace(mask, best);
    return best;
  }

  const WeightedGraph* g_;
  OptOptions opt_;
  std::vector<std::uint64_t> nbr_;
  std::unordered_map<std::uint64_t, Entry> memo_;
  std::unordered_map<std::uint64_t, DecisionTree> trees_;
};

inline double opt_value(const WeightedGraph& g, OptOptions opt = {}) { return OptOracle(g, opt).value(); }

inline DecisionTree opt_strategy(const WeightedGraph& g, OptOptions opt = {}) {
  OptOracle o(g, opt);
  return o.tree(o.full_mask());
}

/// Plays the brute-force optimum (lowest-index argmax) as a Strategy.
class OptPolicy final : public Strategy {
 public:
  explicit OptPolicy(std::shared_ptr<OptOracle> oracle) : oracle_(std::move(oracle)) {}
  std::string name() const override { return "opt"; }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory&) override {
    if (r.empty()) return std::nullopt;
    return oracle_->best_edge(OptOracle::mask_of(r.alive_edges()));
  }
  StrategyPtr clone() const override { return std::make_unique<OptPolicy>(*this); }

 private:
  std::shared_ptr<OptOracle> oracle_;
};

inline StrategyPtr opt_policy(const WeightedGraph& g, OptOptions opt = {}) {
  return std::make_unique<OptPolicy>(std::make_shared<OptOracle>(g, opt));
}

namespace detail {

inline double evaluate_strategy_at(const WeightedGraph& g, Strategy& s, const ResidualView& r, QueryHistory& h) {
  if (r.empty()) return 0.0;
  auto q = s.next_query(r, h);
  if (!q) return 0.0;
  const EdgeId e = *q;
  if (e < 0 || e >= g.e() || !r.alive(e)) throw ContractViolation(s.name() + " queried a dead edge");
  const double p = g.p(e);
  double total = 0.0;
  if (p > 0.0) {
    auto branch = s.clone();
    h.push_back({e, true});
    total += p * (1.0 + evaluate_strategy_at(g, *branch, r.without_neighborhood(e), h));
    h.pop_back();
  }
  if (p < 1.0) {
    h.push_back({e, false});
    total += (1.0 - p) * evaluate_strategy_at(g, s, r.without_edge(e), h);
    h.pop_back();
  }
  return total;
}

inline DecisionTree induced_tree_at(const WeightedGraph& g, Strategy& s, const ResidualView& r, QueryHistory& h) {
  if (r.empty()) return nullptr;
  auto q = s.next_query(r, h);
  if (!q) return nullptr;
  const EdgeId e = *q;
  if (e < 0 || e >= g.e() || !r.alive(e)) throw ContractViolation(s.name() + " queried a dead edge");
  auto branch = s.clone();
  h.push_back({e, true});
  auto yes = induced_tree_at(g, *branch, r.without_neighborhood(e), h);
  h.back().success = false;
  auto no = induced_tree_at(g, s, r.without_edge(e), h);
  h.pop_back();
  return make_tree(e, std::move(yes), std::move(no));
}

}  // namespace detail

/// Exact expected matching size of an adaptive strategy, by branching the
/// strategy (clone) at each query. Exponential in the number of queries.
inline double evaluate_strategy(const WeightedGraph& g, const Strategy& s) {
  auto run = s.clone();
  run->start(g);
  QueryHistory h;
  return detail::evaluate_strategy_at(g, *run, ResidualView(g), h);
}

/// Same, starting from a residual graph instead of the whole graph.
inline double evaluate_strategy(const ResidualView& r, const Strategy& s) {
  auto run = s.clone();
  run->start(r.base());
  QueryHistory h;
  return detail::evaluate_strategy_at(r.base(), *run, r, h);
}

/// The decision tree a strategy induces on g.
inline DecisionTree induced_tree(const WeightedGraph& g, const Strategy& s) {
  auto run = s.clone();
  run->start(g);
  QueryHistory h;
  return detail::induced_tree_at(g, *run, ResidualView(g), h);
}

}  // namespace qc
