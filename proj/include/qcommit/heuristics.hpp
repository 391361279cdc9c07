#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qcommit/matching.hpp"
#include "qcommit/strategy.hpp"

namespace qc {

namespace detail {

// Picks the alive edge with the smallest key; ties go to the lower index.
template <typename Key>
class MinKeyScan final : public Strategy {
 public:
  MinKeyScan(std::string name, Key key) : name_(std::move(name)), key_(std::move(key)) {}

  std::string name() const override { return name_; }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory&) override {
    EdgeId best = -1;
    decltype(key_(r, 0)) best_key{};
    r.alive_edges().for_each([&](EdgeId e) {
      auto k = key_(r, e);
      if (best < 0 || k < best_key) {
        best = e;
        best_key = k;
      }
    });
    if (best < 0) return std::nullopt;
    return best;
  }
  StrategyPtr clone() const override { return std::make_unique<MinKeyScan>(*this); }

 private:
  std::string name_;
  Key key_;
};

template <typename Key>
StrategyPtr make_min_key(std::string name, Key key) {
  return std::make_unique<MinKeyScan<Key>>(std::move(name), std::move(key));
}

// Edge order by probability (descending when `descending`), stable on index.
inline std::vector<EdgeId> probability_order(const WeightedGraph& g, bool descending) {
  std::vector<EdgeId> order(static_cast<std::size_t>(g.e()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return descending ? g.p(a) > g.p(b) : g.p(a) < g.p(b);
  });
  return order;
}

// Identifies the graph a per-graph cache was built for. The address alone
// is not enough: a new graph can reuse a freed one's storage.
class GraphKey {
 public:
  GraphKey() = default;
  explicit GraphKey(const WeightedGraph& g) : ptr_(&g), hash_(fingerprint(g)) {}
  bool matches(const WeightedGraph& g) const { return ptr_ == &g && hash_ == fingerprint(g); }

 private:
  static std::uint64_t fingerprint(const WeightedGraph& g) {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(g.node_count()));
    for (const Edge& e : g.edges()) {
      std::uint64_t bits;
      std::memcpy(&bits, &e.p, sizeof bits);
      h = splitmix64(h ^ (static_cast<std::uint64_t>(e.u) << 32 | static_cast<std::uint32_t>(e.v)));
      h = splitmix64(h ^ bits);
    }
    return h;
  }

  const WeightedGraph* ptr_ = nullptr;
  std::uint64_t hash_ = 0;
};

// Static order that is computed from the graph at start().
class ProbabilityOrder final : public Strategy {
 public:
  ProbabilityOrder(std::string name, bool descending) : name_(std::move(name)), descending_(descending) {}

  std::string name() const override { return name_; }
  void start(const WeightedGraph& g) override {
    if (!key_.matches(g)) {
      order_ = probability_order(g, descending_);
      key_ = GraphKey(g);
    }
    cursor_ = 0;
  }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory&) override {
    while (cursor_ < order_.size() && !r.alive(order_[cursor_])) ++cursor_;
    if (cursor_ == order_.size()) return std::nullopt;
    return order_[cursor_++];
  }
  StrategyPtr clone() const override { return std::make_unique<ProbabilityOrder>(*this); }

 private:
  std::string name_;
  bool descending_;
  GraphKey key_;
  std::vector<EdgeId> order_;
  std::size_t cursor_ = 0;
};

enum class MatchingWeights { Cardinality, OneMinusP, P };

inline std::vector<double> matching_weights(const WeightedGraph& g, MatchingWeights kind) {
  std::vector<double> w(static_cast<std::size_t>(g.e()), 1.0);
  for (EdgeId e = 0; e < g.e(); ++e) {
    if (kind == MatchingWeights::OneMinusP) w[static_cast<std::size_t>(e)] = 1.0 - g.p(e);
    if (kind == MatchingWeights::P) w[static_cast<std::size_t>(e)] = g.p(e);
  }
  return w;
}

// Matching source shared by the batch and successive strategies. Weighted
// kinds re-solve incrementally from the previous optimum; the solve on the
// whole graph is done once per graph and shared by all copies.
class MatchingOracle {
 public:
  explicit MatchingOracle(MatchingWeights kind) : kind_(kind) {}

  void start(const WeightedGraph& g) {
    if (!key_.matches(g)) {
      key_ = GraphKey(g);
      root_.reset();
      if (kind_ != MatchingWeights::Cardinality) {
        auto inc = std::make_shared<IncrementalWeightedMatching>(g, matching_weights(g, kind_));
        inc->solve(ResidualView(g));
        root_ = std::move(inc);
      }
    }
    if (root_) inc_ = *root_;
  }

  Matching compute(const ResidualView& r) {
    if (kind_ == MatchingWeights::Cardinality) return max_cardinality_matching(r);
    return inc_->solve(r);
  }

 private:
  MatchingWeights kind_;
  GraphKey key_;
  std::shared_ptr<const IncrementalWeightedMatching> root_;
  std::optional<IncrementalWeightedMatching> inc_;
};

// Computes a matching, queries all of it in ascending index, repeats.
class BatchMatching final : public Strategy {
 public:
  BatchMatching(std::string name, MatchingWeights kind) : name_(std::move(name)), oracle_(kind) {}

  std::string name() const override { return name_; }
  void start(const WeightedGraph& g) override {
    oracle_.start(g);
    queue_.clear();
    head_ = 0;
  }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory&) override {
    while (true) {
      while (head_ < queue_.size() && !r.alive(queue_[head_])) ++head_;
      if (head_ < queue_.size()) return queue_[head_++];
      if (r.empty()) return std::nullopt;
      queue_ = oracle_.compute(r).edges;
      head_ = 0;
    }
  }
  StrategyPtr clone() const override { return std::make_unique<BatchMatching>(*this); }

 private:
  std::string name_;
  MatchingOracle oracle_;
  std::vector<EdgeId> queue_;
  std::size_t head_ = 0;
};

// Queries the lowest-index edge of a maximum-weight matching of the residual.
// The matching is kept between steps while it provably stays the solver's
// optimum: after a success on one of its edges, or a failure outside it.
class SuccessiveMatching final : public Strategy {
 public:
  SuccessiveMatching(std::string name, MatchingWeights kind) : name_(std::move(name)), oracle_(kind) {}

  std::string name() const override { return name_; }
  void start(const WeightedGraph& g) override {
    oracle_.start(g);
    cached_.clear();
    valid_ = false;
    seen_ = 0;
  }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory& h) override {
    for (; seen_ < h.size(); ++seen_) {
      if (!valid_) continue;
      const auto& q = h[seen_];
      bool in_m = std::binary_search(cached_.begin(), cached_.end(), q.edge);
      if (in_m != q.success) valid_ = false;
    }
    if (r.empty()) return std::nullopt;
    if (valid_) {
      for (EdgeId e : cached_)
        if (r.alive(e)) return e;
    }
    cached_ = oracle_.compute(r).edges;
    valid_ = true;
    ++recomputes_;
    return cached_.front();
  }
  StrategyPtr clone() const override { return std::make_unique<SuccessiveMatching>(*this); }

  std::size_t recomputes() const { return recomputes_; }

 private:
  std::string name_;
  MatchingOracle oracle_;
  std::vector<EdgeId> cached_;
  bool valid_ = false;
  std::size_t seen_ = 0;
  std::size_t recomputes_ = 0;
};

}  // namespace detail

inline StrategyPtr max_prob() { return pendant_first(std::make_unique<detail::ProbabilityOrder>("maxP", true)); }
inline StrategyPtr min_prob() { return pendant_first(std::make_unique<detail::ProbabilityOrder>("minP", false)); }

inline StrategyPtr min_degree() {
  return pendant_first(detail::make_min_key("minDeg", [](const ResidualView& r, EdgeId e) {
    const auto& ed = r.base().edge(e);
    return r.degree(ed.u) + r.degree(ed.v);
  }));
}

inline StrategyPtr min_avg_degree() {
  return pendant_first(detail::make_min_key("minAvgDeg", [](const ResidualView& r, EdgeId e) {
    const auto& ed = r.base().edge(e);
    return r.weighted_degree_fixed(ed.u) + r.weighted_degree_fixed(ed.v);
  }));
}

inline StrategyPtr batch_sm() {
  return pendant_first(std::make_unique<detail::BatchMatching>("batchSM", detail::MatchingWeights::Cardinality));
}
inline StrategyPtr batch_wsm() {
  return pendant_first(std::make_unique<detail::BatchMatching>("batchWSM", detail::MatchingWeights::OneMinusP));
}
inline StrategyPtr swm_q() {
  return pendant_first(std::make_unique<detail::SuccessiveMatching>("SWMq", detail::MatchingWeights::OneMinusP));
}
inline StrategyPtr swm_p() {
  return pendant_first(std::make_unique<detail::SuccessiveMatching>("SWMp", detail::MatchingWeights::P));
}

/// The eight graph-only heuristics, in table column order.
inline const std::vector<std::string>& heuristic_names() {
  static const std::vector<std::string> names{"maxP",    "minP",     "minDeg", "minAvgDeg",
                                              "batchSM", "batchWSM", "SWMq",   "SWMp"};
  return names;
}

/// Builds a heuristic by its CLI identifier. bloodDecomp needs node labels and
/// is built through blood_type_decomposition instead.
inline StrategyPtr heuristic(std::string_view name) {
  if (name == "maxP") return max_prob();
  if (name == "minP") return min_prob();
  if (name == "minDeg") return min_degree();
  if (name == "minAvgDeg") return min_avg_degree();
  if (name == "batchSM") return batch_sm();
  if (name == "batchWSM") return batch_wsm();
  if (name == "SWMq") return swm_q();
  if (name == "SWMp") return swm_p();
  if (name == "bloodDecomp")
    throw std::invalid_argument("bloodDecomp needs blood-type labels; use blood_type_decomposition");
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

}  // namespace qc
