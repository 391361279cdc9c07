#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcommit/graph.hpp"

namespace qc {

struct QueryRecord {
  EdgeId edge;
  bool success;
  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

using QueryHistory = std::vector<QueryRecord>;

/// Adaptive querying policy. The engine calls start() once per run, then
/// next_query() until it returns nullopt or the residual graph is empty.
/// A returned edge must be alive in the residual view.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual void start(const WeightedGraph& g) { (void)g; }
  virtual std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory& h) = 0;
  /// Copy including per-run state; used to branch a run in exact evaluation.
  virtual std::unique_ptr<Strategy> clone() const = 0;
};

using StrategyPtr = std::unique_ptr<Strategy>;

struct RunResult {
  Matching matching;
  QueryHistory queries;
  std::optional<Scenario> scenario;
};

/// Runs s against an outcome oracle `exists(e) -> bool`. The oracle is asked
/// at most once per edge, at the moment the edge is queried.
template <typename Oracle>
RunResult run_with(const WeightedGraph& g, Strategy& s, Oracle&& exists) {
  RunResult out;
  ResidualView r(g);
  EdgeSet queried = g.no_edges();
  s.start(g);
  while (!r.empty()) {
    std::optional<EdgeId> q = s.next_query(r, out.queries);
    if (!q) break;
    EdgeId e = *q;
    if (e < 0 || e >= g.e())
      throw ContractViolation(s.name() + " returned edge id " + std::to_string(e) + " outside the graph");
    if (queried.contains(e)) throw ContractViolation(s.name() + " queried edge " + std::to_string(e) + " twice");
    if (!r.alive(e)) throw ContractViolation(s.name() + " queried dead edge " + std::to_string(e));
    queried.insert(e);
    bool ok = exists(e);
    out.queries.push_back({e, ok});
    if (ok) {
      out.matching.edges.push_back(e);
      r.erase_neighborhood(e);
    } else {
      r.erase_edge(e);
    }
  }
  std::sort(out.matching.edges.begin(), out.matching.edges.end());
  return out;
}

/// Runs s on a fixed scenario.
inline RunResult run(const WeightedGraph& g, Strategy& s, const Scenario& sigma) {
  if (sigma.present.universe() != static_cast<std::size_t>(g.e()))
    throw std::invalid_argument("scenario does not belong to this graph");
  RunResult out = run_with(g, s, [&](EdgeId e) { return sigma.contains(e); });
  out.scenario = sigma;
  return out;
}

/// Samples each edge's existence only when it is queried.
inline RunResult run_lazy(const WeightedGraph& g, Strategy& s, Rng& rng) {
  return run_with(g, s, [&](EdgeId e) { return rng.bernoulli(g.p(e)); });
}

/// Queries the lowest-index pendant edge of the residual whenever one exists,
/// otherwise defers to the wrapped strategy.
class PendantFirst final : public Strategy {
 public:
  explicit PendantFirst(StrategyPtr inner) : inner_(std::move(inner)) {}
  PendantFirst(const PendantFirst& o) : inner_(o.inner_->clone()) {}

  std::string name() const override { return inner_->name(); }
  void start(const WeightedGraph& g) override { inner_->start(g); }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory& h) override {
    EdgeId p = r.lowest_pendant();
    if (p >= 0) return p;
    return inner_->next_query(r, h);
  }
  StrategyPtr clone() const override { return std::make_unique<PendantFirst>(*this); }

  const Strategy& inner() const { return *inner_; }

 private:
  StrategyPtr inner_;
};

inline StrategyPtr pendant_first(StrategyPtr inner) { return std::make_unique<PendantFirst>(std::move(inner)); }

/// Walks a fixed edge order, skipping edges that are no longer alive.
class StaticOrder final : public Strategy {
 public:
  StaticOrder(std::string name, std::vector<EdgeId> order) : name_(std::move(name)), order_(std::move(order)) {}

  std::string name() const override { return name_; }
  void start(const WeightedGraph&) override { cursor_ = 0; }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory&) override {
    while (cursor_ < order_.size() && !r.alive(order_[cursor_])) ++cursor_;
    if (cursor_ == order_.size()) return std::nullopt;
    return order_[cursor_++];
  }
  StrategyPtr clone() const override { return std::make_unique<StaticOrder>(*this); }

  const std::vector<EdgeId>& order() const { return order_; }

 private:
  std::string name_;
  std::vector<EdgeId> order_;
  std::size_t cursor_ = 0;
};

}  // namespace qc
