#pragma once

// Table runs: every heuristic plus E[mu] on a list of instances, one row per
// instance. Seeds fan out from one master seed:
//   instance i generated with        sub_seed(master, {i, 0})
//   scenarios of instance i use      sub_seed(master, {i, 1})
// and scenario j of that stream is shared by all columns of the row.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qcommit/estimator.hpp"
#include "qcommit/heuristics.hpp"
#include "qcommit/kidney.hpp"
#include "qcommit/rng.hpp"

namespace qc {

struct NamedInstance {
  std::string name;
  Instance instance;
};

inline std::uint64_t generation_seed(std::uint64_t master, std::size_t i) { return sub_seed(master, {i, 0}); }
inline std::uint64_t sampling_seed(std::uint64_t master, std::size_t i) { return sub_seed(master, {i, 1}); }

/// count instances with n pairs each, named 1..count.
inline std::vector<NamedInstance> generate_instances(int n, int count, const GeneratorConfig& cfg, std::uint64_t master) {
  std::vector<NamedInstance> out;
  for (int i = 0; i < count; ++i)
    out.push_back({std::to_string(i + 1), generate_instance(n, cfg, generation_seed(master, static_cast<std::size_t>(i))).instance});
  return out;
}

struct TablePlan {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> samples;       // fixed k per cell
  std::optional<double> target_half_width;   // or k from the strategy bound
  double delta = 0.05;
  int threads = 0;
};

struct TableRow {
  std::string instance;
  std::vector<EstimateReport> cells;  // heuristics in column order, then E[mu]
};

/// Samples used for graph g: the fixed count, or the smallest k whose
/// strategy-bound half-width reaches the target.
inline std::int64_t planned_samples(const WeightedGraph& g, const TablePlan& plan, BoundFamily b = BoundFamily::Hoeffding) {
  if (plan.target_half_width) return sample_size(b, std::max(1, g.v()), *plan.target_half_width, plan.delta);
  return plan.samples.value_or(38000);
}

inline std::vector<std::string> table_columns() {
  auto cols = heuristic_names();
  cols.push_back("E[mu]");
  return cols;
}

inline TableRow run_table_row(const NamedInstance& inst, std::size_t index, const TablePlan& plan) {
  std::vector<StrategyPtr> owned;
  std::vector<const Strategy*> cols;
  for (const auto& name : heuristic_names()) {
    owned.push_back(heuristic(name));
    cols.push_back(owned.back().get());
  }
  SamplingOptions opt;
  opt.seed = sampling_seed(plan.seed, index);
  opt.delta = plan.delta;
  opt.threads = plan.threads;
  opt.samples = planned_samples(inst.instance.graph, plan);
  return {inst.name, estimate_crn(inst.instance.graph, cols, true, opt)};
}

inline std::vector<TableRow> run_table(const std::vector<NamedInstance>& instances, const TablePlan& plan) {
  std::vector<TableRow> rows;
  for (std::size_t i = 0; i < instances.size(); ++i) rows.push_back(run_table_row(instances[i], i, plan));
  return rows;
}

/// Column means over rows.
inline std::vector<double> column_means(const std::vector<TableRow>& rows) {
  std::vector<double> m(table_columns().size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < m.size(); ++c) m[c] += r.cells[c].mean;
  for (double& x : m) x /= static_cast<double>(std::max<std::size_t>(1, rows.size()));
  return m;
}

namespace detail {
inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}
inline std::string full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Display CSV: one row per instance, two decimals, then a mean row.
inline void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows) {
  os << "instance";
  for (const auto& c : table_columns()) os << "," << c;
  os << "\n";
  for (const auto& r : rows) {
    os << r.instance;
    for (const auto& cell : r.cells) os << "," << detail::fixed(cell.mean, 2);
    os << "\n";
  }
  os << "mean";
  for (double m : column_means(rows)) os << "," << detail::fixed(m, 2);
  os << "\n";
}

inline void write_estimate_header(std::ostream& os) {
  os << "instance,strategy,samples,mean,half_width,confidence,seed,bound_family,variance\n";
}

inline void write_estimate_line(std::ostream& os, const std::string& instance, const EstimateReport& r) {
  os << instance << "," << r.label << "," << r.samples << "," << detail::full(r.mean) << "," << detail::full(r.half_width)
     << "," << detail::full(r.confidence) << "," << r.seed << "," << to_string(r.bound_family) << ","
     << detail::full(r.variance) << "\n";
}

/// Full-precision sidecar: one line per cell.
inline void write_table_sidecar(std::ostream& os, const std::vector<TableRow>& rows) {
  write_estimate_header(os);
  for (const auto& r : rows)
    for (const auto& cell : r.cells) write_estimate_line(os, r.instance, cell);
}

}  // namespace qc
