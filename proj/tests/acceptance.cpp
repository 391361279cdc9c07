// Runs the acceptance checks and prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>

#include "oracles.hpp"
#include "qcommit/experiment.hpp"
#include "qcommit/qcommit.hpp"

using namespace qc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<StrategyPtr> catalog() {
  std::vector<StrategyPtr> out;
  for (const auto& n : heuristic_names()) out.push_back(heuristic(n));
  return out;
}

// 1. sparse solver equals the brute-force optimum
Outcome sparse_vs_brute_force() {
  Rng rng(101);
  int graphs = 0;
  double worst = 0;
  while (graphs < 600) {
    const int n = 2 + static_cast<int>(rng.below(8));  // 2..9 nodes
    const int extra = static_cast<int>(rng.below(3));  // excess -1, 0 or 1
    if (n - 1 + extra > 8) continue;
    const auto g = oracle::random_connected(rng, n, extra);
    if (g.e() - g.v() > 1) continue;
    worst = std::max(worst, std::abs(solve_sparse(g, 1).value - opt_value(g)));
    ++graphs;
  }
  return {worst <= 1e-9, fmt("%d graphs, max |sparse - opt| = %.3g", graphs, worst)};
}

// 2. pendant-first strategies are optimal scenario by scenario on forests
Outcome forests_exact() {
  Rng rng(202);
  int graphs = 0;
  long long runs = 0, misses = 0;
  while (graphs < 120) {
    const auto g = oracle::random_forest(rng, 2 + static_cast<int>(rng.below(14)), 12);
    if (g.e() == 0) continue;
    ++graphs;
    auto strategies = catalog();
    // a pendant-first wrapper around an arbitrary fixed order
    std::vector<EdgeId> rev(static_cast<std::size_t>(g.e()));
    for (EdgeId e = 0; e < g.e(); ++e) rev[static_cast<std::size_t>(e)] = g.e() - 1 - e;
    strategies.push_back(pendant_first(std::make_unique<StaticOrder>("reverse", rev)));
    strategies.push_back(solve_sparse(g, 0).strategy);
    for (std::uint64_t sig = 0; sig <= oracle::full_mask(g); ++sig) {
      const int mu = oracle::mu(g, sig);
      const auto sc = oracle::scenario_of(g, sig);
      for (auto& s : strategies) {
        ++runs;
        if (static_cast<int>(run(g, *s, sc).matching.size()) != mu) ++misses;
      }
    }
  }
  return {misses == 0, fmt("%d forests, %lld runs, %lld below mu", graphs, runs, misses)};
}

// 3. path DP against exhaustive enumeration of the sweep
Outcome path_dp_exhaustive() {
  Rng rng(303);
  double worst = 0;
  int cases = 0;
  for (int q = 1; q <= 6; ++q)
    for (int j = 1; j <= q; ++j)
      for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> p(static_cast<std::size_t>(q));
        for (double& x : p) x = oracle::uniform_open(rng);
        const auto g = oracle::path_graph(p);
        std::vector<EdgeId> order;
        for (int a = j; a >= 1; --a) order.push_back(a - 1);
        for (int a = j + 1; a <= q; ++a) order.push_back(a - 1);
        StaticOrder s("sweep", order);
        double size = 0, u1 = 0, uq1 = 0, both = 0;
        for (std::uint64_t sig = 0; sig <= oracle::full_mask(g); ++sig) {
          const double pr = oracle::scenario_probability(g, sig);
          const auto m = run(g, s, oracle::scenario_of(g, sig)).matching;
          bool c1 = false, cq = false;
          for (EdgeId e : m.edges) {
            c1 = c1 || g.edge(e).u == 0 || g.edge(e).v == 0;
            cq = cq || g.edge(e).u == q || g.edge(e).v == q;
          }
          size += pr * static_cast<double>(m.size());
          u1 += c1 ? pr : 0;
          uq1 += cq ? pr : 0;
          both += c1 && cq ? pr : 0;
        }
        const auto dp = path_dp(p, j);
        worst = std::max({worst, std::abs(dp.expected_size - size), std::abs(dp.pr_u1 - u1), std::abs(dp.pr_uq1 - uq1),
                          std::abs(dp.pr_both - both)});
        ++cases;
      }
  return {worst <= 1e-12, fmt("%d path/probe/vector cases, max error %.3g", cases, worst)};
}

// 4. every heuristic matching is at least half of mu in every scenario
Outcome half_bound() {
  Rng rng(404);
  long long runs = 0, violations = 0;
  for (int i = 0; i < 220; ++i) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const auto g = oracle::random_graph(rng, n, 1 + static_cast<int>(rng.below(10)));
    auto strategies = catalog();
    for (std::uint64_t sig = 0; sig <= oracle::full_mask(g); ++sig) {
      const int mu = oracle::mu(g, sig);
      const auto sc = oracle::scenario_of(g, sig);
      for (auto& s : strategies) {
        ++runs;
        if (2 * static_cast<int>(run(g, *s, sc).matching.size()) < mu) ++violations;
      }
    }
  }
  return {violations == 0, fmt("220 graphs, %lld runs, %lld violations", runs, violations)};
}

// 5. sample-size constants
Outcome sample_size_constants() {
  const auto k = hoeffding_sample_size(100, 0.35, 0.05);
  const double c = std::log(2 / 0.05) / 8;
  const bool ok = k >= 37600 && k <= 38000 && std::abs(c - 0.4611) < 5e-5;
  return {ok, fmt("k = %lld, n^2/t^2 constant = %.5f", static_cast<long long>(k), c)};
}

// 6. sequential bipartite strategy on K_{8,8}
Outcome bipartite_bound() {
  constexpr int kSide = 8;
  constexpr std::int64_t kRuns = 100000;
  constexpr double kDelta = 0.05;
  bool ok = true;
  std::string detail;
  for (double p : {0.3, 0.5, 0.8}) {
    const auto g = oracle::complete_bipartite(kSide, kSide, p);
    std::vector<NodeId> U(kSide);
    for (int i = 0; i < kSide; ++i) U[static_cast<std::size_t>(i)] = i;
    auto s = bipartite_sequential(g, U);
    std::vector<std::int64_t> unmatched(kSide, 0);
    std::int64_t total = 0;
    for (std::int64_t r = 0; r < kRuns; ++r) {
      const auto sc = crn_scenario(g, 606, r);
      const auto m = run(g, *s, sc).matching;
      total += static_cast<std::int64_t>(m.size());
      std::vector<char> cov(static_cast<std::size_t>(g.node_count()), 0);
      for (EdgeId e : m.edges) cov[static_cast<std::size_t>(g.edge(e).u)] = cov[static_cast<std::size_t>(g.edge(e).v)] = 1;
      for (int i = 0; i < kSide; ++i) unmatched[static_cast<std::size_t>(i)] += !cov[static_cast<std::size_t>(i)];
    }
    const double q = 1 - p;
    const double mean = static_cast<double>(total) / kRuns;
    const double lower = mean - hoeffding_half_width(2 * kSide, kRuns, kDelta);
    for (double eps : {0.25, 0.5}) {
      const double bound = (1 - std::pow(q, std::floor(eps * kSide)) - eps) * kSide;
      ok = ok && lower > bound;
    }
    // Hoeffding for a proportion, union over the 8 nodes
    const double ci = std::sqrt(std::log(2.0 * kSide / kDelta) / (2.0 * kRuns));
    double slack = 1;
    for (int i = 1; i <= kSide; ++i) {
      const double f = static_cast<double>(unmatched[static_cast<std::size_t>(i - 1)]) / kRuns;
      slack = std::min(slack, std::pow(q, i) + ci - f);
    }
    ok = ok && slack >= 0;
    detail += fmt("p=%.1f value %.3f (lower %.3f) min node slack %.4f; ", p, mean, lower, slack);
  }
  return {ok, detail};
}

// 7. self-bounding property of mu
Outcome self_bounding() {
  // every graph on 5 labelled nodes, i.e. every edge subset of K5
  const auto k5 = oracle::complete_graph(5, 0.5);
  int failures = 0, checked = 0;
  for (std::uint32_t mask = 0; mask < (1U << k5.e()); ++mask) {
    std::vector<Edge> edges;
    for (EdgeId e = 0; e < k5.e(); ++e)
      if (mask >> e & 1) edges.push_back(k5.edge(e));
    failures += !verify_self_bounding(WeightedGraph(5, edges));
    ++checked;
  }
  Rng rng(707);
  for (int i = 0; i < 100; ++i) {
    const int n = 4 + static_cast<int>(rng.below(8));
    failures += !verify_self_bounding(oracle::random_graph(rng, n, 1 + static_cast<int>(rng.below(12))));
    ++checked;
  }
  return {failures == 0, fmt("%d graphs, %d failures", checked, failures)};
}

// 8. mu(G) >= E[mu] >= OPT >= each heuristic, all exact
Outcome upper_bound_chain() {
  Rng rng(808);
  int broken = 0;
  double min_gap = 1e9;
  for (int i = 0; i < 20; ++i) {
    const auto g = oracle::random_graph(rng, 6 + static_cast<int>(rng.below(3)), 9 + static_cast<int>(rng.below(4)));
    const double mu = static_cast<double>(max_cardinality_matching(g).size());
    const double emu = exact_expected_mu(g);
    const double opt = opt_value(g);
    double best = 0;
    for (auto& s : catalog()) best = std::max(best, evaluate_strategy(g, *s));
    constexpr double tol = 1e-12;
    if (!(mu + tol >= emu && emu + tol >= opt && opt + tol >= best)) ++broken;
    min_gap = std::min(min_gap, emu - opt);
  }
  return {broken == 0, fmt("20 instances, %d broken chains, min E[mu] - OPT = %.4f", broken, min_gap)};
}

// 9. table on 10 generated n = 100 instances
Outcome table_analog() {
  const auto cfg = load_config(std::string(QC_SOURCE_DIR) + "/config/saidman_default.conf");
  const auto instances = generate_instances(100, 10, cfg, 2024);
  TablePlan plan;
  plan.seed = 2024;
  plan.samples = 38000;
  std::vector<TableRow> rows;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    rows.push_back(run_table_row(instances[i], i, plan));
    std::fprintf(stderr, "  criterion 9: instance %zu/10 done\n", i + 1);
  }
  const std::size_t emu = heuristic_names().size();
  bool a = true;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < emu; ++c) a = a && r.cells[emu].mean > r.cells[c].mean;
  const auto means = column_means(rows);
  const std::size_t avg = 3;  // minAvgDeg
  const double gap = (means[emu] - means[avg]) / means[emu];
  int rank = 1;
  for (std::size_t c = 0; c < emu; ++c) rank += means[c] > means[avg];
  std::string row;
  for (std::size_t c = 0; c <= emu; ++c) row += fmt("%s %.2f ", table_columns()[c].c_str(), means[c]);
  return {a && gap <= 0.05 && rank <= 2,
          fmt("E[mu] above all: %s; minAvgDeg gap %.2f%%, rank %d; means: ", a ? "yes" : "no", 100 * gap, rank) + row};
}

// 10. best heuristic value relative to n/2 does not fall as n grows
Outcome growth_trend() {
  TablePlan plan;
  plan.seed = 1010;
  plan.samples = 500;
  std::vector<double> ratio;
  std::string detail;
  for (int n : {50, 100, 200}) {
    const auto instances = generate_instances(n, 10, GeneratorConfig{}, sub_seed(1010, {static_cast<std::uint64_t>(n)}));
    double sum = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto row = run_table_row(instances[i], i, plan);
      double best = 0;
      for (std::size_t c = 0; c < heuristic_names().size(); ++c) best = std::max(best, row.cells[c].mean);
      sum += best / (n / 2.0);
    }
    ratio.push_back(sum / 10);
    detail += fmt("n=%d %.4f ", n, ratio.back());
  }
  const bool ok = ratio[1] >= ratio[0] - 0.02 && ratio[2] >= ratio[1] - 0.02;
  return {ok, detail};
}

// 11. the two-point construction and the law of the sample mean
Outcome two_point_law() {
  constexpr int kN = 64;
  auto adv = adversarial_instance(kN);
  const auto& g = adv.graph;
  int other = 0, small = 0;
  constexpr int kRuns = 10000;
  for (int r = 0; r < kRuns; ++r) {
    const auto size = run(g, *adv.strategy, crn_scenario(g, 1111, r)).matching.size();
    if (size == kN / 4) ++small;
    else if (size != kN / 2) ++other;
  }
  const double freq = static_cast<double>(small) / kRuns;

  // eta over k samples is n/4 + (n/4k) B(k, 1/2)
  constexpr int kSamples = 50, kReps = 2000;
  std::vector<double> eta;
  for (int r = 0; r < kReps; ++r)
    eta.push_back(estimate_strategy_value(g, *adv.strategy, kSamples, sub_seed(1111, {static_cast<std::uint64_t>(r)})).mean);
  std::vector<double> cdf(kSamples + 1);
  double acc = 0;
  for (int j = 0; j <= kSamples; ++j) {
    acc += std::exp(std::lgamma(kSamples + 1.0) - std::lgamma(j + 1.0) - std::lgamma(kSamples - j + 1.0) - kSamples * std::log(2.0));
    cdf[static_cast<std::size_t>(j)] = acc;
  }
  std::vector<int> hits(kSamples + 1, 0);
  int off_support = 0;
  for (double x : eta) {
    const double j = (x - kN / 4.0) * (4.0 * kSamples / kN);
    const long jr = std::lround(j);
    if (std::abs(j - static_cast<double>(jr)) > 1e-9 || jr < 0 || jr > kSamples) ++off_support;
    else ++hits[static_cast<std::size_t>(jr)];
  }
  // both CDFs are step functions on the same atoms
  double D = 0;
  int run_count = 0;
  for (int j = 0; j <= kSamples; ++j) {
    run_count += hits[static_cast<std::size_t>(j)];
    D = std::max(D, std::abs(static_cast<double>(run_count) / kReps - cdf[static_cast<std::size_t>(j)]));
  }
  const double critical = std::sqrt(-0.5 * std::log(0.01 / 2)) / std::sqrt(static_cast<double>(kReps));
  const bool ok = other == 0 && std::abs(freq - 0.5) <= 0.02 && off_support == 0 && D < critical;
  return {ok, fmt("sizes outside {16,32}: %d, Pr(16) = %.4f, KS D = %.4f < %.4f, off-support %d", other, freq, D, critical,
                  off_support)};
}

// 12. coverage of the Hoeffding interval, Bernstein narrower at n = 100
Outcome calibration() {
  Rng rng(1212);
  WeightedGraph g = oracle::random_graph(rng, 6, 8);
  while (g.e() != 8) g = oracle::random_graph(rng, 6, 8);
  auto s = heuristic("minAvgDeg");
  const double truth = evaluate_strategy(g, *s);
  int covered = 0;
  for (int r = 0; r < 200; ++r) {
    const auto rep = estimate_strategy_value(g, *s, 200, sub_seed(1212, {static_cast<std::uint64_t>(r)}));
    covered += rep.lower() <= truth && truth <= rep.upper();
  }
  const double hb = half_width(BoundFamily::Bernstein, 100, 38000, 0.05);
  const double hh = half_width(BoundFamily::Hoeffding, 100, 38000, 0.05);
  return {covered >= 190 && hb < hh,
          fmt("coverage %d/200 (true %.6f); half-widths bernstein %.4f < hoeffding %.4f", covered, truth, hb, hh)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> checks{
      sparse_vs_brute_force, forests_exact, path_dp_exhaustive, half_bound,    sample_size_constants, bipartite_bound,
      self_bounding,         upper_bound_chain, table_analog,   growth_trend, two_point_law,         calibration};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  [%.1fs] %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
