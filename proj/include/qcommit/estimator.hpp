#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qcommit/matching.hpp"
#include "qcommit/rng.hpp"
#include "qcommit/strategy.hpp"

namespace qc {

enum class BoundFamily { Hoeffding, Bernstein };

inline std::string_view to_string(BoundFamily b) { return b == BoundFamily::Hoeffding ? "hoeffding" : "bernstein"; }

struct EstimateReport {
  std::string label;  // strategy name, or "E[mu]"
  double mean = 0;
  std::int64_t samples = 0;
  double half_width = 0;
  double confidence = 0;
  BoundFamily bound_family = BoundFamily::Hoeffding;
  std::uint64_t seed = 0;
  double variance = 0;        // unbiased sample variance of the per-sample sizes
  std::vector<double> trace;  // running mean after every trace_every samples

  double lower() const { return mean - half_width; }
  double upper() const { return mean + half_width; }
};

namespace detail {

inline void check_plan(double n, double t, double delta) {
  if (!(n > 0)) throw std::invalid_argument("node count must be positive");
  if (!(t > 0)) throw std::invalid_argument("half-width must be positive");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0,1)");
}

}  // namespace detail

/// Samples so that 2 exp(-8 k t^2 / n^2) <= delta: sizes live in [0, n/2].
inline std::int64_t hoeffding_sample_size(double n, double t, double delta) {
  detail::check_plan(n, t, delta);
  const double k = n * n * std::log(2 / delta) / (8 * t * t);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(k)));
}

inline double hoeffding_half_width(double n, std::int64_t k, double delta) {
  detail::check_plan(n, 1, delta);
  if (k < 1) throw std::invalid_argument("need at least one sample");
  return n * std::sqrt(std::log(2 / delta) / (8.0 * static_cast<double>(k)));
}

/// Samples so that 2 exp(-k t^2 / (n + 2t/3)) <= delta.
inline std::int64_t bernstein_sample_size(double n, double t, double delta) {
  detail::check_plan(n, t, delta);
  const double k = (n + 2 * t / 3) * std::log(2 / delta) / (t * t);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(k)));
}

/// Positive root of k t^2 - (2L/3) t - n L = 0 with L = ln(2/delta).
inline double bernstein_half_width(double n, std::int64_t k, double delta) {
  detail::check_plan(n, 1, delta);
  if (k < 1) throw std::invalid_argument("need at least one sample");
  const double L = std::log(2 / delta);
  const double a = 2 * L / 3;
  const double kk = static_cast<double>(k);
  return (a + std::sqrt(a * a + 4 * kk * n * L)) / (2 * kk);
}

inline std::int64_t sample_size(BoundFamily b, double n, double t, double delta) {
  return b == BoundFamily::Hoeffding ? hoeffding_sample_size(n, t, delta) : bernstein_sample_size(n, t, delta);
}

inline double half_width(BoundFamily b, double n, std::int64_t k, double delta) {
  return b == BoundFamily::Hoeffding ? hoeffding_half_width(n, k, delta) : bernstein_half_width(n, k, delta);
}

/// Worker count: `requested` if positive, else the hardware thread count;
/// QC_THREADS caps either.
inline int worker_count(int requested = 0) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("QC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

struct SamplingOptions {
  std::int64_t samples = 38000;
  std::uint64_t seed = 0;
  double delta = 0.05;
  int threads = 0;      // see worker_count
  int trace_every = 0;  // 0 disables the running-mean trace
  BoundFamily strategy_bound = BoundFamily::Hoeffding;
  BoundFamily e_mu_bound = BoundFamily::Bernstein;
};

/// Scenario used for sample i. It depends on the seed and the sample index
/// only, so every column of a comparison sees the same scenarios.
inline Scenario crn_scenario(const WeightedGraph& g, std::uint64_t seed, std::int64_t i) {
  Rng rng(sub_seed(seed, {static_cast<std::uint64_t>(i)}));
  return sample_scenario(g, rng);
}

/// Common-random-number estimates for each strategy, plus E[mu] last when
/// with_e_mu. Results do not depend on the number of workers.
inline std::vector<EstimateReport> estimate_crn(const WeightedGraph& g, const std::vector<const Strategy*>& strategies,
                                                bool with_e_mu, const SamplingOptions& opt) {
  if (opt.samples < 1) throw std::invalid_argument("need at least one sample");
  const std::size_t cols = strategies.size() + (with_e_mu ? 1 : 0);
  const auto k = static_cast<std::size_t>(opt.samples);
  std::vector<std::vector<int>> value(cols, std::vector<int>(k));

  constexpr std::int64_t kBlock = 64;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      std::vector<StrategyPtr> mine;
      for (const Strategy* s : strategies) mine.push_back(s->clone());
      while (true) {
        const std::int64_t lo = next.fetch_add(kBlock);
        if (lo >= opt.samples) break;
        const std::int64_t hi = std::min(opt.samples, lo + kBlock);
        for (std::int64_t i = lo; i < hi; ++i) {
          const Scenario sigma = crn_scenario(g, opt.seed, i);
          const auto ui = static_cast<std::size_t>(i);
          for (std::size_t c = 0; c < mine.size(); ++c)
            value[c][ui] = static_cast<int>(run(g, *mine[c], sigma).matching.size());
          if (with_e_mu) value[cols - 1][ui] = static_cast<int>(max_cardinality_matching(ResidualView(g, sigma.present)).size());
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = opt.samples;
    }
  };
  const int workers = std::min<std::int64_t>(worker_count(opt.threads), (opt.samples + kBlock - 1) / kBlock);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  const double n = std::max(1, g.v());
  std::vector<EstimateReport> out;
  for (std::size_t c = 0; c < cols; ++c) {
    EstimateReport r;
    const bool emu = with_e_mu && c == cols - 1;
    r.label = emu ? "E[mu]" : strategies[c]->name();
    r.samples = opt.samples;
    r.seed = opt.seed;
    r.confidence = 1 - opt.delta;
    r.bound_family = emu ? opt.e_mu_bound : opt.strategy_bound;
    r.half_width = half_width(r.bound_family, n, opt.samples, opt.delta);
    // integer sums are exact, so the order of accumulation cannot matter
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      sum += value[c][i];
      if (opt.trace_every > 0 && (i + 1) % static_cast<std::size_t>(opt.trace_every) == 0)
        r.trace.push_back(static_cast<double>(sum) / static_cast<double>(i + 1));
    }
    r.mean = static_cast<double>(sum) / static_cast<double>(k);
    double ss = 0;
    for (int x : value[c]) ss += (x - r.mean) * (x - r.mean);
    r.variance = k > 1 ? ss / static_cast<double>(k - 1) : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

inline EstimateReport estimate_strategy_value(const WeightedGraph& g, const Strategy& s, const SamplingOptions& opt) {
  return estimate_crn(g, {&s}, false, opt).front();
}

inline EstimateReport estimate_strategy_value(const WeightedGraph& g, const Strategy& s, std::int64_t k, std::uint64_t seed) {
  SamplingOptions opt;
  opt.samples = k;
  opt.seed = seed;
  return estimate_strategy_value(g, s, opt);
}

inline EstimateReport estimate_e_mu(const WeightedGraph& g, const SamplingOptions& opt) {
  return estimate_crn(g, {}, true, opt).front();
}

inline EstimateReport estimate_e_mu(const WeightedGraph& g, std::int64_t k, std::uint64_t seed) {
  SamplingOptions opt;
  opt.samples = k;
  opt.seed = seed;
  return estimate_e_mu(g, opt);
}

namespace detail {

inline constexpr int kMaxExhaustiveEdges = 24;

// Maximum matching size of every edge subset, indexed by bitmask.
inline std::vector<std::uint8_t> subset_matching_sizes(const WeightedGraph& g) {
  const int m = g.e();
  std::vector<std::uint32_t> nbr(static_cast<std::size_t>(m), 0);
  for (EdgeId a = 0; a < m; ++a)
    for (EdgeId b = 0; b < m; ++b) {
      const auto& x = g.edge(a);
      const auto& y = g.edge(b);
      if (x.u == y.u || x.u == y.v || x.v == y.u || x.v == y.v) nbr[static_cast<std::size_t>(a)] |= 1U << b;
    }
  std::vector<std::uint8_t> mu(std::size_t{1} << m, 0);
  for (std::uint32_t mask = 1; mask < (1U << m); ++mask) {
    const int e = std::countr_zero(mask);
    mu[mask] = static_cast<std::uint8_t>(
        std::max<int>(mu[mask & (mask - 1)], 1 + mu[mask & ~nbr[static_cast<std::size_t>(e)]]));
  }
  return mu;
}

}  // namespace detail

/// E[mu(sigma)] by summing over all 2^e scenarios.
inline double exact_expected_mu(const WeightedGraph& g) {
  if (g.e() > detail::kMaxExhaustiveEdges)
    throw std::invalid_argument("exact E[mu] enumerates 2^e scenarios; e = " + std::to_string(g.e()) + " is too large");
  const auto mu = detail::subset_matching_sizes(g);
  double total = 0;
  for (std::uint32_t mask = 0; mask < mu.size(); ++mask) {
    double pr = 1;
    for (EdgeId e = 0; e < g.e(); ++e) pr *= (mask >> e) & 1 ? g.p(e) : 1 - g.p(e);
    total += pr * mu[mask];
  }
  return total;
}

/// Checks that x -> mu(subgraph with edge indicator x) is self-bounding: every
/// single-edge removal lowers it by 0 or 1 and the drops sum to at most its
/// value. Exhaustive, so limited to 14 edges.
inline bool verify_self_bounding(const WeightedGraph& g) {
  if (g.e() > 14) throw std::invalid_argument("verify_self_bounding is exhaustive and takes at most 14 edges");
  const auto mu = detail::subset_matching_sizes(g);
  for (std::uint32_t x = 0; x < mu.size(); ++x) {
    int drops = 0;
    for (EdgeId j = 0; j < g.e(); ++j) {
      const int d = mu[x] - mu[x & ~(1U << j)];
      if (d < 0 || d > 1) return false;
      drops += d;
    }
    if (drops > mu[x]) return false;
  }
  return true;
}

/// n/4 disjoint three-edge paths, all certain except the middle edge of the
/// first path (p = 1/2). The strategy probes that edge, then every other
/// middle edge if it existed and every outer edge if not, so it ends with
/// n/4 or n/2 edges, each with probability 1/2.
struct AdversarialInstance {
  WeightedGraph graph;
  StrategyPtr strategy;
};

namespace detail {

// Edge 3i+1 is the middle of path i; 3i and 3i+2 are its outer edges.
class AdversarialStrategy final : public Strategy {
 public:
  std::string name() const override { return "adversarial"; }
  std::optional<EdgeId> next_query(const ResidualView& r, const QueryHistory& h) override {
    if (h.empty()) return r.alive(1) ? std::optional<EdgeId>(1) : std::nullopt;
    const bool middles = h.front().success;
    for (EdgeId e = 0; e < r.base().e(); ++e)
      if (r.alive(e) && (e % 3 == 1) == middles) return e;
    return std::nullopt;
  }
  StrategyPtr clone() const override { return std::make_unique<AdversarialStrategy>(*this); }
};

}  // namespace detail

inline AdversarialInstance adversarial_instance(int n) {
  if (n < 4 || n % 4 != 0) throw std::invalid_argument("adversarial_instance needs a positive multiple of 4");
  std::vector<Edge> edges;
  for (int i = 0; i < n / 4; ++i) {
    const int a = 4 * i;
    edges.push_back({a, a + 1, 1.0});
    edges.push_back({a + 1, a + 2, i == 0 ? 0.5 : 1.0});
    edges.push_back({a + 2, a + 3, 1.0});
  }
  return {WeightedGraph(n, edges), std::make_unique<detail::AdversarialStrategy>()};
}

}  // namespace qc
