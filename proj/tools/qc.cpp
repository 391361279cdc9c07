// qc: generate instances, run strategies, estimate values, build tables.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "qcommit/experiment.hpp"
#include "qcommit/qcommit.hpp"

namespace {

using namespace qc;

struct Common {
  std::uint64_t seed = 1;
  std::string config;
  std::int64_t samples = 0;
  double target_half_width = 0;
  double delta = 0.05;
  std::string out;
  int trace = 0;
  int threads = 0;
};

GeneratorConfig config_from(const Common& c) { return c.config.empty() ? GeneratorConfig{} : load_config(c.config); }

std::vector<std::string> strategy_names() {
  auto names = heuristic_names();
  names.push_back("bloodDecomp");
  return names;
}

StrategyPtr make_strategy(const std::string& name, const Instance& inst) {
  if (name == "bloodDecomp") return blood_type_decomposition(inst);
  for (const auto& h : heuristic_names())
    if (h == name) return heuristic(name);
  std::string valid;
  for (const auto& s : strategy_names()) valid += (valid.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown strategy '" + name + "'; valid names: " + valid);
}

// Writes through a file when --out was given, stdout otherwise.
template <typename F>
void emit(const std::string& path, F&& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  body(os);
  if (!os) throw std::runtime_error("write to " + path + " failed");
}

SamplingOptions sampling(const Common& c, const WeightedGraph& g, BoundFamily b) {
  if (c.samples > 0 && c.target_half_width > 0) throw std::invalid_argument("give --samples or --target-halfwidth, not both");
  SamplingOptions opt;
  opt.seed = c.seed;
  opt.delta = c.delta;
  opt.threads = c.threads;
  opt.trace_every = c.trace;
  if (c.target_half_width > 0)
    opt.samples = sample_size(b, std::max(1, g.v()), c.target_half_width, c.delta);
  else if (c.samples > 0)
    opt.samples = c.samples;
  return opt;
}

void print_trace(const EstimateReport& r, int every) {
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    std::fprintf(stderr, "trace %s %lld %.6f\n", r.label.c_str(), static_cast<long long>((i + 1) * every), r.trace[i]);
}

void add_sampling_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "master seed");
  auto* k = cmd->add_option("--samples", c.samples, "number of sampled scenarios")->check(CLI::PositiveNumber);
  auto* t = cmd->add_option("--target-halfwidth", c.target_half_width, "choose k so the CI half-width is at most this")
                ->check(CLI::PositiveNumber);
  k->excludes(t);
  cmd->add_option("--delta", c.delta, "CI failure probability")->check(CLI::Range(1e-12, 1.0));
  cmd->add_option("--threads", c.threads, "worker threads (0: all cores, capped by QC_THREADS)");
  cmd->add_option("--trace", c.trace, "print the running mean every N samples to stderr");
  cmd->add_option("--out", c.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query-commit stochastic matching toolkit"};
  app.require_subcommand(1);
  Common c;

  // gen
  int gen_n = 0;
  auto* gen = app.add_subcommand("gen", "generate a kidney-exchange instance");
  gen->add_option("--n", gen_n, "number of incompatible pairs")->required()->check(CLI::Range(2, 1 << 20));
  gen->add_option("--seed", c.seed, "generator seed");
  gen->add_option("--config", c.config, "pool parameter file (defaults built in)");
  gen->add_option("--out", c.out, "output file (default stdout)");
  gen->callback([&] {
    const auto cfg = config_from(c);
    const auto k = generate_instance(gen_n, cfg, c.seed);
    emit(c.out, [&](std::ostream& os) {
      os << "# qc gen --n " << gen_n << " --seed " << c.seed << " config " << cfg.hash() << "\n";
      write_instance(os, k.instance);
    });
  });

  // estimate
  std::string file, strategy;
  auto* est = app.add_subcommand("estimate", "Monte-Carlo value of one strategy");
  est->add_option("file", file, "instance file")->required();
  est->add_option("--strategy", strategy, "strategy name")->required();
  add_sampling_flags(est, c);
  est->callback([&] {
    const auto inst = load_instance(file);
    const auto s = make_strategy(strategy, inst);
    const auto r = estimate_strategy_value(inst.graph, *s, sampling(c, inst.graph, BoundFamily::Hoeffding));
    if (c.trace > 0) print_trace(r, c.trace);
    emit(c.out, [&](std::ostream& os) {
      write_estimate_header(os);
      write_estimate_line(os, file, r);
    });
  });

  // emu
  auto* emu = app.add_subcommand("emu", "Monte-Carlo E[mu], an upper bound on every strategy");
  emu->add_option("file", file, "instance file")->required();
  add_sampling_flags(emu, c);
  emu->callback([&] {
    const auto inst = load_instance(file);
    const auto r = estimate_e_mu(inst.graph, sampling(c, inst.graph, BoundFamily::Bernstein));
    if (c.trace > 0) print_trace(r, c.trace);
    emit(c.out, [&](std::ostream& os) {
      write_estimate_header(os);
      write_estimate_line(os, file, r);
    });
  });

  // exact
  auto* exact = app.add_subcommand("exact", "exact optimum on small or sparse graphs");
  exact->require_subcommand(1);
  bool show_tree = false;
  auto* opt = exact->add_subcommand("opt", "brute force over residual graphs (at most 18 edges)");
  opt->add_option("file", file, "instance file")->required();
  opt->add_flag("--tree", show_tree, "also print the optimal decision tree");
  opt->callback([&] {
    const auto inst = load_instance(file);
    OptOracle oracle(inst.graph);
    std::printf("%.12g\n", oracle.value());
    if (show_tree) dump_tree(std::cout, oracle.tree(oracle.full_mask()), inst.graph);
  });
  int d = 1;
  auto* sparse = exact->add_subcommand("sparse", "optimum of a graph with every component d-sparse");
  sparse->add_option("file", file, "instance file")->required();
  sparse->add_option("--d", d, "sparsity bound: each component has at most v + d edges")->check(CLI::NonNegativeNumber);
  sparse->callback([&] {
    const auto inst = load_instance(file);
    std::printf("%.12g\n", solve_sparse(inst.graph, d).value);
  });

  // table
  std::vector<std::string> files;
  int table_n = 100, instances = 10;
  auto* table = app.add_subcommand("table", "all heuristics plus E[mu] on several instances, shared scenarios");
  table->add_option("files", files, "instance files (otherwise instances are generated)");
  table->add_option("--n", table_n, "pairs per generated instance")->check(CLI::Range(2, 1 << 20));
  table->add_option("--instances", instances, "number of generated instances")->check(CLI::PositiveNumber);
  table->add_option("--config", c.config, "pool parameter file for generated instances");
  add_sampling_flags(table, c);
  table->callback([&] {
    std::vector<NamedInstance> list;
    if (files.empty()) {
      list = generate_instances(table_n, instances, config_from(c), c.seed);
    } else {
      for (const auto& f : files) list.push_back({f, load_instance(f)});
    }
    TablePlan plan;
    plan.seed = c.seed;
    plan.delta = c.delta;
    plan.threads = c.threads;
    if (c.samples > 0) plan.samples = c.samples;
    if (c.target_half_width > 0) plan.target_half_width = c.target_half_width;
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < list.size(); ++i) {
      rows.push_back(run_table_row(list[i], i, plan));
      std::fprintf(stderr, "instance %s done (%zu/%zu)\n", list[i].name.c_str(), i + 1, list.size());
    }
    emit(c.out, [&](std::ostream& os) { write_table_csv(os, rows); });
    if (!c.out.empty()) emit(c.out + ".full.csv", [&](std::ostream& os) { write_table_sidecar(os, rows); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qc: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
