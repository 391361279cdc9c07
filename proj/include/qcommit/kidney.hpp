#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcommit/labels.hpp"
#include "qcommit/rng.hpp"

namespace qc {

struct PraLevel {
  std::string name;
  double probability;  // share of patients in this category
  double level;        // chance of a positive crossmatch against a random donor
};

/// How a compatible pair of pairs turns two PRA levels into a success
/// probability. Both crossmatches of a 2-way exchange have to be negative.
enum class CrossmatchMapping { Product, Min };

/// Parameters of the patient/donor pool. The defaults are the published
/// Saidman et al. (2006) values and equal config/saidman_default.conf.
struct GeneratorConfig {
  std::array<double, 4> abo{0.4814, 0.3373, 0.1428, 0.0385};  // O, A, B, AB
  double wife_probability = 0.2002873;  // 0.4090 female patients times 0.4897 with a spousal donor
  double wife_pra_factor = 0.75;  // a wife's crossmatch with her husband: 1 - factor * (1 - pra)
  std::vector<PraLevel> pra{{"low", 0.7019, 0.05}, {"medium", 0.20, 0.45}, {"high", 0.0981, 0.90}};
  CrossmatchMapping mapping = CrossmatchMapping::Product;
  double floor = 0.01;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const {
    auto near_one = [](double s) { return std::abs(s - 1.0) <= 1e-9; };
    double s = 0;
    for (double x : abo) {
      if (!(x >= 0)) throw std::invalid_argument("blood type frequencies must be nonnegative");
      s += x;
    }
    if (!near_one(s)) throw std::invalid_argument("blood type frequencies must sum to 1");
    for (double x : abo)
      if (!(x > 0)) throw std::invalid_argument("every blood type needs positive frequency so every pair type can occur");
    if (!(wife_probability >= 0 && wife_probability <= 1)) throw std::invalid_argument("wife_probability outside [0,1]");
    if (!(wife_pra_factor >= 0 && wife_pra_factor <= 1)) throw std::invalid_argument("wife_pra_factor outside [0,1]");
    if (pra.empty()) throw std::invalid_argument("at least one PRA level is required");
    s = 0;
    bool positive = false;
    for (const auto& l : pra) {
      if (!(l.probability >= 0)) throw std::invalid_argument("PRA probability for " + l.name + " is negative");
      if (!(l.level >= 0 && l.level < 1)) throw std::invalid_argument("PRA level for " + l.name + " must lie in [0,1)");
      s += l.probability;
      positive = positive || (l.probability > 0 && l.level > 0);
    }
    if (!near_one(s)) throw std::invalid_argument("PRA probabilities must sum to 1");
    // otherwise blood-compatible pairs never enter the pool
    if (!positive) throw std::invalid_argument("some PRA level with positive probability must have a positive level");
    if (!(floor > 0 && floor <= 1)) throw std::invalid_argument("crossmatch floor must lie in (0,1]");
  }

  /// Canonical key=value text; also the file format read by parse_config.
  std::string serialize() const {
    std::ostringstream os;
    auto num = [](double x) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return std::string(buf);
    };
    for (BloodType t : kBloodTypes) os << "abo." << to_string(t) << " = " << num(abo[static_cast<std::size_t>(t)]) << "\n";
    os << "wife_probability = " << num(wife_probability) << "\n";
    os << "wife_pra_factor = " << num(wife_pra_factor) << "\n";
    std::string names;
    for (const auto& l : pra) names += (names.empty() ? "" : ",") + l.name;
    os << "pra.levels = " << names << "\n";
    for (const auto& l : pra) {
      os << "pra." << l.name << ".probability = " << num(l.probability) << "\n";
      os << "pra." << l.name << ".level = " << num(l.level) << "\n";
    }
    os << "crossmatch.mapping = " << (mapping == CrossmatchMapping::Product ? "product" : "min") << "\n";
    os << "crossmatch.floor = " << num(floor) << "\n";
    return os.str();
  }

  /// FNV-1a over serialize(), as 16 hex digits.
  std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

/// Reads the flat key=value format. '#' starts a comment. Keys absent from the
/// text keep their default; unknown keys are an error.
inline GeneratorConfig parse_config(std::istream& in) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    std::string k = trim(line.substr(0, eq));
    if (kv.count(k)) throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key " + k);
    kv[k] = {trim(line.substr(eq + 1)), lineno};
  }

  GeneratorConfig cfg;
  auto take = [&](const std::string& k) -> std::optional<std::pair<std::string, int>> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  auto number = [&](const std::string& k, double& dst) {
    auto v = take(k);
    if (!v) return;
    std::size_t used = 0;
    try {
      dst = std::stod(v->first, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v->first.size())
      throw std::invalid_argument("config line " + std::to_string(v->second) + ": " + k + " is not a number");
  };

  for (BloodType t : kBloodTypes) number("abo." + std::string(to_string(t)), cfg.abo[static_cast<std::size_t>(t)]);
  number("wife_probability", cfg.wife_probability);
  number("wife_pra_factor", cfg.wife_pra_factor);
  if (auto v = take("pra.levels")) {
    std::vector<PraLevel> levels;
    std::stringstream ss(v->first);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name = trim(name);
      if (name.empty()) throw std::invalid_argument("config line " + std::to_string(v->second) + ": empty PRA level name");
      levels.push_back({name, 0.0, 0.0});
    }
    cfg.pra = std::move(levels);
  }
  for (auto& l : cfg.pra) {
    number("pra." + l.name + ".probability", l.probability);
    number("pra." + l.name + ".level", l.level);
  }
  if (auto v = take("crossmatch.mapping")) {
    if (v->first == "product")
      cfg.mapping = CrossmatchMapping::Product;
    else if (v->first == "min")
      cfg.mapping = CrossmatchMapping::Min;
    else
      throw std::invalid_argument("config line " + std::to_string(v->second) + ": crossmatch.mapping must be product or min");
  }
  number("crossmatch.floor", cfg.floor);
  if (!kv.empty())
    throw std::invalid_argument("config line " + std::to_string(kv.begin()->second.second) + ": unknown key " +
                                kv.begin()->first);
  cfg.validate();
  return cfg;
}

inline GeneratorConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in);
}

struct PatientDonorPair {
  BloodType patient_abo = BloodType::O;
  BloodType donor_abo = BloodType::O;
  bool is_wife = false;
  int pra_level = 0;  // index into GeneratorConfig::pra
  bool internally_compatible = true;

  PairLabel label() const { return {patient_abo, donor_abo}; }
};

/// Chance that the patient's own donor fails the crossmatch.
inline double own_positive_crossmatch(const PatientDonorPair& x, const GeneratorConfig& cfg) {
  const double pra = cfg.pra[static_cast<std::size_t>(x.pra_level)].level;
  return x.is_wife ? 1.0 - cfg.wife_pra_factor * (1.0 - pra) : pra;
}

/// One pair drawn with the four attributes independent, then compatibility
/// drawn conditionally on them. No rejection.
inline PatientDonorPair sample_pair(const GeneratorConfig& cfg, Rng& rng) {
  PatientDonorPair x;
  x.patient_abo = kBloodTypes[rng.pick(cfg.abo)];
  x.donor_abo = kBloodTypes[rng.pick(cfg.abo)];
  x.is_wife = rng.bernoulli(cfg.wife_probability);
  std::vector<double> w;
  for (const auto& l : cfg.pra) w.push_back(l.probability);
  x.pra_level = static_cast<int>(rng.pick(w));
  if (!blood_type_compatible(x.patient_abo, x.donor_abo))
    x.internally_compatible = false;
  else
    x.internally_compatible = !rng.bernoulli(own_positive_crossmatch(x, cfg));
  return x;
}

/// Rejection-samples until the pair is internally incompatible.
inline PatientDonorPair sample_incompatible_pair(const GeneratorConfig& cfg, Rng& rng) {
  while (true) {
    auto x = sample_pair(cfg, rng);
    if (!x.internally_compatible) return x;
  }
}

/// Success probability of the 2-way exchange between u and v: zero unless
/// both patients are blood-type compatible with the other donor, otherwise
/// derived from both PRA levels and clamped below at the floor.
inline double crossmatch_probability(const PatientDonorPair& u, const PatientDonorPair& v, const GeneratorConfig& cfg) {
  if (!blood_type_compatible(u.patient_abo, v.donor_abo) || !blood_type_compatible(v.patient_abo, u.donor_abo)) return 0.0;
  const double a = 1.0 - cfg.pra[static_cast<std::size_t>(u.pra_level)].level;
  const double b = 1.0 - cfg.pra[static_cast<std::size_t>(v.pra_level)].level;
  const double p = cfg.mapping == CrossmatchMapping::Product ? a * b : std::min(a, b);
  return std::clamp(p, cfg.floor, 1.0);
}

struct KidneyInstance {
  Instance instance;
  std::vector<PatientDonorPair> pairs;
};

/// n incompatible pairs as nodes 0..n-1; an edge for every pair of nodes with
/// positive crossmatch probability, in lexicographic (u, v) order.
inline KidneyInstance generate_instance(int n, const GeneratorConfig& cfg, Rng& rng) {
  if (n < 2) throw std::invalid_argument("generate_instance needs n >= 2");
  cfg.validate();
  KidneyInstance out{Instance{WeightedGraph(0, {}), {}}, {}};
  for (int i = 0; i < n; ++i) out.pairs.push_back(sample_incompatible_pair(cfg, rng));
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double p = crossmatch_probability(out.pairs[static_cast<std::size_t>(u)], out.pairs[static_cast<std::size_t>(v)], cfg);
      if (p > 0) edges.push_back({u, v, p});
    }
  out.instance.graph = WeightedGraph(n, edges);
  for (const auto& x : out.pairs) out.instance.labels.push_back(x.label());
  return out;
}

inline KidneyInstance generate_instance(int n, const GeneratorConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return generate_instance(n, cfg, rng);
}

/// Node counts v_{i,j} indexed [patient][donor].
inline std::array<std::array<int, 4>, 4> blood_type_counts(const Instance& inst) {
  std::array<std::array<int, 4>, 4> c{};
  for (const auto& l : inst.labels)
    if (l) ++c[static_cast<std::size_t>(l->patient)][static_cast<std::size_t>(l->donor)];
  return c;
}

}  // namespace qc
