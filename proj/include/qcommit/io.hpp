#pragma once

// The qc-graph text format:
//
//   qc-graph 1
//   nodes <n>
//   edge <u> <v> <p>          u, v in 0..n-1, p in (0,1]
//   label <node> <P>/<D>      optional patient/donor blood types
//
// '#' starts a comment; blank lines are ignored.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcommit/labels.hpp"

namespace qc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

inline Instance parse_instance(std::istream& in, const std::string& source = "<input>") {
  std::string raw;
  int lineno = 0;
  bool header = false;
  int n = -1;
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> seen;
  std::vector<std::optional<PairLabel>> labels;
  bool any_label = false;

  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (auto c = line.find('#'); c != std::string_view::npos) line = line.substr(0, c);
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& what) { throw ParseError(source, lineno, what); };
    auto arity = [&](std::size_t k) {
      if (tok.size() != k)
        fail("'" + std::string(tok[0]) + "' takes " + std::to_string(k - 1) + " arguments, got " + std::to_string(tok.size() - 1));
    };
    auto node = [&](std::string_view s) {
      int x;
      if (!detail::parse_number(s, x)) fail("bad node id '" + std::string(s) + "'");
      if (x < 0 || x >= n) fail("node " + std::string(s) + " outside 0.." + std::to_string(n - 1));
      return x;
    };

    if (!header) {
      if (tok[0] != "qc-graph") fail("expected header 'qc-graph 1'");
      arity(2);
      if (tok[1] != "1") fail("unsupported qc-graph version " + std::string(tok[1]));
      header = true;
    } else if (tok[0] == "nodes") {
      arity(2);
      if (n >= 0) fail("'nodes' given twice");
      if (!detail::parse_number(tok[1], n) || n < 0) fail("bad node count '" + std::string(tok[1]) + "'");
      labels.assign(static_cast<std::size_t>(n), std::nullopt);
    } else if (tok[0] == "edge") {
      arity(4);
      if (n < 0) fail("'edge' before 'nodes'");
      int u = node(tok[1]), v = node(tok[2]);
      double p;
      if (!detail::parse_number(tok[3], p)) fail("bad probability '" + std::string(tok[3]) + "'");
      if (!(p > 0 && p <= 1)) fail("probability " + std::string(tok[3]) + " outside (0,1]");
      if (u == v) fail("self-loop at node " + std::to_string(u));
      if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
        fail("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
      edges.push_back({u, v, p});
    } else if (tok[0] == "label") {
      arity(3);
      if (n < 0) fail("'label' before 'nodes'");
      const int x = node(tok[1]);
      auto l = parse_pair_label(tok[2]);
      if (!l) fail("bad label '" + std::string(tok[2]) + "', expected <patient>/<donor> with types O, A, B, AB");
      if (labels[static_cast<std::size_t>(x)]) fail("node " + std::to_string(x) + " labelled twice");
      labels[static_cast<std::size_t>(x)] = *l;
      any_label = true;
    } else {
      fail("unknown directive '" + std::string(tok[0]) + "'");
    }
  }
  if (!header) throw ParseError(source, lineno, "empty input, expected header 'qc-graph 1'");
  if (n < 0) throw ParseError(source, lineno, "missing 'nodes' line");
  if (!any_label) labels.clear();
  return Instance{WeightedGraph(n, std::move(edges)), std::move(labels)};
}

inline Instance parse_instance_text(const std::string& text, const std::string& source = "<input>") {
  std::istringstream in(text);
  return parse_instance(in, source);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  return parse_instance(in, path);
}

/// Probabilities are printed with 17 significant digits, so a file read back
/// gives the identical graph.
inline void write_instance(std::ostream& os, const Instance& inst) {
  const auto& g = inst.graph;
  os << "qc-graph 1\nnodes " << g.node_count() << "\n";
  char buf[40];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.p);
    os << "edge " << e.u << " " << e.v << " " << buf << "\n";
  }
  for (std::size_t x = 0; x < inst.labels.size(); ++x)
    if (inst.labels[x]) os << "label " << x << " " << to_string(*inst.labels[x]) << "\n";
}

inline std::string to_text(const Instance& inst) {
  std::ostringstream os;
  write_instance(os, inst);
  return os.str();
}

}  // namespace qc
