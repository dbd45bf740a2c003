#pragma once

#include "catalytic/bits.hpp"
#include "catalytic/machine.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace catalytic {

// Canonical index (i, b): the configuration first reached on an index-0 edge
// after i steps of the Euler tour from the accept (b = 0) or reject (b = 1)
// root.
struct NodeId {
  std::uint64_t index = 0;
  std::uint8_t tour = 0;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId& a, const NodeId& b) {
    if (auto c = a.tour <=> b.tour; c != 0) return c;
    return a.index <=> b.index;
  }
};

inline std::string to_string(const NodeId& n) {
  return "(" + std::to_string(n.index) + "," + std::to_string(int{n.tour}) + ")";
}

struct ExploredEdge {
  NodeId from;
  NodeId to;
  std::uint8_t labels = 0;

  friend bool operator==(const ExploredEdge&, const ExploredEdge&) = default;
};

// Output of the compute branch: a labeled digraph over canonical indices in
// [S] x [2], stored sparsely.
struct ExploredGraph {
  std::uint64_t bound = 0;  // S
  std::vector<NodeId> nodes;
  std::vector<ExploredEdge> edges;
  NodeId r;
  NodeId t;
  std::optional<NodeId> rej;

  friend bool operator==(const ExploredGraph&, const ExploredGraph&) = default;

  bool contains(const NodeId& n) const { return std::binary_search(nodes.begin(), nodes.end(), n); }

  void canonicalize() {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::sort(edges.begin(), edges.end(), [](const ExploredEdge& a, const ExploredEdge& b) {
      if (a.from != b.from) return a.from < b.from;
      return a.to < b.to;
    });
  }
};

struct OracleQuery {
  Mode mode = Mode::nondet;
  ExploredGraph graph;

  friend bool operator==(const OracleQuery&, const OracleQuery&) = default;
};

// Length of the query written in binary: every node id takes
// bits_for(2S) bits, every edge two ids plus two label bits, plus r, t, rej
// and a 3-bit mode tag.
inline std::uint64_t query_bits(const ExploredGraph& g) {
  const std::uint64_t id_bits = bits_for(g.bound) + 1;
  return 3 + g.nodes.size() * id_bits + g.edges.size() * (2 * id_bits + 2) + 3 * id_bits + 1;
}

// Stable text form, see docs/query-format.md.
inline std::string serialize_query(const OracleQuery& q) {
  std::ostringstream os;
  const auto& g = q.graph;
  auto id = [](const NodeId& n) { return std::to_string(n.index) + " " + std::to_string(int{n.tour}); };
  os << "query 1\n";
  os << "mode " << to_string(q.mode) << "\n";
  os << "bound " << g.bound << "\n";
  os << "nodes " << g.nodes.size() << "\n";
  for (const auto& n : g.nodes) os << "node " << id(n) << "\n";
  os << "edges " << g.edges.size() << "\n";
  for (const auto& e : g.edges) os << "edge " << id(e.from) << " " << id(e.to) << " " << label_string(e.labels) << "\n";
  os << "r " << id(g.r) << "\n";
  os << "t " << id(g.t) << "\n";
  if (g.rej) {
    os << "rej " << id(*g.rej) << "\n";
  } else {
    os << "rej none\n";
  }
  os << "end\n";
  return os.str();
}

inline OracleQuery parse_query(const std::string& text) {
  std::istringstream in(text);
  OracleQuery q;
  auto fail = [](const std::string& why) -> void { throw std::runtime_error("query: " + why); };
  std::string word;
  auto expect = [&](const std::string& w) {
    if (!(in >> word) || word != w) fail("expected '" + w + "'");
  };
  auto read_id = [&]() {
    std::uint64_t i = 0;
    int b = 0;
    if (!(in >> i >> b) || (b != 0 && b != 1)) fail("bad node id");
    return NodeId{i, static_cast<std::uint8_t>(b)};
  };
  expect("query");
  int version = 0;
  if (!(in >> version) || version != 1) fail("unsupported version");
  expect("mode");
  in >> word;
  auto m = parse_mode(word);
  if (!m) fail("unknown mode");
  q.mode = *m;
  expect("bound");
  in >> q.graph.bound;
  expect("nodes");
  std::size_t n = 0;
  in >> n;
  for (std::size_t i = 0; i < n; ++i) {
    expect("node");
    q.graph.nodes.push_back(read_id());
  }
  expect("edges");
  std::size_t e = 0;
  in >> e;
  for (std::size_t i = 0; i < e; ++i) {
    expect("edge");
    ExploredEdge edge;
    edge.from = read_id();
    edge.to = read_id();
    in >> word;
    if (word == "0") edge.labels = label_zero;
    else if (word == "1") edge.labels = label_one;
    else if (word == "01") edge.labels = label_both;
    else fail("bad label set");
    q.graph.edges.push_back(edge);
  }
  expect("r");
  q.graph.r = read_id();
  expect("t");
  q.graph.t = read_id();
  expect("rej");
  std::streampos mark = in.tellg();
  if (!(in >> word)) fail("missing rej");
  if (word != "none") {
    in.seekg(mark);
    q.graph.rej = read_id();
  }
  expect("end");
  return q;
}

}  // namespace catalytic
