#pragma once

// Independent reference computations used as test oracles. None of these
// touch inverse_edges, the rotation map or the driver.

#include "catalytic/corpus.hpp"
#include "catalytic/machine.hpp"
#include "catalytic/verify.hpp"

#include <map>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace catalytic::testing {

// Every configuration of the instance.
inline std::vector<Configuration> universe(const Instance& inst) {
  const Machine& m = *inst.machine;
  const Layout& l = inst.layout;
  std::vector<Configuration> out;
  for (std::uint32_t q = 0; q < m.state_count(); ++q)
    for (std::uint32_t ih = 0; ih < inst.input_cells(); ++ih)
      for (std::uint32_t wh = 0; wh < l.work_len; ++wh)
        for (std::uint32_t ch = 0; ch < l.cat_len; ++ch)
          for (std::uint64_t w = 0; w < (std::uint64_t{1} << l.work_len); ++w)
            for (std::uint64_t c = 0; c < (std::uint64_t{1} << l.cat_len); ++c) out.push_back({q, ih, wh, ch, w, c});
  return out;
}

// Successor by direct table lookup, written independently of step().
inline Configuration apply(const Instance& inst, const Configuration& c, unsigned choice) {
  const Machine& m = *inst.machine;
  const unsigned in = c.input_head < inst.input.size() ? inst.input[c.input_head] : 0;
  const unsigned wb = (c.work >> c.work_head) & 1u;
  const unsigned cb = (c.cat >> c.cat_head) & 1u;
  const ChoiceOutcome& o = (*m.spec().transitions[c.state * 8 + in * 4 + wb * 2 + cb])[choice];
  Configuration n = c;
  n.state = o.next_state;
  n.work = (c.work & ~(std::uint64_t{1} << c.work_head)) | (std::uint64_t{o.work_write} << c.work_head);
  n.cat = (c.cat & ~(std::uint64_t{1} << c.cat_head)) | (std::uint64_t{o.cat_write} << c.cat_head);
  auto mv = [](std::uint32_t h, int d, std::uint32_t len) -> std::uint32_t {
    const long long t = static_cast<long long>(h) + d;
    return (t < 0 || t >= static_cast<long long>(len)) ? h : static_cast<std::uint32_t>(t);
  };
  n.input_head = mv(c.input_head, o.input_move, inst.input_cells());
  n.work_head = mv(c.work_head, o.work_move, inst.layout.work_len);
  n.cat_head = mv(c.cat_head, o.cat_move, inst.layout.cat_len);
  return n;
}

// The 0-graph built from forward 0-steps only: undirected adjacency.
struct ZeroGraph {
  std::unordered_map<Configuration, std::vector<Configuration>, ConfigurationHash> adj;

  explicit ZeroGraph(const Instance& inst) {
    const Machine& m = *inst.machine;
    for (const auto& c : universe(inst)) {
      adj[c];
      if (m.is_halting_state(c.state)) continue;
      Configuration n = apply(inst, c, 0);
      adj[c].push_back(n);
      adj[n].push_back(c);
    }
  }

  std::vector<Configuration> component(const Configuration& root) const {
    std::vector<Configuration> out{root};
    std::unordered_set<Configuration, ConfigurationHash> seen{root};
    for (std::size_t i = 0; i < out.size(); ++i)
      for (const auto& n : adj.at(out[i]))
        if (seen.insert(n).second) out.push_back(n);
    return out;
  }
};

// Size of the 0-graph component of every configuration, numbered by
// ConfigurationIndex, from union-find over forward 0-steps.
inline std::vector<std::uint32_t> component_sizes(const Instance& inst, const ConfigurationIndex& index) {
  const std::size_t n = static_cast<std::size_t>(index.size());
  std::vector<std::uint32_t> parent(n);
  for (std::size_t v = 0; v < n; ++v) parent[v] = static_cast<std::uint32_t>(v);
  auto find = [&](std::uint32_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t v = 0; v < n; ++v) {
    const Configuration c = index.decode(v);
    if (inst.machine->is_halting_state(c.state)) continue;
    parent[find(static_cast<std::uint32_t>(v))] = find(static_cast<std::uint32_t>(index(apply(inst, c, 0))));
  }
  std::vector<std::uint32_t> count(n, 0), out(n);
  for (std::size_t v = 0; v < n; ++v) ++count[find(static_cast<std::uint32_t>(v))];
  for (std::size_t v = 0; v < n; ++v) out[v] = count[find(static_cast<std::uint32_t>(v))];
  return out;
}

// Random machine with `states` states; transitions drawn uniformly.
inline MachineSpec random_spec(std::mt19937_64& rng, unsigned states, unsigned work_len, unsigned cat_len,
                               Mode mode = Mode::nondet) {
  MachineSpec s;
  s.name = "random";
  s.mode = mode;
  s.work_len = work_len;
  s.cat_len = cat_len;
  for (unsigned i = 0; i < states; ++i) s.states.push_back("q" + std::to_string(i));
  s.start = 0;
  s.accept = 1;
  s.reject = 2;
  s.transitions.resize(states * 8);
  std::uniform_int_distribution<int> bit(0, 1), move(-1, 1);
  std::uniform_int_distribution<std::uint32_t> next(0, states - 1);
  for (unsigned q = 0; q < states; ++q) {
    if (q == 1 || q == 2) continue;
    for (unsigned k = 0; k < 8; ++k) {
      OutcomePair p;
      for (auto& o : p) {
        o.next_state = next(rng);
        o.work_write = static_cast<std::uint8_t>(bit(rng));
        o.cat_write = static_cast<std::uint8_t>(bit(rng));
        o.input_move = static_cast<std::int8_t>(move(rng));
        o.work_move = static_cast<std::int8_t>(move(rng));
        o.cat_move = static_cast<std::int8_t>(move(rng));
      }
      if (mode == Mode::deterministic) p[1] = p[0];
      s.transitions[q * 8 + k] = p;
    }
  }
  return s;
}

inline BitString random_input(std::mt19937_64& rng, unsigned n) {
  BitString x;
  for (unsigned i = 0; i < n; ++i) x.push_back(static_cast<unsigned>(rng() & 1u));
  return x;
}

// 4-node undirected reachability from node 0 to node 3 by BFS over the edge
// vector.
inline bool graph_connects_0_3(const BitString& edges) {
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::set<int> seen{0};
  std::vector<int> todo{0};
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int i = 0; i < 6; ++i) {
      if (!edges[i]) continue;
      int a = pairs[i][0], b = pairs[i][1];
      int u = a == v ? b : b == v ? a : -1;
      if (u >= 0 && seen.insert(u).second) todo.push_back(u);
    }
  }
  return seen.count(3) > 0;
}

// Acceptance probability of MAJ3 as (accepting assignments, 2^random bits).
inline std::pair<unsigned, unsigned> majority_fraction(const BitString& x) {
  unsigned random = 0;
  for (unsigned i = 0; i < 3; ++i) random += x[2 * i];
  unsigned good = 0;
  for (unsigned r = 0; r < (1u << random); ++r) {
    unsigned used = 0, ones = 0;
    for (unsigned i = 0; i < 3; ++i) {
      if (x[2 * i]) ones += (r >> used++) & 1u;
      else ones += x[2 * i + 1];
    }
    good += ones >= 2;
  }
  return {good, 1u << random};
}

inline std::vector<std::string> valid_corpus_names() {
  std::vector<std::string> out;
  for (const auto& n : corpus_names())
    if (corpus_entry(n, 2).valid) out.push_back(n);
  return out;
}

// Negative control: one component holding two halting vertices.
inline ComponentSnapshot two_root_snapshot() {
  ComponentSnapshot s;
  s.cat_len = 0;
  s.extended_width = 2;
  const auto a = s.add_vertex("h1", true);
  const auto b = s.add_vertex("x", false);
  const auto c = s.add_vertex("h2", true);
  s.edges = {{a, b}, {b, c}};
  s.accept_root = {a};
  s.reject_root = {c};
  s.reached = {{}};
  return s;
}

// Negative control: c = 1, W = 0, both accept trees have 10 vertices.
inline ComponentSnapshot oversized_snapshot() {
  ComponentSnapshot s;
  s.cat_len = 1;
  s.extended_width = 0;
  auto path = [&](std::size_t n, std::vector<std::size_t>& roots) {
    std::size_t prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = s.add_vertex("v" + std::to_string(s.vertex_count), i + 1 == n);
      if (i > 0) s.edges.emplace_back(prev, v);
      prev = v;
    }
    roots.push_back(prev);
  };
  for (int tau = 0; tau < 2; ++tau) {
    path(10, s.accept_root);
    path(1, s.reject_root);
    s.reached.push_back({});
  }
  return s;
}

}  // namespace catalytic::testing
