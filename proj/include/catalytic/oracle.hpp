#pragma once

// Decision procedures on explored graphs, one per resource mode.

#include "catalytic/dyadic.hpp"
#include "catalytic/explored_graph.hpp"
#include "catalytic/semantics.hpp"

#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace catalytic {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Adjacency {
  std::vector<std::vector<std::pair<std::uint8_t, std::size_t>>> out;

  explicit Adjacency(const ExploredGraph& g) : out(g.nodes.size()) {
    for (const auto& e : g.edges) out[position(g, e.from)].emplace_back(e.labels, position(g, e.to));
  }

  static std::size_t position(const ExploredGraph& g, const NodeId& n) {
    auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), n);
    if (it == g.nodes.end() || *it != n) throw OracleError("unknown node " + to_string(n));
    return static_cast<std::size_t>(it - g.nodes.begin());
  }
};

}  // namespace detail

// Directed reachability, labels ignored.
inline bool reachable(const ExploredGraph& g, const NodeId& a, const NodeId& b) {
  detail::Adjacency adj(g);
  const std::size_t from = detail::Adjacency::position(g, a);
  const std::size_t to = detail::Adjacency::position(g, b);
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (auto [l, u] : adj.out[v])
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
  }
  return false;
}

// Exact acceptance probability from `from`: p(t) = 1, p(rej) = 0 and
// p(v) = (p(succ0) + p(succ1)) / 2 elsewhere.
inline Dyadic accept_probability(const ExploredGraph& g, const NodeId& from) {
  detail::Adjacency adj(g);
  const std::size_t t = detail::Adjacency::position(g, g.t);
  const std::optional<std::size_t> rej =
      g.rej ? std::optional<std::size_t>(detail::Adjacency::position(g, *g.rej)) : std::nullopt;
  enum : std::uint8_t { unseen, open, done };
  std::vector<std::uint8_t> state(g.nodes.size(), unseen);
  std::vector<Dyadic> p(g.nodes.size());
  struct Frame {
    std::size_t v;
    bool expanded;
  };
  std::vector<Frame> stack{{detail::Adjacency::position(g, from), false}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    const std::size_t v = f.v;
    if (state[v] == done) {
      stack.pop_back();
      continue;
    }
    if (v == t || (rej && v == *rej)) {
      p[v] = v == t ? Dyadic::one() : Dyadic::zero();
      state[v] = done;
      stack.pop_back();
      continue;
    }
    if (!f.expanded) {
      if (state[v] == open) throw OracleError("cycle through " + to_string(g.nodes[v]));
      state[v] = open;
      f.expanded = true;
      for (auto [l, u] : adj.out[v]) {
        if (state[u] == open) throw OracleError("cycle through " + to_string(g.nodes[u]));
        if (state[u] == unseen) stack.push_back({u, false});
      }
      continue;
    }
    const Dyadic* s0 = nullptr;
    const Dyadic* s1 = nullptr;
    for (auto [l, u] : adj.out[v]) {
      if (l & label_zero) s0 = &p[u];
      if (l & label_one) s1 = &p[u];
    }
    if (!s0 || !s1) throw OracleError("missing labeled successor at " + to_string(g.nodes[v]));
    p[v] = Dyadic::average(*s0, *s1);
    state[v] = done;
    stack.pop_back();
  }
  return p[detail::Adjacency::position(g, from)];
}

inline Dyadic accept_probability(const ExploredGraph& g) { return accept_probability(g, g.r); }

// Mode-specific decision. Bounded-random queries whose probability lies in
// (1/3, 2/3) raise PromiseViolation.
inline Verdict decide(const OracleQuery& q) {
  const auto& g = q.graph;
  switch (q.mode) {
    case Mode::deterministic:
    case Mode::nondet:
      return {reachable(g, g.r, g.t) ? Outcome::accept : Outcome::reject, std::nullopt};
    case Mode::co_nondet: {
      const bool rej = g.rej && g.contains(*g.rej) && reachable(g, g.r, *g.rej);
      return {rej ? Outcome::reject : Outcome::accept, std::nullopt};
    }
    case Mode::bounded_random:
    case Mode::unbounded_random:
      return verdict_from_probability(q.mode, accept_probability(g));
  }
  return {};
}

}  // namespace catalytic
