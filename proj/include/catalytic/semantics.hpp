#pragma once

// Reference semantics by full exploration of the configuration graph
// reachable from the start configuration.

#include "catalytic/dyadic.hpp"
#include "catalytic/machine.hpp"

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace catalytic {

enum class Outcome { accept, reject };

inline std::string_view to_string(Outcome o) { return o == Outcome::accept ? "accept" : "reject"; }

struct Verdict {
  Outcome outcome = Outcome::reject;
  std::optional<Dyadic> probability;  // random modes only

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

// Bounded-error promise broken: the acceptance probability lies strictly
// between 1/3 and 2/3.
class PromiseViolation : public std::runtime_error {
 public:
  explicit PromiseViolation(Dyadic p)
      : std::runtime_error("acceptance probability " + p.to_string() +
                           " violates the bounded-error promise"),
        probability_(std::move(p)) {}
  const Dyadic& probability() const { return probability_; }

 private:
  Dyadic probability_;
};

// Raised when an operation that requires a valid run is given an invalid one.
class InvalidRun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// bounded-random: accept iff p >= 2/3, reject iff p <= 1/3.
// unbounded-random: accept iff p > 1/2.
inline Verdict verdict_from_probability(Mode mode, const Dyadic& p) {
  Verdict v;
  v.probability = p;
  if (mode == Mode::bounded_random) {
    if (p.compare_fraction(2, 3) >= 0) {
      v.outcome = Outcome::accept;
    } else if (p.compare_fraction(1, 3) <= 0) {
      v.outcome = Outcome::reject;
    } else {
      throw PromiseViolation(p);
    }
  } else {
    v.outcome = p.compare_fraction(1, 2) > 0 ? Outcome::accept : Outcome::reject;
  }
  return v;
}

// The configuration graph reachable from start over tape contents tau.
struct ReachableGraph {
  std::vector<Configuration> nodes;  // discovery order; nodes[0] is start
  std::unordered_map<Configuration, std::size_t, ConfigurationHash> index;
  std::vector<std::vector<std::pair<std::uint8_t, std::size_t>>> successors;
  std::vector<std::size_t> parent;  // BFS tree, parent[0] == 0
  // Sinks first; every node after all of its successors. Covers only the
  // acyclic part when the graph has a cycle.
  std::vector<std::size_t> reverse_topological;
  bool acyclic = true;

  std::vector<Configuration> path_to(std::size_t v) const {
    std::vector<Configuration> path;
    while (true) {
      path.push_back(nodes[v]);
      if (v == 0) break;
      v = parent[v];
    }
    return {path.rbegin(), path.rend()};
  }
};

inline ReachableGraph explore_reachable(const Instance& inst, std::uint64_t tau) {
  ReachableGraph g;
  auto add = [&](const Configuration& c, std::size_t parent) {
    auto [it, inserted] = g.index.emplace(c, g.nodes.size());
    if (inserted) {
      g.nodes.push_back(c);
      g.successors.emplace_back();
      g.parent.push_back(parent);
    }
    return it->second;
  };
  add(start_configuration(*inst.machine, tau), 0);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    Configuration here = g.nodes[v];
    for (const LabeledConf& e : forward_edges(inst, here)) {
      std::size_t u = add(e.conf, v);
      g.successors[v].emplace_back(e.labels, u);
    }
  }
  // Peel sinks off repeatedly.
  std::vector<std::size_t> outdeg(g.nodes.size());
  std::vector<std::vector<std::size_t>> preds(g.nodes.size());
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    outdeg[v] = g.successors[v].size();
    for (auto [l, u] : g.successors[v]) preds[u].push_back(v);
  }
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    if (outdeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop_front();
    g.reverse_topological.push_back(v);
    for (std::size_t p : preds[v])
      if (--outdeg[p] == 0) ready.push_back(p);
  }
  g.acyclic = g.reverse_topological.size() == g.nodes.size();
  return g;
}

struct ValidityReport {
  enum class Kind { valid, cycle, bad_halt, tape_not_restored };
  Kind kind = Kind::valid;
  std::size_t reachable = 0;
  std::string message;
  // For a cycle: a path from start into the cycle followed by one full turn,
  // ending at the repeated configuration. Otherwise: a path from start to the
  // offending sink.
  std::vector<Configuration> witness;

  bool valid() const { return kind == Kind::valid; }
};

inline std::string_view to_string(ValidityReport::Kind k) {
  switch (k) {
    case ValidityReport::Kind::valid: return "valid";
    case ValidityReport::Kind::cycle: return "cycle";
    case ValidityReport::Kind::bad_halt: return "bad-halt";
    case ValidityReport::Kind::tape_not_restored: return "tape-not-restored";
  }
  return "?";
}

inline ValidityReport validate(const Instance& inst, std::uint64_t tau, const ReachableGraph& g) {
  const Machine& m = *inst.machine;
  ValidityReport r;
  r.reachable = g.nodes.size();
  if (!g.acyclic) {
    std::vector<bool> done(g.nodes.size(), false);
    for (auto v : g.reverse_topological) done[v] = true;
    // Every unpeeled node has an unpeeled successor; follow them to a repeat.
    std::size_t v = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (!done[i]) {
        v = i;
        break;
      }
    std::unordered_map<std::size_t, std::size_t> seen;
    std::vector<std::size_t> trail;
    while (!seen.count(v)) {
      seen[v] = trail.size();
      trail.push_back(v);
      for (auto [l, u] : g.successors[v])
        if (!done[u]) {
          v = u;
          break;
        }
    }
    r.kind = ValidityReport::Kind::cycle;
    r.witness = g.path_to(v);
    for (std::size_t i = seen[v] + 1; i < trail.size(); ++i) r.witness.push_back(g.nodes[trail[i]]);
    r.witness.push_back(g.nodes[v]);
    r.message = "reachable cycle of length " + std::to_string(trail.size() - seen[v]);
    return r;
  }
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (!g.successors[v].empty()) continue;
    const Configuration& c = g.nodes[v];
    if (!is_canonical_halt(m, c)) {
      r.kind = ValidityReport::Kind::bad_halt;
      r.message = "halts with heads or work tape not reset";
      r.witness = g.path_to(v);
      return r;
    }
    if (c.cat != tau) {
      r.kind = ValidityReport::Kind::tape_not_restored;
      r.message = "halts with the catalytic tape changed";
      r.witness = g.path_to(v);
      return r;
    }
  }
  return r;
}

inline ValidityReport validate(const Instance& inst, std::uint64_t tau) {
  return validate(inst, tau, explore_reachable(inst, tau));
}

// Exact acceptance probability of every reachable node, indexed like
// g.nodes: p(accept) = 1, p(reject) = 0, p(v) = (p(succ0) + p(succ1)) / 2.
inline std::vector<Dyadic> acceptance_probabilities(const Machine& m, const ReachableGraph& g) {
  if (!g.acyclic) throw InvalidRun("acceptance probability needs an acyclic graph");
  std::vector<Dyadic> p(g.nodes.size());
  for (std::size_t v : g.reverse_topological) {
    if (g.successors[v].empty()) {
      p[v] = g.nodes[v].state == m.spec().accept ? Dyadic::one() : Dyadic::zero();
      continue;
    }
    const Dyadic* s0 = nullptr;
    const Dyadic* s1 = nullptr;
    for (auto [labels, u] : g.successors[v]) {
      if (labels & label_zero) s0 = &p[u];
      if (labels & label_one) s1 = &p[u];
    }
    p[v] = Dyadic::average(*s0, *s1);
  }
  return p;
}

inline Dyadic reference_probability(const Instance& inst, std::uint64_t tau) {
  auto g = explore_reachable(inst, tau);
  return acceptance_probabilities(*inst.machine, g)[0];
}

// Reference verdict in the given mode. Requires a valid run.
inline Verdict brute_semantics(const Instance& inst, std::uint64_t tau, Mode mode) {
  const Machine& m = *inst.machine;
  auto g = explore_reachable(inst, tau);
  auto report = validate(inst, tau, g);
  if (!report.valid()) throw InvalidRun("invalid run: " + report.message);
  const bool accept_reachable = g.index.count(accept_configuration(m, tau)) > 0;
  const bool reject_reachable = g.index.count(reject_configuration(m, tau)) > 0;
  switch (mode) {
    case Mode::deterministic:
    case Mode::nondet:
      return {accept_reachable ? Outcome::accept : Outcome::reject, std::nullopt};
    case Mode::co_nondet:
      return {reject_reachable ? Outcome::reject : Outcome::accept, std::nullopt};
    case Mode::bounded_random:
    case Mode::unbounded_random:
      return verdict_from_probability(mode, acceptance_probabilities(m, g)[0]);
  }
  return {};
}

inline Verdict brute_semantics(const Instance& inst, std::uint64_t tau) {
  return brute_semantics(inst, tau, inst.machine->mode());
}

// Follows choice 0 from start until a halting configuration. Gives up after
// `max_steps`.
inline std::optional<Configuration> simulate_path(const Instance& inst, std::uint64_t tau,
                                                  std::uint64_t max_steps = 1u << 24) {
  Configuration c = start_configuration(*inst.machine, tau);
  for (std::uint64_t i = 0; i < max_steps; ++i) {
    if (is_halting(inst, c)) return c;
    c = step(inst, c, 0);
  }
  return std::nullopt;
}

}  // namespace catalytic
