#pragma once

// Exhaustive checkers for the structural facts the reduction relies on,
// and the driver-versus-reference equivalence sweep.
//
// The component checks run on a ComponentSnapshot: an undirected graph with
// halting flags, the two halting roots per tape contents and the set reached
// from start per tape contents. Snapshots come from a machine (the full
// 0-graph of its configuration universe) or are built by hand for negative
// controls.

#include "catalytic/coc.hpp"
#include "catalytic/confgraph.hpp"
#include "catalytic/machine.hpp"
#include "catalytic/semantics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace catalytic {

struct LemmaReport {
  std::string lemma;
  std::string machine;
  std::string parameters;
  bool pass = true;
  std::uint64_t checked = 0;
  std::string witness;                         // replayable failure data
  std::vector<std::pair<std::string, std::string>> facts;  // extra key/value output

  void fail(std::string w) {
    if (pass) witness = std::move(w);
    pass = false;
  }
  void fact(std::string key, std::string value) { facts.emplace_back(std::move(key), std::move(value)); }
};

inline std::string format_report(const LemmaReport& r) {
  std::ostringstream os;
  os << "lemma " << r.lemma << "\n";
  os << "  machine: " << r.machine << "\n";
  os << "  parameters: " << r.parameters << "\n";
  os << "  checked: " << r.checked << "\n";
  for (const auto& [k, v] : r.facts) os << "  " << k << ": " << v << "\n";
  os << "  result: " << (r.pass ? "pass" : "fail") << "\n";
  if (!r.pass) os << "  witness: " << r.witness << "\n";
  return os.str();
}

struct ComponentSnapshot {
  std::size_t vertex_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected
  std::vector<bool> halting;
  std::vector<std::string> names;           // per vertex, for witnesses
  std::function<std::string(std::size_t)> namer;  // used when names is empty
  std::vector<std::size_t> accept_root;     // per tau
  std::vector<std::size_t> reject_root;     // per tau
  std::vector<std::vector<std::size_t>> reached;  // per tau, from start
  unsigned cat_len = 0;
  unsigned extended_width = 0;  // W

  std::size_t add_vertex(std::string name, bool is_halting) {
    names.push_back(std::move(name));
    halting.push_back(is_halting);
    return vertex_count++;
  }
  std::uint64_t tapes() const { return accept_root.size(); }
  std::string name(std::size_t v) const {
    if (v < names.size()) return names[v];
    return namer ? namer(v) : "v" + std::to_string(v);
  }
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void join(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

struct Components {
  std::vector<std::size_t> of;    // vertex -> component representative
  std::vector<std::size_t> size;  // by representative
  std::vector<std::size_t> edges;
  std::vector<std::size_t> halts;

  explicit Components(const ComponentSnapshot& s)
      : of(s.vertex_count), size(s.vertex_count), edges(s.vertex_count), halts(s.vertex_count) {
    UnionFind uf(s.vertex_count);
    for (auto [a, b] : s.edges) uf.join(a, b);
    for (std::size_t v = 0; v < s.vertex_count; ++v) {
      of[v] = uf.find(v);
      ++size[of[v]];
      if (s.halting[v]) ++halts[of[v]];
    }
    for (auto [a, b] : s.edges) ++edges[of[a]];
  }
};

inline std::string describe(const Layout& l, const Configuration& c) {
  return "conf(state=" + std::to_string(c.state) + ",in=" + std::to_string(c.input_head) +
         ",wh=" + std::to_string(c.work_head) + ",ch=" + std::to_string(c.cat_head) +
         ",bits=" + serialize(l, c).to_string() + ")";
}

inline std::uint64_t saturating_pow2(unsigned e) {
  return e >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << e;
}

}  // namespace detail

// Dense numbering of every configuration of an instance.
class ConfigurationIndex {
 public:
  explicit ConfigurationIndex(const Instance& inst)
      : ih_(inst.input_cells()),
        wh_(inst.layout.work_len),
        ch_(inst.layout.cat_len),
        s_(inst.layout.work_len),
        c_(inst.layout.cat_len),
        size_(std::uint64_t{inst.machine->state_count()} * ih_ * wh_ * ch_ << (s_ + c_)) {}

  std::uint64_t size() const { return size_; }

  std::uint64_t operator()(const Configuration& c) const {
    const std::uint64_t v = ((c.state * ih_ + c.input_head) * wh_ + c.work_head) * ch_ + c.cat_head;
    return (((v << s_) | c.work) << c_) | c.cat;
  }

  Configuration decode(std::uint64_t v) const {
    Configuration c;
    c.cat = v & low_mask(c_);
    v >>= c_;
    c.work = v & low_mask(s_);
    v >>= s_;
    c.cat_head = static_cast<std::uint32_t>(v % ch_);
    v /= ch_;
    c.work_head = static_cast<std::uint32_t>(v % wh_);
    v /= wh_;
    c.input_head = static_cast<std::uint32_t>(v % ih_);
    c.state = static_cast<std::uint32_t>(v / ih_);
    return c;
  }

 private:
  std::uint64_t ih_, wh_, ch_;
  unsigned s_, c_;
  std::uint64_t size_;
};

// The whole 0-graph over the configuration universe, built from forward
// 0-steps and numbered by ConfigurationIndex, plus the roots and the sets
// reached from start for every tape.
inline ComponentSnapshot snapshot(const Instance& inst) {
  const Machine& m = *inst.machine;
  const Layout& l = inst.layout;
  if (l.cat_len > 16) throw std::invalid_argument("snapshot needs c <= 16");
  const ConfigurationIndex index(inst);
  const std::uint64_t total = index.size();

  ComponentSnapshot s;
  s.cat_len = l.cat_len;
  s.extended_width = l.extended_width();
  s.vertex_count = static_cast<std::size_t>(total);
  s.halting.resize(s.vertex_count);
  s.namer = [l, index](std::size_t v) { return detail::describe(l, index.decode(v)); };
  for (std::uint64_t v = 0; v < total; ++v) {
    const Configuration c = index.decode(v);
    if (is_halting(inst, c)) {
      s.halting[v] = true;
      continue;
    }
    s.edges.emplace_back(v, index(step(inst, c, 0)));
  }
  for (std::uint64_t tau = 0; tau < (std::uint64_t{1} << l.cat_len); ++tau) {
    s.accept_root.push_back(index(accept_configuration(m, tau)));
    s.reject_root.push_back(index(reject_configuration(m, tau)));
    std::vector<std::size_t> reached;
    for (const Configuration& c : explore_reachable(inst, tau).nodes) reached.push_back(index(c));
    s.reached.push_back(std::move(reached));
  }
  return s;
}

// Components holding a halting vertex are trees with exactly one halting
// vertex.
inline LemmaReport check_tree_facts(const ComponentSnapshot& s) {
  LemmaReport r;
  r.lemma = "tree_facts";
  detail::Components comps(s);
  std::size_t trees = 0;
  for (std::size_t v = 0; v < s.vertex_count; ++v) {
    if (comps.of[v] != v || comps.halts[v] == 0) continue;
    ++trees;
    ++r.checked;
    if (comps.edges[v] + 1 != comps.size[v] || comps.halts[v] != 1) {
      std::size_t halt = v;
      for (std::size_t u = 0; u < s.vertex_count; ++u)
        if (comps.of[u] == v && s.halting[u]) {
          halt = u;
          break;
        }
      r.fail("component of " + s.name(halt) + ": " + std::to_string(comps.size[v]) + " vertices, " +
             std::to_string(comps.edges[v]) + " edges, " + std::to_string(comps.halts[v]) + " halting");
    }
  }
  r.fact("halting components", std::to_string(trees));
  return r;
}

// The accept and reject components of all tapes are pairwise disjoint, and
// so are the sets X(tau) = accept component u reject component u reached
// set, over distinct tapes.
inline LemmaReport check_disjointness(const ComponentSnapshot& s) {
  LemmaReport r;
  r.lemma = "disjointness";
  detail::Components comps(s);
  const std::uint64_t n = s.tapes();
  std::unordered_map<std::size_t, std::pair<std::uint64_t, bool>> root_owner;  // component -> (tau, accept)
  for (std::uint64_t tau = 0; tau < n; ++tau) {
    for (bool acc : {true, false}) {
      const std::size_t c = comps.of[acc ? s.accept_root[tau] : s.reject_root[tau]];
      auto [it, fresh] = root_owner.emplace(c, std::pair{tau, acc});
      ++r.checked;
      if (!fresh)
        r.fail(std::string(acc ? "accept" : "reject") + " component of tau=" + std::to_string(tau) +
               " meets the " + (it->second.second ? "accept" : "reject") + " component of tau=" +
               std::to_string(it->second.first));
    }
  }
  // Vertex ownership by tape for X(tau).
  std::vector<std::optional<std::uint64_t>> owner(s.vertex_count);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> meets;
  for (std::size_t v = 0; v < s.vertex_count; ++v) {
    auto it = root_owner.find(comps.of[v]);
    if (it != root_owner.end()) owner[v] = it->second.first;
  }
  for (std::uint64_t tau = 0; tau < n; ++tau)
    for (std::size_t v : s.reached[tau]) {
      if (!owner[v]) {
        owner[v] = tau;
        continue;
      }
      if (*owner[v] != tau) {
        meets.emplace_back(std::min(tau, *owner[v]), std::max(tau, *owner[v]));
        if (r.pass)
          r.fail("tau=" + std::to_string(tau) + " reaches " + s.name(v) + ", which belongs to tau=" +
                 std::to_string(*owner[v]));
      }
    }
  std::sort(meets.begin(), meets.end());
  meets.erase(std::unique(meets.begin(), meets.end()), meets.end());
  r.fact("intersecting tape pairs", std::to_string(meets.size()));
  return r;
}

// Sum over tapes of each halting component's size is at most 2^(c+W), and
// at least half of the tapes have both components of at most 4 * 2^W
// vertices.
inline LemmaReport check_expectation(const ComponentSnapshot& s) {
  LemmaReport r;
  r.lemma = "expectation";
  detail::Components comps(s);
  const std::uint64_t bound = detail::saturating_pow2(s.cat_len + s.extended_width);
  const std::uint64_t small = detail::saturating_pow2(s.extended_width + 2);
  std::uint64_t sum_acc = 0, sum_rej = 0, good = 0;
  for (std::uint64_t tau = 0; tau < s.tapes(); ++tau) {
    const std::uint64_t a = comps.size[comps.of[s.accept_root[tau]]];
    const std::uint64_t b = comps.size[comps.of[s.reject_root[tau]]];
    sum_acc += a;
    sum_rej += b;
    if (a <= small && b <= small) ++good;
    ++r.checked;
  }
  r.fact("accept sum", std::to_string(sum_acc));
  r.fact("reject sum", std::to_string(sum_rej));
  r.fact("bound 2^(c+W)", std::to_string(bound));
  std::uint64_t in_halting = 0;
  for (std::size_t v = 0; v < s.vertex_count; ++v) in_halting += comps.halts[comps.of[v]] > 0;
  r.fact("vertices in halting components", std::to_string(in_halting));
  r.fact("tapes with both components <= 4*2^W", std::to_string(good) + "/" + std::to_string(s.tapes()));
  if (sum_acc > bound) r.fail("accept sum " + std::to_string(sum_acc) + " > " + std::to_string(bound));
  if (sum_rej > bound) r.fail("reject sum " + std::to_string(sum_rej) + " > " + std::to_string(bound));
  if (2 * good < s.tapes()) r.fail("only " + std::to_string(good) + " good tapes");
  return r;
}

// Everything reached from start lies in the accept or reject component of
// the same tape.
inline LemmaReport check_containment(const ComponentSnapshot& s) {
  LemmaReport r;
  r.lemma = "containment";
  detail::Components comps(s);
  for (std::uint64_t tau = 0; tau < s.tapes(); ++tau) {
    const std::size_t a = comps.of[s.accept_root[tau]];
    const std::size_t b = comps.of[s.reject_root[tau]];
    for (std::size_t v : s.reached[tau]) {
      ++r.checked;
      if (comps.of[v] != a && comps.of[v] != b)
        r.fail("tau=" + std::to_string(tau) + ": reachable " + s.name(v) + " outside both halting components");
    }
  }
  return r;
}

inline std::string describe_instance(const Instance& inst) {
  return inst.machine->spec().name + " x=" + (inst.input.empty() ? std::string("(empty)") : inst.input.to_string());
}

inline std::string describe_parameters(const Instance& inst) {
  const auto& l = inst.layout;
  return "n=" + std::to_string(l.input_len) + " s=" + std::to_string(l.work_len) + " c=" +
         std::to_string(l.cat_len) + " W=" + std::to_string(l.extended_width()) + " tapes=all";
}

inline std::vector<LemmaReport> check_lemmas(const Instance& inst) {
  const ComponentSnapshot s = snapshot(inst);
  std::vector<LemmaReport> out{check_tree_facts(s), check_disjointness(s), check_expectation(s),
                               check_containment(s)};
  for (auto& r : out) {
    r.machine = describe_instance(inst);
    r.parameters = describe_parameters(inst);
  }
  return out;
}

// Per-run outcome of the equivalence sweep.
struct SweepRun {
  BitString input;
  std::uint64_t tau = 0;
  std::string reference;  // "accept", "reject" or "promise-violation"
  std::string driver;
  bool restored = false;
  std::optional<Dyadic> graph_probability;      // random modes
  std::optional<Dyadic> reference_probability;  // random modes
  std::uint64_t query_bits = 0;
  std::size_t compress_rounds = 0;
  bool searched = false;
};

struct SweepResult {
  LemmaReport report;
  std::vector<SweepRun> runs;
  std::uint64_t agreements = 0;
  std::uint64_t restorations = 0;
  std::uint64_t probability_checks = 0;
  std::uint64_t probability_matches = 0;
};

// Runs the driver and the reference semantics on every (input, tau) and
// compares verdicts and the final tape.
inline SweepResult equivalence_sweep(const Machine& m, const std::vector<BitString>& inputs,
                                     const std::vector<std::uint64_t>& taus, const DriverOptions& opt = {}) {
  SweepResult res;
  res.report.lemma = "equivalence";
  res.report.machine = m.spec().name;
  res.report.parameters = "mode=" + std::string(to_string(m.mode())) + " c=" + std::to_string(m.cat_len()) +
                          " inputs=" + std::to_string(inputs.size()) + " tapes=" + std::to_string(taus.size());
  for (const BitString& x : inputs) {
    const Instance inst(m, x);
    const CocParams p = resolve_params(inst, opt);
    for (std::uint64_t tau : taus) {
      SweepRun run;
      run.input = x;
      run.tau = tau;
      try {
        run.reference = std::string(to_string(brute_semantics(inst, tau).outcome));
      } catch (const PromiseViolation&) {
        run.reference = "promise-violation";
      }
      if (is_random(m.mode())) run.reference_probability = reference_probability(inst, tau);
      VirtualTape tape = make_tape(inst, p, tau);
      const VirtualTape before = tape;
      try {
        DriverResult d = run_driver(inst, tape, opt);
        run.driver = std::string(to_string(d.verdict.outcome));
        if (is_random(m.mode())) run.graph_probability = accept_probability(d.graph);
        for (const auto& rec : d.trace) run.query_bits = std::max(run.query_bits, rec.query_bits);
        run.compress_rounds = d.compress_rounds;
        run.searched = d.searched;
      } catch (const PromiseViolation& e) {
        run.driver = "promise-violation";
        run.graph_probability = e.probability();
      }
      run.restored = tape == before;
      ++res.report.checked;
      const bool agree = run.reference == run.driver;
      if (agree) ++res.agreements;
      if (run.restored) ++res.restorations;
      if (run.reference_probability) {
        ++res.probability_checks;
        if (run.graph_probability && *run.graph_probability == *run.reference_probability)
          ++res.probability_matches;
        else
          res.report.fail("x=" + x.to_string() + " tau=" + std::to_string(tau) + ": probability mismatch");
      }
      if (!agree)
        res.report.fail("x=" + x.to_string() + " tau=" + std::to_string(tau) + ": driver " + run.driver +
                        ", reference " + run.reference);
      if (!run.restored)
        res.report.fail("x=" + x.to_string() + " tau=" + std::to_string(tau) + ": tape not restored");
      res.runs.push_back(std::move(run));
    }
  }
  res.report.fact("agreement", std::to_string(res.agreements) + "/" + std::to_string(res.report.checked));
  res.report.fact("tape restored", std::to_string(res.restorations) + "/" + std::to_string(res.report.checked));
  if (res.probability_checks)
    res.report.fact("exact probability matches",
                    std::to_string(res.probability_matches) + "/" + std::to_string(res.probability_checks));
  return res;
}

inline std::vector<std::uint64_t> all_taus(unsigned c) {
  std::vector<std::uint64_t> out(std::size_t{1} << c);
  std::iota(out.begin(), out.end(), std::uint64_t{0});
  return out;
}

}  // namespace catalytic
