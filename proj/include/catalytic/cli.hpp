#pragma once

// Command implementations behind the `catalytic` tool. Each command writes a
// plain key=value report to `out` and returns the process exit status.

#include "catalytic/coc.hpp"
#include "catalytic/corpus.hpp"
#include "catalytic/machine_format.hpp"
#include "catalytic/verify.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace catalytic {

enum ExitStatus : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_invalid_machine = 2,
  exit_check_failed = 3,
  exit_promise_violation = 4,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<std::string> machine_path;
  std::optional<std::string> corpus_name;
  unsigned cat_len = 4;                  // corpus machines only
  std::vector<std::string> inputs;       // empty: the corpus input set, or "" for files
  std::string tau = "all";               // hex | all | sample:N:seed
  std::optional<std::string> mode;
  std::optional<unsigned> block_bits;    // --set-B
  std::optional<std::uint64_t> bound;    // --set-S
  bool unsafe_small_s = false;
  std::string format = "text";           // text | dot | query
  std::string method = "auto";           // auto | literal | cursor | indexed
  bool trace = false;
};

struct LoadedMachine {
  std::unique_ptr<Machine> machine;
  std::vector<BitString> inputs;
};

inline LoadedMachine load_machine(const RunConfig& cfg) {
  if (cfg.machine_path.has_value() == cfg.corpus_name.has_value())
    throw UsageError("give exactly one of --machine and --corpus");
  MachineSpec spec;
  std::vector<BitString> inputs;
  if (cfg.machine_path) {
    spec = load_machine_file(*cfg.machine_path);
    inputs.push_back(BitString{});
  } else {
    CorpusEntry e;
    try {
      e = corpus_entry(*cfg.corpus_name, cfg.cat_len);
    } catch (const std::invalid_argument& ex) {
      throw UsageError(ex.what());
    }
    spec = std::move(e.spec);
    inputs = std::move(e.inputs);
  }
  if (cfg.mode) {
    auto m = parse_mode(*cfg.mode);
    if (!m) throw UsageError("unknown mode '" + *cfg.mode + "'");
    spec.mode = *m;
  }
  if (!cfg.inputs.empty()) {
    inputs.clear();
    for (const auto& x : cfg.inputs) {
      try {
        inputs.push_back(BitString::parse(x));
      } catch (const std::invalid_argument& ex) {
        throw UsageError(ex.what());
      }
    }
  }
  return {std::make_unique<Machine>(std::move(spec)), std::move(inputs)};
}

// Tape contents selected by --tau. Hex values put bit i in cell i.
inline std::vector<std::uint64_t> select_taus(const std::string& spec, unsigned c, std::ostream* log = nullptr) {
  const std::uint64_t limit = c >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << c) - 1;
  if (spec == "all") {
    if (c > 20) throw UsageError("--tau all needs c <= 20");
    return all_taus(c);
  }
  if (spec.rfind("sample:", 0) == 0) {
    const auto rest = spec.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw UsageError("--tau sample:N:seed");
    std::uint64_t n = 0, seed = 0;
    try {
      n = std::stoull(rest.substr(0, colon));
      seed = std::stoull(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw UsageError("--tau sample:N:seed needs two integers");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, limit);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(pick(rng));
    if (log) *log << "sample: n=" << n << " seed=" << seed << "\n";
    return out;
  }
  std::string hex = spec;
  if (hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0) hex = hex.substr(2);
  std::uint64_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoull(hex, &used, 16);
    if (used != hex.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("bad --tau value '" + spec + "'");
  }
  if (v > limit) throw UsageError("--tau value does not fit c = " + std::to_string(c) + " cells");
  return {v};
}

inline std::string tau_hex(std::uint64_t tau) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  do {
    s.insert(s.begin(), digits[tau & 15]);
    tau >>= 4;
  } while (tau);
  return "0x" + s;
}

inline std::string input_text(const BitString& x) { return x.empty() ? "-" : x.to_string(); }

inline ExploreMethod parse_method(const std::string& m) {
  if (m == "auto") return ExploreMethod::automatic;
  if (m == "literal") return ExploreMethod::pairwise_literal;
  if (m == "cursor") return ExploreMethod::pairwise_cursor;
  if (m == "indexed") return ExploreMethod::indexed;
  throw UsageError("unknown method '" + m + "'");
}

inline DriverOptions driver_options(const RunConfig& cfg, const Instance& inst) {
  DriverOptions opt;
  opt.method = parse_method(cfg.method);
  if (cfg.block_bits || cfg.bound) {
    CocParams p = CocParams::defaults(inst.layout);
    if (cfg.block_bits) {
      p.block_bits = *cfg.block_bits;
      if (p.block_bits > 62) throw UsageError("--set-B must be at most 62");
      if (!cfg.bound) p.bound = std::uint64_t{1} << p.block_bits;
    }
    if (cfg.bound) p.bound = *cfg.bound;
    opt.params = p;
  }
  opt.allow_small_bound = cfg.unsafe_small_s;
  return opt;
}

inline std::string verdict_text(const Verdict& v) {
  std::string s = "verdict=" + std::string(to_string(v.outcome));
  if (v.probability) s += " p=" + v.probability->to_string();
  return s;
}

inline std::string conf_text(const Instance& inst, const Configuration& c) {
  const auto& names = inst.machine->spec().states;
  return names[c.state] + "[in=" + std::to_string(c.input_head) + " wh=" + std::to_string(c.work_head) +
         " ch=" + std::to_string(c.cat_head) + " work=" + BitString::from_word(c.work, inst.layout.work_len).to_string() +
         " cat=" + BitString::from_word(c.cat, inst.layout.cat_len).to_string() + "]";
}

inline void header(std::ostream& out, const std::string& command, const Machine& m) {
  out << "command=" << command << " machine=" << m.spec().name << " mode=" << to_string(m.mode())
      << " s=" << m.work_len() << " c=" << m.cat_len() << " d_M=" << m.degree_bound() << "\n";
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  auto lm = load_machine(cfg);
  const Machine& m = *lm.machine;
  header(out, "validate", m);
  std::uint64_t total = 0, valid = 0;
  for (const auto& x : lm.inputs) {
    const Instance inst(m, x);
    for (std::uint64_t tau : select_taus(cfg.tau, m.cat_len(), &out)) {
      auto r = validate(inst, tau);
      ++total;
      out << "input=" << input_text(x) << " tau=" << tau_hex(tau) << " status=" << to_string(r.kind)
          << " reachable=" << r.reachable;
      if (r.valid()) {
        ++valid;
        out << "\n";
        continue;
      }
      out << " message=\"" << r.message << "\"\n";
      out << "  witness:";
      for (const auto& c : r.witness) out << " " << conf_text(inst, c);
      out << "\n";
    }
  }
  out << "valid: " << valid << "/" << total << "\n";
  return valid == total ? exit_ok : exit_invalid_machine;
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out) {
  auto lm = load_machine(cfg);
  const Machine& m = *lm.machine;
  header(out, "run", m);
  int status = exit_ok;
  for (const auto& x : lm.inputs) {
    const Instance inst(m, x);
    for (std::uint64_t tau : select_taus(cfg.tau, m.cat_len(), &out)) {
      out << "input=" << input_text(x) << " tau=" << tau_hex(tau) << " ";
      try {
        out << verdict_text(brute_semantics(inst, tau)) << "\n";
      } catch (const PromiseViolation& e) {
        out << "verdict=promise-violation p=" << e.probability().to_string() << "\n";
        status = std::max(status, int{exit_promise_violation});
      } catch (const InvalidRun& e) {
        out << "verdict=invalid message=\"" << e.what() << "\"\n";
        status = exit_invalid_machine;
      }
    }
  }
  return status;
}

inline void write_trace(std::ostream& out, const DriverResult& d) {
  for (const auto& r : d.trace) {
    out << "  round=" << r.round << (r.search ? " phase=search" : " phase=blocks") << " tau=" << tau_hex(r.tau)
        << " branch=" << (r.computed ? "compute" : "compress") << " size_accept="
        << (r.size_accept ? std::to_string(*r.size_accept) : "inf")
        << " size_reject=" << (r.size_reject ? std::to_string(*r.size_reject) : "inf")
        << " freed_bits=" << r.freed_bits;
    if (r.computed) out << " query_bits=" << r.query_bits;
    out << "\n";
  }
}

inline std::string explored_graph_dot(const ExploredGraph& g) {
  std::ostringstream os;
  auto id = [](const NodeId& n) { return "\"" + to_string(n) + "\""; };
  os << "digraph explored {\n";
  for (const auto& n : g.nodes) {
    os << "  " << id(n);
    if (n == g.r) os << " [shape=box,label=\"r " << to_string(n) << "\"]";
    else if (n == g.t) os << " [shape=doublecircle,label=\"t " << to_string(n) << "\"]";
    else if (g.rej && n == *g.rej) os << " [shape=octagon,label=\"rej " << to_string(n) << "\"]";
    os << ";\n";
  }
  for (const auto& e : g.edges) os << "  " << id(e.from) << " -> " << id(e.to) << " [label=\"" << label_string(e.labels) << "\"];\n";
  os << "}\n";
  return os.str();
}

inline int cmd_transform(const RunConfig& cfg, std::ostream& out) {
  auto lm = load_machine(cfg);
  const Machine& m = *lm.machine;
  if (cfg.format != "text" && cfg.format != "dot" && cfg.format != "query")
    throw UsageError("unknown format '" + cfg.format + "'");
  const bool text = cfg.format == "text";
  if (text) header(out, "transform", m);
  int status = exit_ok;
  std::uint64_t runs = 0, restored = 0, agree = 0;
  for (const auto& x : lm.inputs) {
    const Instance inst(m, x);
    DriverOptions opt = driver_options(cfg, inst);
    CocParams p;
    try {
      p = resolve_params(inst, opt);
    } catch (const CompletenessError& e) {
      throw UsageError(std::string(e.what()) + " (pass --unsafe-small-s to allow)");
    }
    if (text)
      out << "input=" << input_text(x) << " W=" << inst.layout.extended_width() << " B=" << p.block_bits
          << " S=" << p.bound << " k=" << block_count(inst.layout, m, p.block_bits)
          << " freed_per_round=" << freed_bits_per_round(inst.layout, m, p.block_bits) << "\n";
    for (std::uint64_t tau : select_taus(cfg.tau, m.cat_len(), text ? &out : nullptr)) {
      VirtualTape tape = make_tape(inst, p, tau);
      const VirtualTape before = tape;
      std::string verdict;
      std::optional<DriverResult> d;
      try {
        d = run_driver(inst, tape, opt);
        verdict = verdict_text(d->verdict);
      } catch (const PromiseViolation& e) {
        verdict = "verdict=promise-violation p=" + e.probability().to_string();
        status = std::max(status, int{exit_promise_violation});
      }
      std::string reference;
      try {
        reference = verdict_text(brute_semantics(inst, tau));
      } catch (const PromiseViolation& e) {
        reference = "verdict=promise-violation p=" + e.probability().to_string();
      } catch (const InvalidRun& e) {
        reference = "verdict=invalid";
        status = std::max(status, int{exit_invalid_machine});
      }
      const bool ok = tape == before;
      ++runs;
      restored += ok;
      agree += verdict == reference;
      if (!ok || verdict != reference) status = std::max(status, int{exit_check_failed});
      if (!text) {
        if (d) {
          out << (cfg.format == "dot" ? explored_graph_dot(d->graph) : serialize_query({m.mode(), d->graph}));
          return status;
        }
        continue;
      }
      out << "input=" << input_text(x) << " tau=" << tau_hex(tau) << " " << verdict
          << " restored=" << (ok ? "yes" : "no") << " reference_agrees=" << (verdict == reference ? "yes" : "no");
      if (d)
        out << " compress_rounds=" << d->compress_rounds << " searched=" << (d->searched ? "yes" : "no")
            << " nodes=" << d->graph.nodes.size() << " edges=" << d->graph.edges.size();
      out << "\n";
      if (d && cfg.trace) write_trace(out, *d);
    }
  }
  if (text) {
    out << "agreement with reference: " << agree << "/" << runs << "\n";
    out << "tape restored: " << restored << "/" << runs << "\n";
  }
  return status;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  auto lm = load_machine(cfg);
  const Machine& m = *lm.machine;
  header(out, "verify", m);
  if (m.cat_len() > 16) throw UsageError("verify enumerates every tape; needs c <= 16");
  bool pass = true;
  for (const auto& x : lm.inputs) {
    const Instance inst(m, x);
    for (const auto& r : check_lemmas(inst)) {
      out << format_report(r);
      pass = pass && r.pass;
    }
  }
  DriverOptions opt = driver_options(cfg, Instance(m, lm.inputs.front()));
  try {
    auto sweep = equivalence_sweep(m, lm.inputs, select_taus(cfg.tau, m.cat_len()), opt);
    out << format_report(sweep.report);
    pass = pass && sweep.report.pass;
  } catch (const InvalidRun& e) {
    out << "lemma equivalence\n  result: fail\n  witness: " << e.what() << "\n";
    pass = false;
  } catch (const CompletenessError& e) {
    throw UsageError(std::string(e.what()) + " (pass --unsafe-small-s to allow)");
  }
  out << "overall: " << (pass ? "pass" : "fail") << "\n";
  return pass ? exit_ok : exit_check_failed;
}

// Vertex count of a halting tree from its tour length.
inline std::string component_size(const std::optional<std::uint64_t>& tour) {
  if (!tour) return "inf";
  return std::to_string(*tour == 1 ? 1 : *tour / 2 + 1);
}

inline int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  auto lm = load_machine(cfg);
  const Machine& m = *lm.machine;
  header(out, "stats", m);
  for (const auto& x : lm.inputs) {
    const Instance inst(m, x);
    const DriverOptions opt = driver_options(cfg, inst);
    const CocParams p = opt.params ? *opt.params : CocParams::defaults(inst.layout);
    ZeroGraphView view(inst, p.bound);
    std::map<std::string, std::uint64_t> acc_hist, rej_hist;
    for (std::uint64_t tau : select_taus(cfg.tau, m.cat_len(), &out)) {
      const auto [a, r] = halting_confs(m, tau);
      const auto sa = component_size(tour_size(view, a));
      const auto sr = component_size(tour_size(view, r));
      ++acc_hist[sa];
      ++rej_hist[sr];
      out << "input=" << input_text(x) << " tau=" << tau_hex(tau) << " accept_size=" << sa
          << " reject_size=" << sr << "\n";
    }
    for (const auto& [k, v] : acc_hist) out << "histogram input=" << input_text(x) << " tree=accept size=" << k << " tapes=" << v << "\n";
    for (const auto& [k, v] : rej_hist) out << "histogram input=" << input_text(x) << " tree=reject size=" << k << " tapes=" << v << "\n";
  }
  return exit_ok;
}

inline int cmd_export_dot(const RunConfig& cfg, std::ostream& out) {
  auto lm = load_machine(cfg);
  const Machine& m = *lm.machine;
  const BitString& x = lm.inputs.front();
  const Instance inst(m, x);
  const DriverOptions opt = driver_options(cfg, inst);
  const CocParams p = opt.params ? *opt.params : CocParams::defaults(inst.layout);
  ZeroGraphView view(inst, p.bound);
  for (std::uint64_t tau : select_taus(cfg.tau, m.cat_len())) {
    const auto [a, r] = halting_confs(m, tau);
    out << export_component_dot(view, a, "accept " + tau_hex(tau));
    out << export_component_dot(view, r, "reject " + tau_hex(tau));
  }
  return exit_ok;
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate", "run", "transform", "verify", "stats", "export-dot"};
  return names;
}

// Runs one command, mapping failures to exit statuses.
inline int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (command == "validate") return cmd_validate(cfg, out);
    if (command == "run") return cmd_run(cfg, out);
    if (command == "transform") return cmd_transform(cfg, out);
    if (command == "verify") return cmd_verify(cfg, out);
    if (command == "stats") return cmd_stats(cfg, out);
    if (command == "export-dot") return cmd_export_dot(cfg, out);
    err << "error: unknown command '" << command << "'\n";
    return exit_usage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_machine;
  } catch (const MachineError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_machine;
  } catch (const InvalidRun& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid_machine;
  } catch (const PromiseViolation& e) {
    err << "error: " << e.what() << "\n";
    return exit_promise_violation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace catalytic
