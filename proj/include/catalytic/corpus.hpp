#pragma once

// Built-in machines. Every builder takes the catalytic length c so the same
// machine can be swept over several tape sizes; the work tape has 3 cells,
// so c <= 8.

#include "catalytic/machine.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace catalytic {

class SpecBuilder {
 public:
  SpecBuilder(std::string name, Mode mode, unsigned work_len, unsigned cat_len) {
    spec_.name = std::move(name);
    spec_.mode = mode;
    spec_.work_len = work_len;
    spec_.cat_len = cat_len;
    spec_.start = state("start");
    spec_.accept = state("accept");
    spec_.reject = state("reject");
  }

  // Index of a named state, created on first use.
  std::uint32_t state(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const auto q = static_cast<std::uint32_t>(spec_.states.size());
    spec_.states.push_back(name);
    spec_.transitions.resize(spec_.states.size() * 8);
    index_.emplace(name, q);
    return q;
  }

  // Sets all eight keys of q from f(input, work, cat).
  void on(std::uint32_t q, const std::function<OutcomePair(unsigned, unsigned, unsigned)>& f) {
    for (unsigned in = 0; in < 2; ++in)
      for (unsigned w = 0; w < 2; ++w)
        for (unsigned c = 0; c < 2; ++c) spec_.transitions[transition_slot(q, in, w, c)] = f(in, w, c);
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  MachineSpec build() const { return spec_; }

 private:
  MachineSpec spec_;
  std::map<std::string, std::uint32_t> index_;
};

// Outcome that keeps the scanned work and catalytic bits.
inline ChoiceOutcome keep(std::uint32_t next, unsigned work, unsigned cat, int in_move = 0, int work_move = 0,
                          int cat_move = 0) {
  return {next, static_cast<std::uint8_t>(work), static_cast<std::uint8_t>(cat), static_cast<std::int8_t>(in_move),
          static_cast<std::int8_t>(work_move), static_cast<std::int8_t>(cat_move)};
}

inline OutcomePair both(const ChoiceOutcome& o) { return {o, o}; }

inline constexpr unsigned corpus_work_len = 3;

// start -> accept on every key; nothing moves, nothing is written.
inline MachineSpec make_identity(unsigned c, Mode mode = Mode::deterministic) {
  SpecBuilder b("M_id", mode, corpus_work_len, c);
  const auto acc = b.state("accept");
  b.on(b.state("start"), [&](unsigned, unsigned w, unsigned x) { return both(keep(acc, w, x)); });
  return b.build();
}

// Flips catalytic cell 0, flips it back, then accepts iff input cell 0 is 1.
inline MachineSpec make_flip(unsigned c) {
  SpecBuilder b("M_flip", Mode::deterministic, corpus_work_len, c);
  const auto f = b.state("F");
  const auto acc = b.state("accept");
  const auto rej = b.state("reject");
  b.on(b.state("start"), [&](unsigned, unsigned w, unsigned x) { return both(keep(f, w, 1 - x)); });
  b.on(f, [&](unsigned in, unsigned w, unsigned x) { return both(keep(in ? acc : rej, w, 1 - x)); });
  return b.build();
}

// Choice 0 accepts, choice 1 rejects.
inline MachineSpec make_coin(unsigned c) {
  SpecBuilder b("COIN", Mode::unbounded_random, corpus_work_len, c);
  const auto acc = b.state("accept");
  const auto rej = b.state("reject");
  b.on(b.state("start"), [&](unsigned, unsigned w, unsigned x) {
    return OutcomePair{keep(acc, w, x), keep(rej, w, x)};
  });
  return b.build();
}

// Position of the bit for undirected edge {a, b} of a 4-node graph.
inline unsigned stconn_edge_index(unsigned a, unsigned b) {
  if (a > b) std::swap(a, b);
  static constexpr unsigned table[4][4] = {{0, 0, 1, 2}, {0, 0, 3, 4}, {1, 3, 0, 5}, {2, 4, 5, 0}};
  if (a == b || b > 3) throw std::invalid_argument("not an edge of the 4-node graph");
  return table[a][b];
}

// Guesses a walk of at most three edges from node 0 and accepts when it
// reaches node 3. The input is the 6-bit edge vector of an undirected graph
// on nodes {0,1,2,3}. Each guess takes two choice bits (low, high); the head
// then walks to the edge bit and reads it. Halting returns the input head to
// cell 0 first. With `complement` the halting roles are swapped.
inline MachineSpec make_stconn(unsigned c, bool complement) {
  SpecBuilder b(complement ? "CO-ND-STCONN" : "ND-STCONN", complement ? Mode::co_nondet : Mode::nondet,
                corpus_work_len, c);
  const auto yes = b.state(complement ? "reject" : "accept");
  const auto no = b.state(complement ? "accept" : "reject");
  auto name = [](const std::string& kind, std::initializer_list<unsigned> xs) {
    std::string s = kind;
    for (unsigned x : xs) s += "_" + std::to_string(x);
    return s;
  };
  auto ret = [&](bool found, unsigned pos) -> std::uint32_t {
    if (pos == 0) return found ? yes : no;
    return b.state(name(found ? "RETY" : "RETN", {pos}));
  };
  // Return states move left one cell at a time.
  for (unsigned pos = 1; pos < 6; ++pos)
    for (bool found : {false, true}) {
      const auto to = ret(found, pos - 1);
      b.on(ret(found, pos), [&](unsigned, unsigned w, unsigned x) { return both(keep(to, w, x, -1)); });
    }
  std::function<std::uint32_t(unsigned, unsigned, unsigned)> guess1;
  // Seek(k, next, target, pos): walk to the edge bit, then test it.
  std::function<std::uint32_t(unsigned, unsigned, unsigned, unsigned)> seek =
      [&](unsigned k, unsigned next, unsigned target, unsigned pos) -> std::uint32_t {
    const std::string n = name("SEEK", {k, next, target, pos});
    if (b.has(n)) return b.state(n);
    const auto q = b.state(n);
    if (pos != target) {
      const int dir = pos < target ? 1 : -1;
      const auto to = seek(k, next, target, pos + dir);
      b.on(q, [&](unsigned, unsigned w, unsigned x) { return both(keep(to, w, x, dir)); });
      return q;
    }
    const auto on_missing = ret(false, pos);
    const auto on_edge = next == 3 ? ret(true, pos) : (k + 1 == 3 ? ret(false, pos) : guess1(k + 1, next, pos));
    b.on(q, [&](unsigned in, unsigned w, unsigned x) { return both(keep(in ? on_edge : on_missing, w, x)); });
    return q;
  };
  std::map<std::tuple<unsigned, unsigned, unsigned>, std::uint32_t> g1_done;
  guess1 = [&](unsigned k, unsigned cur, unsigned pos) -> std::uint32_t {
    auto key = std::make_tuple(k, cur, pos);
    if (auto it = g1_done.find(key); it != g1_done.end()) return it->second;
    const auto q = (k == 0 && cur == 0 && pos == 0) ? b.state("start") : b.state(name("G1", {k, cur, pos}));
    g1_done.emplace(key, q);
    std::array<std::uint32_t, 2> second{};
    for (unsigned lo = 0; lo < 2; ++lo) {
      const auto q2 = b.state(name("G2", {k, cur, pos, lo}));
      second[lo] = q2;
      std::array<std::uint32_t, 2> after{};
      for (unsigned hi = 0; hi < 2; ++hi) {
        const unsigned next = 2 * hi + lo;
        after[hi] = next == cur ? ret(false, pos) : seek(k, next, stconn_edge_index(cur, next), pos);
      }
      b.on(q2, [&](unsigned, unsigned w, unsigned x) { return OutcomePair{keep(after[0], w, x), keep(after[1], w, x)}; });
    }
    b.on(q, [&](unsigned, unsigned w, unsigned x) { return OutcomePair{keep(second[0], w, x), keep(second[1], w, x)}; });
    return q;
  };
  guess1(0, 0, 0);
  return b.build();
}

// Reads three (flag, value) pairs. A set flag replaces the value with a
// random bit. Accepts iff at least two of the three bits are 1.
inline MachineSpec make_majority(unsigned c) {
  SpecBuilder b("MAJ3", Mode::bounded_random, corpus_work_len, c);
  auto ret = [&](bool ok, unsigned pos) -> std::uint32_t {
    if (pos == 0) return b.state(ok ? "accept" : "reject");
    return b.state(std::string(ok ? "RETY_" : "RETN_") + std::to_string(pos));
  };
  for (unsigned pos = 1; pos < 6; ++pos)
    for (bool ok : {false, true}) {
      const auto to = ret(ok, pos - 1);
      b.on(ret(ok, pos), [&](unsigned, unsigned w, unsigned x) { return both(keep(to, w, x, -1)); });
    }
  // After bit i is known with running count `cnt`: the state at cell 2i+1.
  auto after_bit = [&](unsigned i, unsigned cnt) -> std::pair<std::uint32_t, int> {
    if (i == 2) return {ret(cnt >= 2, 5), 0};
    return {b.state("FLAG_" + std::to_string(i + 1) + "_" + std::to_string(cnt)), 1};
  };
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned cnt = 0; cnt <= i; ++cnt) {
      const auto flag = i == 0 ? b.state("start") : b.state("FLAG_" + std::to_string(i) + "_" + std::to_string(cnt));
      const auto value = b.state("VALUE_" + std::to_string(i) + "_" + std::to_string(cnt));
      const auto skip = b.state("SKIP_" + std::to_string(i) + "_" + std::to_string(cnt));
      const auto skip1 = b.state("SKIP_" + std::to_string(i) + "_" + std::to_string(cnt + 1));
      b.on(flag, [&](unsigned in, unsigned w, unsigned x) {
        if (!in) return both(keep(value, w, x, 1));
        return OutcomePair{keep(skip, w, x, 1), keep(skip1, w, x, 1)};
      });
      const auto [v0, mv0] = after_bit(i, cnt);
      const auto [v1, mv1] = after_bit(i, cnt + 1);
      b.on(value, [&](unsigned in, unsigned w, unsigned x) { return both(in ? keep(v1, w, x, mv1) : keep(v0, w, x, mv0)); });
    }
  // SKIP_i_n: the random bit is already counted; step past the value cell.
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned n = 0; n <= i + 1; ++n) {
      const auto q = b.state("SKIP_" + std::to_string(i) + "_" + std::to_string(n));
      const auto [to, mv] = after_bit(i, n);
      b.on(q, [&](unsigned, unsigned w, unsigned x) { return both(keep(to, w, x, mv)); });
    }
  return b.build();
}

// start -> C1 -> ... -> C(m-2) -> accept, so the accept tree is a path of m
// vertices. `chain_states` (>= m - 2) fixes the state count; unused chain
// states loop on themselves, so the layout and d_M do not depend on m.
inline MachineSpec make_chain(unsigned c, unsigned m, unsigned chain_states) {
  if (m < 2) throw std::invalid_argument("chain needs at least 2 vertices");
  if (chain_states < m - 2) throw std::invalid_argument("not enough chain states");
  SpecBuilder b("CHAIN", Mode::deterministic, corpus_work_len, c);
  const auto acc = b.state("accept");
  b.state("reject");
  std::vector<std::uint32_t> chain;
  for (unsigned i = 1; i <= chain_states; ++i) chain.push_back(b.state("C" + std::to_string(i)));
  auto link = [&](std::uint32_t from, std::uint32_t to) {
    b.on(from, [&](unsigned, unsigned w, unsigned x) { return both(keep(to, w, x)); });
  };
  std::uint32_t prev = b.state("start");
  for (unsigned i = 0; i + 2 < m; ++i) {
    link(prev, chain[i]);
    prev = chain[i];
  }
  link(prev, acc);
  for (unsigned i = m - 2; i < chain_states; ++i) link(chain[i], chain[i]);
  return b.build();
}

// Accepts at once when catalytic cell 0 is 0; otherwise walks a chain of
// `length` states to accept. Chain states that read a 0 step the work head
// and reject, which never reaches the normalized reject configuration.
inline MachineSpec make_catchain(unsigned c, unsigned length) {
  SpecBuilder b("CATCHAIN", Mode::deterministic, corpus_work_len, c);
  const auto acc = b.state("accept");
  const auto rej = b.state("reject");
  std::vector<std::uint32_t> chain;
  for (unsigned i = 1; i <= length; ++i) chain.push_back(b.state("K" + std::to_string(i)));
  b.on(b.state("start"), [&](unsigned, unsigned w, unsigned x) {
    return both(keep(x ? chain.front() : acc, w, x));
  });
  for (unsigned i = 0; i < length; ++i) {
    const auto to = i + 1 < length ? chain[i + 1] : acc;
    b.on(chain[i], [&](unsigned, unsigned w, unsigned x) {
      return both(x ? keep(to, w, x) : keep(rej, w, x, 0, 1));
    });
  }
  return b.build();
}

// start <-> A forever.
inline MachineSpec make_invalid_loop(unsigned c) {
  SpecBuilder b("INVALID-LOOP", Mode::deterministic, corpus_work_len, c);
  const auto s = b.state("start");
  const auto a = b.state("A");
  b.on(s, [&](unsigned, unsigned w, unsigned x) { return both(keep(a, w, x)); });
  b.on(a, [&](unsigned, unsigned w, unsigned x) { return both(keep(s, w, x)); });
  return b.build();
}

// Accepts after flipping catalytic cell 0, leaving the tape changed.
inline MachineSpec make_invalid_tape(unsigned c) {
  SpecBuilder b("INVALID-TAPE", Mode::deterministic, corpus_work_len, c);
  const auto acc = b.state("accept");
  b.on(b.state("start"), [&](unsigned, unsigned w, unsigned x) { return both(keep(acc, w, 1 - x)); });
  return b.build();
}

struct CorpusEntry {
  MachineSpec spec;
  std::vector<BitString> inputs;  // fixed input set
  bool valid = true;
  std::string summary;
};

inline std::vector<BitString> all_inputs(unsigned n) {
  std::vector<BitString> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    BitString s;
    for (unsigned i = 0; i < n; ++i) s.push_back(static_cast<unsigned>((v >> i) & 1u));
    out.push_back(s);
  }
  return out;
}

inline std::vector<BitString> parse_inputs(std::initializer_list<const char*> xs) {
  std::vector<BitString> out;
  for (const char* x : xs) out.push_back(BitString::parse(x));
  return out;
}

// MAJ3 input with acceptance probability exactly 1/2.
inline BitString majority_violation_input() { return BitString::parse("101010"); }

inline constexpr unsigned default_chain_vertices = 7;
inline constexpr unsigned default_catchain_length = 6;

inline std::vector<std::string> corpus_names() {
  return {"M_id", "M_flip", "COIN", "ND-STCONN", "CO-ND-STCONN", "MAJ3", "CHAIN", "CATCHAIN",
          "INVALID-LOOP", "INVALID-TAPE"};
}

inline CorpusEntry corpus_entry(const std::string& name, unsigned c) {
  if (c < 1 || c > (1u << corpus_work_len))
    throw std::invalid_argument("corpus machines support 1 <= c <= " + std::to_string(1u << corpus_work_len));
  if (name == "M_id") return {make_identity(c), parse_inputs({"", "01"}), true, "accepts at once"};
  if (name == "M_flip")
    return {make_flip(c), parse_inputs({"0", "1"}), true, "flips and restores cat[0], accepts iff x0 = 1"};
  if (name == "COIN") return {make_coin(c), parse_inputs({"0"}), true, "one fair coin decides"};
  if (name == "ND-STCONN")
    return {make_stconn(c, false), all_inputs(6), true, "guesses a 0-3 path in a 4-node graph"};
  if (name == "CO-ND-STCONN")
    return {make_stconn(c, true), all_inputs(6), true, "accepts iff nodes 0 and 3 are disconnected"};
  if (name == "MAJ3")
    return {make_majority(c), parse_inputs({"101001", "101000", "010110", "000010", "010101"}), true,
            "majority of three bits, flagged bits random"};
  if (name == "CHAIN")
    return {make_chain(c, default_chain_vertices, default_chain_vertices - 2), parse_inputs({"0"}), true,
            "accept tree is a path of 7 vertices"};
  if (name == "CATCHAIN")
    return {make_catchain(c, default_catchain_length), parse_inputs({"0"}), true,
            "long accept tree iff cat[0] = 1"};
  if (name == "INVALID-LOOP") return {make_invalid_loop(c), parse_inputs({"0"}), false, "never halts"};
  if (name == "INVALID-TAPE") return {make_invalid_tape(c), parse_inputs({"0"}), false, "halts with cat[0] flipped"};
  throw std::invalid_argument("unknown corpus machine '" + name + "'");
}

inline std::vector<CorpusEntry> corpus(unsigned c) {
  std::vector<CorpusEntry> out;
  for (const auto& n : corpus_names()) out.push_back(corpus_entry(n, c));
  return out;
}

}  // namespace catalytic
