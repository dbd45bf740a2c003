#pragma once

#include "catalytic/bits.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace catalytic {

enum class Mode { deterministic, nondet, co_nondet, bounded_random, unbounded_random };

inline std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::deterministic: return "deterministic";
    case Mode::nondet: return "nondet";
    case Mode::co_nondet: return "co-nondet";
    case Mode::bounded_random: return "bounded-random";
    case Mode::unbounded_random: return "unbounded-random";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : {Mode::deterministic, Mode::nondet, Mode::co_nondet, Mode::bounded_random,
                 Mode::unbounded_random}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

inline bool is_random(Mode m) {
  return m == Mode::bounded_random || m == Mode::unbounded_random;
}

// Raised for machine descriptions that violate the model's invariants.
class MachineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChoiceOutcome {
  std::uint32_t next_state = 0;
  std::uint8_t work_write = 0;
  std::uint8_t cat_write = 0;
  std::int8_t input_move = 0;
  std::int8_t work_move = 0;
  std::int8_t cat_move = 0;

  friend bool operator==(const ChoiceOutcome&, const ChoiceOutcome&) = default;
};

using OutcomePair = std::array<ChoiceOutcome, 2>;

constexpr std::size_t transition_slot(std::uint32_t state, unsigned in, unsigned work,
                                      unsigned cat) {
  return std::size_t{state} * 8 + in * 4 + work * 2 + cat;
}

// Plain description of a catalytic machine. `transitions` holds one entry per
// (state, input bit, work bit, catalytic bit), indexed by transition_slot;
// entries of halting states are empty.
struct MachineSpec {
  std::string name;
  Mode mode = Mode::deterministic;
  unsigned work_len = 1;
  unsigned cat_len = 1;
  std::vector<std::string> states;
  std::uint32_t start = 0;
  std::uint32_t accept = 1;
  std::uint32_t reject = 2;
  std::vector<std::optional<OutcomePair>> transitions;
};

inline constexpr unsigned max_work_len = 24;
inline constexpr unsigned max_cat_len = 64;

// Throws MachineError on the first violated invariant.
inline void check_spec(const MachineSpec& spec) {
  const auto q = spec.states.size();
  if (q < 3) throw MachineError("machine needs at least start, accept and reject states");
  if (spec.start >= q || spec.accept >= q || spec.reject >= q)
    throw MachineError("designated state index out of range");
  if (spec.start == spec.accept || spec.start == spec.reject || spec.accept == spec.reject)
    throw MachineError("start, accept and reject states must be distinct");
  if (spec.work_len < 1 || spec.work_len > max_work_len)
    throw MachineError("work length must be in [1, " + std::to_string(max_work_len) + "]");
  if (spec.cat_len < 1 || spec.cat_len > max_cat_len)
    throw MachineError("catalytic length must be in [1, " + std::to_string(max_cat_len) + "]");
  if (spec.work_len < 64 && spec.cat_len > (std::uint64_t{1} << spec.work_len))
    throw MachineError("catalytic length " + std::to_string(spec.cat_len) +
                       " exceeds 2^s = " + std::to_string(std::uint64_t{1} << spec.work_len));
  if (spec.transitions.size() != q * 8) throw MachineError("transition table has wrong size");
  for (std::uint32_t st = 0; st < q; ++st) {
    const bool halting = st == spec.accept || st == spec.reject;
    for (unsigned key = 0; key < 8; ++key) {
      const auto& entry = spec.transitions[std::size_t{st} * 8 + key];
      const std::string where = "state '" + spec.states[st] + "' key " +
                                std::to_string(key >> 2) + std::to_string((key >> 1) & 1) +
                                std::to_string(key & 1);
      if (halting) {
        if (entry) throw MachineError("halting " + where + " has an outgoing transition");
        continue;
      }
      if (!entry) throw MachineError("missing transition for " + where);
      for (const ChoiceOutcome& o : *entry) {
        if (o.next_state >= q) throw MachineError("next state out of range at " + where);
        if (o.work_write > 1 || o.cat_write > 1)
          throw MachineError("writes must be single bits at " + where);
        for (int m : {o.input_move, o.work_move, o.cat_move}) {
          if (m < -1 || m > 1) throw MachineError("head move out of {-1,0,1} at " + where);
        }
      }
      if (spec.mode == Mode::deterministic && (*entry)[0] != (*entry)[1])
        throw MachineError("deterministic mode requires equal choice outcomes at " + where);
    }
  }
}

struct Configuration {
  std::uint32_t state = 0;
  std::uint32_t input_head = 0;
  std::uint32_t work_head = 0;
  std::uint32_t cat_head = 0;
  std::uint64_t work = 0;  // cell i in bit i
  std::uint64_t cat = 0;   // cell i in bit i

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const noexcept {
    std::uint64_t h = c.state;
    h = h * 0x9e3779b97f4a7c15ULL + c.input_head;
    h = h * 0x9e3779b97f4a7c15ULL + c.work_head;
    h = h * 0x9e3779b97f4a7c15ULL + c.cat_head;
    h ^= c.work + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= c.cat + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    return static_cast<std::size_t>(h * 0xbf58476d1ce4e5b9ULL);
  }
};

// Field widths of the fixed configuration serialization for one input length.
struct Layout {
  std::size_t input_len = 0;
  unsigned state_bits = 0;
  unsigned input_head_bits = 0;
  unsigned work_head_bits = 0;
  unsigned cat_head_bits = 0;
  unsigned work_len = 0;
  unsigned cat_len = 0;

  // W: everything except the catalytic cells.
  unsigned extended_width() const {
    return state_bits + input_head_bits + work_head_bits + cat_head_bits + work_len;
  }
  // L = W + c.
  unsigned width() const { return extended_width() + cat_len; }
};

// A transition viewed from its target state, used to enumerate predecessors.
struct ReverseEntry {
  std::uint32_t from = 0;
  std::uint8_t in = 0;
  std::uint8_t work = 0;
  std::uint8_t cat = 0;
  std::uint8_t choice = 0;
  ChoiceOutcome out;
};

// Label sets on configuration-graph edges.
enum Label : std::uint8_t { label_zero = 1, label_one = 2, label_both = 3 };

inline std::string label_string(std::uint8_t labels) {
  switch (labels) {
    case label_zero: return "0";
    case label_one: return "1";
    case label_both: return "01";
    default: return "-";
  }
}

struct LabeledConf {
  std::uint8_t labels = 0;
  Configuration conf;
  friend bool operator==(const LabeledConf&, const LabeledConf&) = default;
};

// Immutable, validated machine with the derived lookup tables every
// operation needs.
class Machine {
 public:
  explicit Machine(MachineSpec spec) : spec_(std::move(spec)) {
    check_spec(spec_);
    build_reverse_index();
    degree_bound_ = compute_degree_bound();
  }

  const MachineSpec& spec() const { return spec_; }
  std::uint32_t state_count() const { return static_cast<std::uint32_t>(spec_.states.size()); }
  unsigned work_len() const { return spec_.work_len; }
  unsigned cat_len() const { return spec_.cat_len; }
  Mode mode() const { return spec_.mode; }

  bool is_halting_state(std::uint32_t q) const { return q == spec_.accept || q == spec_.reject; }

  const OutcomePair& outcomes(std::uint32_t q, unsigned in, unsigned work, unsigned cat) const {
    return *spec_.transitions[transition_slot(q, in, work, cat)];
  }

  std::span<const ReverseEntry> entries_into(std::uint32_t q) const { return reverse_[q]; }
  std::span<const ReverseEntry> zero_entries_into(std::uint32_t q) const {
    return reverse_zero_[q];
  }

  // d_M: bounds in-degree plus out-degree of every configuration.
  unsigned degree_bound() const { return degree_bound_; }

  Layout layout(std::size_t input_len) const {
    Layout l;
    l.input_len = input_len;
    l.state_bits = bits_for(state_count());
    l.input_head_bits = bits_for(input_len);
    l.work_head_bits = bits_for(spec_.work_len);
    l.cat_head_bits = bits_for(spec_.cat_len);
    l.work_len = spec_.work_len;
    l.cat_len = spec_.cat_len;
    return l;
  }

 private:
  void build_reverse_index() {
    reverse_.assign(state_count(), {});
    reverse_zero_.assign(state_count(), {});
    for (std::uint32_t q = 0; q < state_count(); ++q) {
      if (is_halting_state(q)) continue;
      for (unsigned key = 0; key < 8; ++key) {
        const OutcomePair& pair = *spec_.transitions[std::size_t{q} * 8 + key];
        for (std::uint8_t choice = 0; choice < 2; ++choice) {
          ReverseEntry e{q, static_cast<std::uint8_t>(key >> 2),
                         static_cast<std::uint8_t>((key >> 1) & 1),
                         static_cast<std::uint8_t>(key & 1), choice, pair[choice]};
          reverse_[pair[choice].next_state].push_back(e);
          if (choice == 0) reverse_zero_[pair[choice].next_state].push_back(e);
        }
      }
    }
  }

  // For a fixed target and a fixed (source state, head displacement) class the
  // predecessor positions are determined, so each class contributes at most
  // as many predecessors as it has distinct overwritten (work, cat) bit pairs
  // that write the same (work, cat) bits.
  unsigned compute_degree_bound() const {
    unsigned worst = 0;
    for (std::uint32_t target = 0; target < state_count(); ++target) {
      std::map<std::tuple<std::uint32_t, int, int, int>, std::array<std::set<unsigned>, 4>> classes;
      for (const ReverseEntry& e : reverse_[target]) {
        auto displacements = [](int m) {
          return m == 0 ? std::vector<int>{0} : std::vector<int>{m, 0};
        };
        for (int di : displacements(e.out.input_move))
          for (int dw : displacements(e.out.work_move))
            for (int dc : displacements(e.out.cat_move)) {
              auto& sets = classes[{e.from, di, dw, dc}];
              sets[e.out.work_write * 2u + e.out.cat_write].insert(e.work * 2u + e.cat);
            }
      }
      unsigned in_bound = 0;
      for (const auto& [cls, sets] : classes) {
        std::size_t best = 0;
        for (const auto& s : sets) best = std::max(best, s.size());
        in_bound += static_cast<unsigned>(best);
      }
      worst = std::max(worst, in_bound);
    }
    return worst + 2;
  }

  MachineSpec spec_;
  std::vector<std::vector<ReverseEntry>> reverse_;
  std::vector<std::vector<ReverseEntry>> reverse_zero_;
  unsigned degree_bound_ = 2;
};

// Everything a single computation is run against: machine plus fixed input.
struct Instance {
  const Machine* machine = nullptr;
  BitString input;
  Layout layout;

  Instance(const Machine& m, BitString x)
      : machine(&m), input(std::move(x)), layout(m.layout(input.size())) {}

  unsigned input_bit(std::uint32_t head) const {
    return head < input.size() ? input[head] : 0u;
  }
  std::uint32_t input_cells() const {
    return input.empty() ? 1u : static_cast<std::uint32_t>(input.size());
  }
};

namespace detail {

inline std::uint32_t moved(std::uint32_t head, int move, std::uint32_t len) {
  if (move < 0) return head == 0 ? head : head - 1;
  if (move > 0) return head + 1 >= len ? head : head + 1;
  return head;
}

// Positions p with moved(p, move, len) == head.
inline std::array<std::int64_t, 2> origins(std::uint32_t head, int move, std::uint32_t len) {
  std::array<std::int64_t, 2> out{-1, -1};
  if (move == 0) {
    out[0] = head;
  } else if (move > 0) {
    if (head >= 1) out[0] = head - 1;
    if (head + 1 == len) out[1] = head;
  } else {
    if (head + 1 < len) out[0] = head + 1;
    if (head == 0) out[1] = head;
  }
  return out;
}

struct Predecessor {
  std::tuple<std::uint32_t, int, int, int, unsigned, unsigned> descriptor;
  std::uint8_t labels;
  Configuration conf;
};

template <class Entries>
std::vector<Predecessor> predecessors(const Instance& inst, const Configuration& to,
                                      Entries entries) {
  std::vector<Predecessor> out;
  const auto& m = *inst.machine;
  const std::uint32_t n = inst.input_cells();
  for (const ReverseEntry& e : entries) {
    auto in_from = origins(to.input_head, e.out.input_move, n);
    auto work_from = origins(to.work_head, e.out.work_move, m.work_len());
    auto cat_from = origins(to.cat_head, e.out.cat_move, m.cat_len());
    for (auto pi : in_from) {
      if (pi < 0 || inst.input_bit(static_cast<std::uint32_t>(pi)) != e.in) continue;
      for (auto pw : work_from) {
        if (pw < 0 || cell(to.work, static_cast<unsigned>(pw)) != e.out.work_write) continue;
        for (auto pc : cat_from) {
          if (pc < 0 || cell(to.cat, static_cast<unsigned>(pc)) != e.out.cat_write) continue;
          Configuration from;
          from.state = e.from;
          from.input_head = static_cast<std::uint32_t>(pi);
          from.work_head = static_cast<std::uint32_t>(pw);
          from.cat_head = static_cast<std::uint32_t>(pc);
          from.work = with_cell(to.work, static_cast<unsigned>(pw), e.work);
          from.cat = with_cell(to.cat, static_cast<unsigned>(pc), e.cat);
          out.push_back({{e.from, static_cast<int>(to.input_head) - static_cast<int>(pi),
                          static_cast<int>(to.work_head) - static_cast<int>(pw),
                          static_cast<int>(to.cat_head) - static_cast<int>(pc), e.work, e.cat},
                         static_cast<std::uint8_t>(e.choice == 0 ? label_zero : label_one),
                         from});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Predecessor& a, const Predecessor& b) {
    return a.descriptor < b.descriptor || (a.descriptor == b.descriptor && a.labels < b.labels);
  });
  // The same predecessor may reach `to` under both choices.
  std::vector<Predecessor> merged;
  for (auto& p : out) {
    if (!merged.empty() && merged.back().descriptor == p.descriptor) {
      merged.back().labels |= p.labels;
    } else {
      merged.push_back(std::move(p));
    }
  }
  return merged;
}

}  // namespace detail

inline bool is_halting(const Instance& inst, const Configuration& conf) {
  return inst.machine->is_halting_state(conf.state);
}

// Applies one transition. Stepping a halting configuration is a contract
// violation.
inline Configuration step(const Instance& inst, const Configuration& conf, unsigned choice) {
  const Machine& m = *inst.machine;
  if (m.is_halting_state(conf.state))
    throw std::logic_error("step called on a halting configuration");
  const ChoiceOutcome& o =
      m.outcomes(conf.state, inst.input_bit(conf.input_head), cell(conf.work, conf.work_head),
                 cell(conf.cat, conf.cat_head))[choice & 1u];
  Configuration next;
  next.state = o.next_state;
  next.work = with_cell(conf.work, conf.work_head, o.work_write);
  next.cat = with_cell(conf.cat, conf.cat_head, o.cat_write);
  next.input_head = detail::moved(conf.input_head, o.input_move, inst.input_cells());
  next.work_head = detail::moved(conf.work_head, o.work_move, m.work_len());
  next.cat_head = detail::moved(conf.cat_head, o.cat_move, m.cat_len());
  return next;
}

// One entry per distinct successor; coinciding 0/1 successors share an entry.
inline std::vector<LabeledConf> forward_edges(const Instance& inst, const Configuration& conf) {
  if (is_halting(inst, conf)) return {};
  Configuration s0 = step(inst, conf, 0);
  Configuration s1 = step(inst, conf, 1);
  if (s0 == s1) return {{label_both, s0}};
  return {{label_zero, s0}, {label_one, s1}};
}

// All configurations with an edge into `conf`, in canonical predecessor
// order: (state, input displacement, work displacement, catalytic
// displacement, overwritten work bit, overwritten catalytic bit).
inline std::vector<LabeledConf> inverse_edges(const Instance& inst, const Configuration& conf) {
  auto preds = detail::predecessors(inst, conf, inst.machine->entries_into(conf.state));
  std::vector<LabeledConf> out;
  out.reserve(preds.size());
  for (auto& p : preds) out.push_back({p.labels, p.conf});
  return out;
}

// Predecessors along 0-labeled edges, in the same canonical order.
inline std::vector<Configuration> zero_predecessors(const Instance& inst,
                                                    const Configuration& conf) {
  auto preds = detail::predecessors(inst, conf, inst.machine->zero_entries_into(conf.state));
  std::vector<Configuration> out;
  out.reserve(preds.size());
  for (auto& p : preds) out.push_back(p.conf);
  return out;
}

inline unsigned degree_bound(const Machine& m) { return m.degree_bound(); }

inline Configuration start_configuration(const Machine& m, std::uint64_t tau) {
  Configuration c;
  c.state = m.spec().start;
  c.cat = tau;
  return c;
}

// The normalized halting configurations over tape contents `tau`.
inline Configuration accept_configuration(const Machine& m, std::uint64_t tau) {
  Configuration c;
  c.state = m.spec().accept;
  c.cat = tau;
  return c;
}

inline Configuration reject_configuration(const Machine& m, std::uint64_t tau) {
  Configuration c;
  c.state = m.spec().reject;
  c.cat = tau;
  return c;
}

inline bool is_canonical_halt(const Machine& m, const Configuration& c) {
  return m.is_halting_state(c.state) && c.input_head == 0 && c.work_head == 0 &&
         c.cat_head == 0 && c.work == 0;
}

// Serialization: state, input head, work head, catalytic head (each
// fixed-width, most significant bit first), then work cells, then catalytic
// cells, cell 0 first.
inline BitString serialize(const Layout& l, const Configuration& c) {
  BitString out;
  out.append_number(c.state, l.state_bits);
  out.append_number(c.input_head, l.input_head_bits);
  out.append_number(c.work_head, l.work_head_bits);
  out.append_number(c.cat_head, l.cat_head_bits);
  out.append_cells(c.work, l.work_len);
  out.append_cells(c.cat, l.cat_len);
  return out;
}

inline Configuration deserialize(const Layout& l, const BitString& bits) {
  if (bits.size() != l.width()) throw std::invalid_argument("serialized configuration has wrong width");
  Configuration c;
  std::size_t off = 0;
  c.state = static_cast<std::uint32_t>(bits.read_number(off, l.state_bits));
  off += l.state_bits;
  c.input_head = static_cast<std::uint32_t>(bits.read_number(off, l.input_head_bits));
  off += l.input_head_bits;
  c.work_head = static_cast<std::uint32_t>(bits.read_number(off, l.work_head_bits));
  off += l.work_head_bits;
  c.cat_head = static_cast<std::uint32_t>(bits.read_number(off, l.cat_head_bits));
  off += l.cat_head_bits;
  c.work = bits.read_cells(off, l.work_len);
  off += l.work_len;
  c.cat = bits.read_cells(off, l.cat_len);
  return c;
}

// True iff every field is in range for the machine and input length.
inline bool in_universe(const Instance& inst, const Configuration& c) {
  const Machine& m = *inst.machine;
  return c.state < m.state_count() && c.input_head < inst.input_cells() &&
         c.work_head < m.work_len() && c.cat_head < m.cat_len() &&
         (c.work & ~low_mask(m.work_len())) == 0 && (c.cat & ~low_mask(m.cat_len())) == 0;
}

}  // namespace catalytic
