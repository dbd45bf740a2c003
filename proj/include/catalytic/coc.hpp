#pragma once

// Compress-or-compute over a virtual catalytic tape, and the driver that
// turns a nondeterministic, co-nondeterministic or randomized catalytic
// machine into a deterministic catalytic procedure with one oracle query.

#include "catalytic/confgraph.hpp"
#include "catalytic/explored_graph.hpp"
#include "catalytic/oracle.hpp"
#include "catalytic/semantics.hpp"
#include "catalytic/space_meter.hpp"

#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace catalytic {

// Raised when a compressed block no longer decompresses: the tape was
// modified between compression and decompression.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when no tape in the brute-force search reaches the compute branch.
// Only possible when S is below the completeness threshold.
class CompletenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CocParams {
  unsigned block_bits = 0;  // B
  std::uint64_t bound = 0;  // S

  // B = 2W, S = 2^B.
  static CocParams defaults(const Layout& l) {
    CocParams p;
    p.block_bits = static_cast<unsigned>(default_block_bits(l));
    if (p.block_bits > 62)
      throw MachineError("extended work width " + std::to_string(l.extended_width()) +
                         " too large for 64-bit tour counters (need 2W <= 62)");
    p.bound = std::uint64_t{1} << p.block_bits;
    return p;
  }
};

// Bits of a counter block left as zero padding after compression.
inline unsigned freed_bits_per_round(const Layout& l, const Machine& m, unsigned block_bits) {
  const unsigned used = l.extended_width() + bits_for(m.degree_bound());
  return block_bits > used ? block_bits - used : 0;
}

// k = ceil((c + B) / (B - W - ceil(log d))) + 1.
inline unsigned block_count(const Layout& l, const Machine& m, unsigned block_bits) {
  const unsigned freed = freed_bits_per_round(l, m, block_bits);
  if (freed == 0)
    throw MachineError("compressed record (W + log d_M = " +
                       std::to_string(l.extended_width() + bits_for(m.degree_bound())) +
                       " bits) does not fit a " + std::to_string(block_bits) + "-bit block");
  return (l.cat_len + block_bits + freed - 1) / freed + 1;
}

// A possibly scattered run of tape cells.
struct TapeRegion {
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // (offset, length)

  std::size_t size() const {
    std::size_t n = 0;
    for (auto [o, l] : segments) n += l;
    return n;
  }
  std::size_t position(std::size_t i) const {
    for (auto [o, l] : segments) {
      if (i < l) return o + i;
      i -= l;
    }
    throw std::out_of_range("tape region index out of range");
  }
  // The sub-region of cells [from, from + len).
  TapeRegion slice(std::size_t from, std::size_t len) const {
    TapeRegion out;
    for (auto [o, l] : segments) {
      if (len == 0) break;
      if (from >= l) {
        from -= l;
        continue;
      }
      std::size_t take = std::min(len, l - from);
      out.segments.emplace_back(o + from, take);
      len -= take;
      from = 0;
    }
    if (len != 0) throw std::out_of_range("tape region slice out of range");
    return out;
  }
};

// The driver's catalytic tape: a c-cell payload followed by k counter blocks
// of B cells.
class VirtualTape {
 public:
  VirtualTape(unsigned cat_len, unsigned block_bits, unsigned blocks)
      : bits_(cat_len + std::size_t{block_bits} * blocks),
        cat_len_(cat_len),
        block_bits_(block_bits),
        blocks_(blocks) {}

  const BitString& bits() const { return bits_; }
  BitString& bits() { return bits_; }
  unsigned cat_len() const { return cat_len_; }
  unsigned block_bits() const { return block_bits_; }
  unsigned blocks() const { return blocks_; }

  TapeRegion payload() const { return {{{0, cat_len_}}}; }
  TapeRegion counter(unsigned i) const {
    if (i >= blocks_) throw std::out_of_range("counter block out of range");
    return {{{cat_len_ + std::size_t{i} * block_bits_, block_bits_}}};
  }

  // Cells of a region as a packed word, cell 0 in bit 0.
  std::uint64_t read_cells(const TapeRegion& r) const {
    std::uint64_t w = 0;
    for (std::size_t i = 0; i < r.size(); ++i) w |= std::uint64_t{bits_[r.position(i)]} << i;
    return w;
  }
  void write_cells(const TapeRegion& r, std::uint64_t w) {
    for (std::size_t i = 0; i < r.size(); ++i) bits_.set(r.position(i), cell(w, static_cast<unsigned>(i)));
  }
  // Region read as a natural number, first cell most significant.
  std::uint64_t read_number(const TapeRegion& r) const {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < r.size(); ++i) v = (v << 1) | bits_[r.position(i)];
    return v;
  }
  void write_number(const TapeRegion& r, std::uint64_t v) {
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) bits_.set(r.position(i), static_cast<unsigned>((v >> (n - 1 - i)) & 1u));
  }
  BitString read_bits(const TapeRegion& r) const {
    BitString out;
    for (std::size_t i = 0; i < r.size(); ++i) out.push_back(bits_[r.position(i)]);
    return out;
  }
  void write_bits(const TapeRegion& r, const BitString& b) {
    for (std::size_t i = 0; i < r.size(); ++i) bits_.set(r.position(i), b.at(i));
  }

  friend bool operator==(const VirtualTape&, const VirtualTape&) = default;

 private:
  BitString bits_;
  unsigned cat_len_;
  unsigned block_bits_;
  unsigned blocks_;
};

inline std::pair<Configuration, Configuration> halting_confs(const Machine& m, std::uint64_t tau) {
  return {accept_configuration(m, tau), reject_configuration(m, tau)};
}

// How the compute branch discovers edges between canonical indices.
//  pairwise_literal: every configuration bit comes from a ConfBit walk.
//  pairwise_cursor:  the same comparisons, bits read from a tour cursor.
//  indexed:          one pass per tour plus a lookup table; not O(W) space.
//  automatic:        pairwise_cursor for small tours, indexed otherwise.
enum class ExploreMethod { automatic, pairwise_literal, pairwise_cursor, indexed };

inline constexpr std::uint64_t pairwise_tour_limit = 256;

namespace detail {

class LiteralReader {
 public:
  LiteralReader(const ZeroGraphView& view, const Configuration& root) : view_(&view), root_(root) {}
  unsigned bit(std::uint64_t t, unsigned b) { return conf_bit_at(*view_, root_, b, t); }
  bool is_canonical(std::uint64_t t) { return canon(*view_, root_, 0, t); }

 private:
  const ZeroGraphView* view_;
  Configuration root_;
};

// Produces the same bits as ConfBit by keeping one tour position and moving
// it forward. Charges the registers ConfBit itself holds.
class CursorReader {
 public:
  CursorReader(const ZeroGraphView& view, const Configuration& root)
      : view_(&view), root_(root), pos_{root, 0}, bits_(serialize(view.layout(), root)) {}

  unsigned bit(std::uint64_t t, unsigned b) {
    auto held = hold();
    seek(t);
    return bits_.at(b);
  }
  bool is_canonical(std::uint64_t t) {
    auto held = hold();
    seek(t);
    return pos_.index == 0;
  }

 private:
  std::array<SpaceMeter::Charge, 3> hold() const {
    const auto& l = view_->layout();
    return {charge(view_->meter(), "confbit.index", bits_for(l.width())),
            charge(view_->meter(), "confbit.position", l.extended_width() + view_->index_bits()),
            charge(view_->meter(), "walk.counter", view_->counter_bits())};
  }
  void seek(std::uint64_t t) {
    if (t > view_->bound()) throw std::out_of_range("walk length exceeds the bound S");
    if (t == t_) return;
    if (t < t_) {
      pos_ = {root_, 0};
      t_ = 0;
    }
    while (t_ < t) {
      pos_ = next_edge(*view_, pos_);
      ++t_;
    }
    bits_ = serialize(view_->layout(), pos_.conf);
  }

  const ZeroGraphView* view_;
  Configuration root_;
  EdgeRef pos_;
  std::uint64_t t_ = 0;
  BitString bits_;
};

// Canonical-index graph by pairwise bitwise comparison, as in the compute
// case: (i,b) -> (j,d) iff the configuration at (j,d) is a successor of the
// one at (i,b), both indices canonical.
template <class Reader>
ExploredGraph explore_pairwise(const ZeroGraphView& view, const std::array<Configuration, 2>& roots,
                               const std::array<std::uint64_t, 2>& sizes,
                               const Configuration& start) {
  const Instance& inst = view.instance();
  const Machine& m = view.machine();
  const Layout& l = view.layout();
  const unsigned W = l.extended_width();
  const unsigned L = l.width();
  SpaceMeter* meter = view.meter();

  ExploredGraph g;
  g.bound = view.bound();
  std::array<Reader, 2> outer{Reader(view, roots[0]), Reader(view, roots[1])};
  std::array<Reader, 2> inner{Reader(view, roots[0]), Reader(view, roots[1])};

  {
    auto i_reg = charge(meter, "explore.i", view.counter_bits() + 1);
    for (std::uint8_t b = 0; b < 2; ++b)
      for (std::uint64_t i = 0; i < sizes[b]; ++i)
        if (outer[b].is_canonical(i)) g.nodes.push_back({i, b});
  }

  auto i_reg = charge(meter, "explore.i", view.counter_bits() + 1);
  auto j_reg = charge(meter, "explore.j", view.counter_bits() + 1);
  auto p_reg = charge(meter, "explore.bit_index", bits_for(L));
  for (const NodeId& a : g.nodes) {
    Reader& ra = outer[a.tour];
    // Decode the non-catalytic part of the source into a W-bit register.
    auto succ_reg = charge(meter, "explore.successor", W + 4);
    BitString ext;
    for (unsigned p = 0; p < W; ++p) ext.push_back(ra.bit(a.index, p));
    BitString probe = ext;
    for (unsigned p = 0; p < l.cat_len; ++p) probe.push_back(0);
    Configuration src = deserialize(l, probe);
    if (m.is_halting_state(src.state)) continue;
    const unsigned cat_under_head = ra.bit(a.index, W + src.cat_head);
    src.cat = with_cell(src.cat, src.cat_head, cat_under_head);
    const OutcomePair& out =
        m.outcomes(src.state, inst.input_bit(src.input_head), cell(src.work, src.work_head), cat_under_head);
    std::array<BitString, 2> succ_ext;
    for (unsigned ch = 0; ch < 2; ++ch) {
      Configuration s = step(inst, src, ch);
      BitString full = serialize(l, s);
      for (unsigned p = 0; p < W; ++p) succ_ext[ch].push_back(full[p]);
    }
    for (const NodeId& bnode : g.nodes) {
      Reader& rb = inner[bnode.tour];
      std::uint8_t labels = 0;
      for (unsigned ch = 0; ch < 2; ++ch) {
        bool match = true;
        for (unsigned p = 0; p < L && match; ++p) {
          unsigned expected;
          if (p < W) {
            expected = succ_ext[ch][p];
          } else if (p - W == src.cat_head) {
            expected = out[ch].cat_write;
          } else {
            expected = ra.bit(a.index, p);
          }
          match = expected == rb.bit(bnode.index, p);
        }
        if (match) labels |= static_cast<std::uint8_t>(ch == 0 ? label_zero : label_one);
      }
      if (labels) g.edges.push_back({a, bnode, labels});
    }
  }

  const BitString start_bits = serialize(l, start);
  bool found = false;
  for (const NodeId& n : g.nodes) {
    Reader& r = inner[n.tour];
    bool match = true;
    for (unsigned p = 0; p < L && match; ++p) match = r.bit(n.index, p) == start_bits[p];
    if (match) {
      g.r = n;
      found = true;
      break;
    }
  }
  if (!found) throw InvalidRun("start configuration lies in neither halting tree");
  g.t = {0, 0};
  g.rej = NodeId{0, 1};
  g.canonicalize();
  return g;
}

inline ExploredGraph explore_indexed(const ZeroGraphView& view, const std::array<Configuration, 2>& roots,
                                     const std::array<std::uint64_t, 2>& sizes,
                                     const Configuration& start) {
  const Instance& inst = view.instance();
  ExploredGraph g;
  g.bound = view.bound();
  std::unordered_map<Configuration, NodeId, ConfigurationHash> ids;
  std::vector<Configuration> confs;
  for (std::uint8_t b = 0; b < 2; ++b) {
    EdgeRef e{roots[b], 0};
    for (std::uint64_t i = 0; i < sizes[b]; ++i) {
      if (e.index == 0) {
        ids.emplace(e.conf, NodeId{i, b});
        g.nodes.push_back({i, b});
        confs.push_back(e.conf);
      }
      e = next_edge(view, e);
    }
  }
  auto table = charge(view.meter(), "explore.lookup_table",
                      ids.size() * (view.layout().width() + view.counter_bits() + 2));
  for (std::size_t k = 0; k < confs.size(); ++k) {
    for (const LabeledConf& s : forward_edges(inst, confs[k])) {
      auto it = ids.find(s.conf);
      if (it != ids.end()) g.edges.push_back({g.nodes[k], it->second, s.labels});
    }
  }
  auto it = ids.find(start);
  if (it == ids.end()) throw InvalidRun("start configuration lies in neither halting tree");
  g.r = it->second;
  g.t = {0, 0};
  g.rej = NodeId{0, 1};
  g.canonicalize();
  return g;
}

}  // namespace detail

// Builds the explored graph for tape contents tau, assuming both halting
// tours are at most S long.
inline ExploredGraph explore_components(const ZeroGraphView& view, std::uint64_t tau,
                                        const std::array<std::uint64_t, 2>& sizes,
                                        ExploreMethod method) {
  const Machine& m = view.machine();
  const std::array<Configuration, 2> roots{accept_configuration(m, tau), reject_configuration(m, tau)};
  const Configuration start = start_configuration(m, tau);
  if (method == ExploreMethod::automatic)
    method = sizes[0] + sizes[1] <= pairwise_tour_limit ? ExploreMethod::pairwise_cursor
                                                        : ExploreMethod::indexed;
  switch (method) {
    case ExploreMethod::pairwise_literal:
      return detail::explore_pairwise<detail::LiteralReader>(view, roots, sizes, start);
    case ExploreMethod::pairwise_cursor:
      return detail::explore_pairwise<detail::CursorReader>(view, roots, sizes, start);
    default:
      return detail::explore_indexed(view, roots, sizes, start);
  }
}

struct Computed {
  ExploredGraph graph;
};

struct Compressed {
  bool from_accept = true;       // which tree was walked
  std::uint64_t steps = 0;       // ctr + 1
};

struct CocOutcome {
  std::variant<Computed, Compressed> action;
  std::optional<std::uint64_t> size_accept;
  std::optional<std::uint64_t> size_reject;

  bool computed() const { return std::holds_alternative<Computed>(action); }
  const ExploredGraph& graph() const { return std::get<Computed>(action).graph; }
};

// Packs (u, j, 0...) into a B-bit counter: u is the first W bits of the
// serialized configuration, j the edge index in bits_for(d_M) bits.
inline BitString compress_record(const Layout& l, const Machine& m, unsigned block_bits,
                                 const EdgeRef& e) {
  BitString full = serialize(l, e.conf);
  BitString rec;
  for (unsigned p = 0; p < l.extended_width(); ++p) rec.push_back(full[p]);
  rec.append_number(e.index, bits_for(m.degree_bound()));
  while (rec.size() < block_bits) rec.push_back(0);
  return rec;
}

// Either emits the explored graph for the payload's tape contents (both
// halting trees have tours of at most S steps), or compresses: walks
// ctr + 1 steps from the root of a large tree, leaves the reached
// configuration's catalytic contents in the payload and (u, j, 0...) in the
// counter block.
inline CocOutcome compute_or_compress(const Instance& inst, VirtualTape& tape, const TapeRegion& payload,
                                      const TapeRegion& counter, const CocParams& params,
                                      ExploreMethod method = ExploreMethod::automatic,
                                      SpaceMeter* meter = nullptr) {
  const Machine& m = *inst.machine;
  const Layout& l = inst.layout;
  if (payload.size() != l.cat_len) throw std::invalid_argument("payload region must hold c cells");
  if (counter.size() != params.block_bits) throw std::invalid_argument("counter region must hold B cells");
  if (freed_bits_per_round(l, m, params.block_bits) == 0)
    throw MachineError("compressed record does not fit the counter block");
  ZeroGraphView view(inst, params.bound, meter);
  const std::uint64_t tau = tape.read_cells(payload);
  CocOutcome result;
  const auto [acc, rej] = halting_confs(m, tau);
  result.size_accept = tour_size(view, acc);
  result.size_reject = tour_size(view, rej);
  if (result.size_accept && result.size_reject) {
    result.action = Computed{explore_components(view, tau, {*result.size_accept, *result.size_reject}, method)};
    return result;
  }

  const std::uint64_t ctr = tape.read_number(counter);
  if (ctr >= params.bound)
    throw std::invalid_argument("counter value " + std::to_string(ctr) + " needs a walk longer than S");
  const bool from_accept = !result.size_accept;
  const EdgeRef origin{from_accept ? acc : rej, 0};
  EdgeRef e = origin;
  {
    auto counter_reg = charge(meter, "compress.counter", view.counter_bits());
    auto position = charge(meter, "compress.position", l.extended_width() + view.index_bits());
    for (std::uint64_t i = 0; i <= ctr; ++i) {
      e = next_edge(view, e);
      if (e == origin) throw std::logic_error("tour returned to its root within S steps");
    }
  }
  tape.write_cells(payload, e.conf.cat);
  tape.write_bits(counter, compress_record(l, m, params.block_bits, e));
  result.action = Compressed{from_accept, ctr + 1};
  return result;
}

// Inverts one compress round: rebuilds (pi, u) and j, steps back to the
// halting root and restores its tape contents and the step count minus one.
inline void decompress_round(const Instance& inst, VirtualTape& tape, const TapeRegion& payload,
                             const TapeRegion& counter, const CocParams& params,
                             SpaceMeter* meter = nullptr) {
  const Machine& m = *inst.machine;
  const Layout& l = inst.layout;
  const unsigned W = l.extended_width();
  const unsigned ib = bits_for(m.degree_bound());
  BitString rec = tape.read_bits(counter);
  for (std::size_t p = W + ib; p < rec.size(); ++p)
    if (rec[p]) throw CorruptionError("compressed block has nonzero padding");
  BitString full;
  for (unsigned p = 0; p < W; ++p) full.push_back(rec[p]);
  full.append_cells(tape.read_cells(payload), l.cat_len);
  const Configuration conf = deserialize(l, full);
  if (!in_universe(inst, conf)) throw CorruptionError("compressed block holds an impossible configuration");
  const auto j = static_cast<std::uint32_t>(rec.read_number(W, ib));
  ZeroGraphView view(inst, params.bound, meter);
  StepsBack back = count_steps_back(view, {conf, j});
  if (!back.count) throw CorruptionError("no halting root within S steps back");
  if (*back.count == 0 || !is_canonical_halt(m, back.end.conf))
    throw CorruptionError("stepping back reached a non-root configuration");
  tape.write_cells(payload, back.end.conf.cat);
  tape.write_number(counter, *back.count - 1);
}

struct RoundRecord {
  std::size_t round = 0;
  bool search = false;          // part of the brute-force tape search
  std::uint64_t tau = 0;        // payload contents the round started from
  bool computed = false;
  std::optional<std::uint64_t> size_accept;
  std::optional<std::uint64_t> size_reject;
  std::uint64_t freed_bits = 0;  // zero padding gained by this round
  std::uint64_t query_bits = 0;  // oracle query length, compute rounds only
};

struct DriverOptions {
  std::optional<CocParams> params;  // defaults from the layout when empty
  ExploreMethod method = ExploreMethod::automatic;
  bool allow_small_bound = false;   // permit S < 2^(W+3)
};

struct DriverResult {
  Verdict verdict;
  ExploredGraph graph;
  std::uint64_t graph_tau = 0;  // tape contents the graph was built from
  std::vector<RoundRecord> trace;
  std::size_t compress_rounds = 0;
  bool searched = false;
  std::uint64_t total_freed_bits = 0;
  unsigned blocks = 0;
};

inline CocParams resolve_params(const Instance& inst, const DriverOptions& opt) {
  CocParams p = opt.params ? *opt.params : CocParams::defaults(inst.layout);
  const unsigned W = inst.layout.extended_width();
  if (p.bound == 0) throw std::invalid_argument("S must be positive");
  if (p.block_bits > 62) throw std::invalid_argument("B must be at most 62");
  if (p.bound > (std::uint64_t{1} << p.block_bits))
    throw std::invalid_argument("S must not exceed 2^B");
  if (!opt.allow_small_bound && (W + 3 >= 63 || p.bound < (std::uint64_t{1} << (W + 3))))
    throw CompletenessError("S = " + std::to_string(p.bound) + " is below 2^(W+3) = 2^" +
                            std::to_string(W + 3));
  return p;
}

// A tape of the driver's shape for this instance, payload tau, counters zero.
inline VirtualTape make_tape(const Instance& inst, const CocParams& p, std::uint64_t tau) {
  VirtualTape tape(inst.layout.cat_len, p.block_bits, block_count(inst.layout, *inst.machine, p.block_bits));
  tape.write_cells(tape.payload(), tau);
  return tape;
}

// Runs compress-or-compute rounds over the counter blocks, falls back to a
// search over payload contents in the freed space if every round
// compresses, asks the oracle once, then decompresses every round in
// reverse order. The tape ends bit-identical to how it started, also when
// the oracle or a round throws; the exception is rethrown afterwards.
inline DriverResult run_driver(const Instance& inst, VirtualTape& tape, const DriverOptions& opt = {},
                               SpaceMeter* meter = nullptr) {
  const Machine& m = *inst.machine;
  const Layout& l = inst.layout;
  const CocParams p = resolve_params(inst, opt);
  if (tape.block_bits() != p.block_bits || tape.cat_len() != l.cat_len)
    throw std::invalid_argument("tape shape does not match the parameters");
  const unsigned k = block_count(l, m, p.block_bits);
  if (tape.blocks() < k) throw std::invalid_argument("tape has fewer than k counter blocks");
  const unsigned freed = freed_bits_per_round(l, m, p.block_bits);
  const unsigned used = p.block_bits - freed;

  DriverResult res;
  res.blocks = k;
  std::optional<ExploredGraph> graph;
  std::exception_ptr failure;

  auto ask_oracle = [&](const ExploredGraph& g, RoundRecord& rec) {
    rec.query_bits = query_bits(g);
    try {
      res.verdict = decide({m.mode(), g});
    } catch (...) {
      failure = std::current_exception();
    }
    graph = g;
  };

  std::size_t executed = 0;
  TapeRegion search_payload, search_counter;
  bool search_active = false;
  try {
    for (unsigned i = 0; i < k && !graph; ++i) {
      RoundRecord rec;
      rec.round = i;
      rec.tau = tape.read_cells(tape.payload());
      CocOutcome out = compute_or_compress(inst, tape, tape.payload(), tape.counter(i), p, opt.method, meter);
      rec.size_accept = out.size_accept;
      rec.size_reject = out.size_reject;
      if (out.computed()) {
        rec.computed = true;
        res.graph_tau = rec.tau;
        ask_oracle(out.graph(), rec);
      } else {
        rec.freed_bits = freed;
        res.total_freed_bits += freed;
        ++executed;
      }
      res.trace.push_back(rec);
    }

    if (!graph) {
      // Every round compressed: the padding of all blocks is free.
      res.searched = true;
      TapeRegion freed_region;
      for (unsigned i = 0; i < k; ++i) {
        auto c = tape.counter(i).segments.front();
        freed_region.segments.emplace_back(c.first + used, freed);
      }
      search_payload = freed_region.slice(0, l.cat_len);
      search_counter = freed_region.slice(l.cat_len, p.block_bits);
      search_active = true;
      const std::uint64_t ctr = p.bound - 1;  // 1^B when S = 2^B
      const std::uint64_t limit = l.cat_len >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << l.cat_len) - 1;
      for (std::uint64_t tk = 0;; ++tk) {
        tape.write_cells(search_payload, tk);
        tape.write_number(search_counter, ctr);
        RoundRecord rec;
        rec.round = k;
        rec.search = true;
        rec.tau = tk;
        CocOutcome out = compute_or_compress(inst, tape, search_payload, search_counter, p, opt.method, meter);
        rec.size_accept = out.size_accept;
        rec.size_reject = out.size_reject;
        if (out.computed()) {
          rec.computed = true;
          res.graph_tau = tk;
          ask_oracle(out.graph(), rec);
          res.trace.push_back(rec);
          break;
        }
        decompress_round(inst, tape, search_payload, search_counter, p, meter);
        if (tape.read_cells(search_payload) != tk || tape.read_number(search_counter) != ctr)
          throw std::logic_error("search round did not decompress to its starting contents");
        res.trace.push_back(rec);
        if (tk == limit) break;
      }
    }
  } catch (...) {
    if (!failure) failure = std::current_exception();
  }
  res.compress_rounds = executed;
  if (search_active) {
    tape.write_cells(search_payload, 0);
    tape.write_number(search_counter, 0);
  }

  for (std::size_t i = executed; i-- > 0;)
    decompress_round(inst, tape, tape.payload(), tape.counter(static_cast<unsigned>(i)), p, meter);

  if (failure) std::rethrow_exception(failure);
  if (!graph) throw CompletenessError("no payload contents reached the compute branch");
  res.graph = std::move(*graph);
  return res;
}

}  // namespace catalytic
