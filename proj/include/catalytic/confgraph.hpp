#pragma once

// Euler-tour exploration of 0-graphs. The 0-graph keeps only 0-labeled edges
// of the configuration graph and forgets their direction. At each vertex the
// forward 0-edge (if any) has index 0 and the backward 0-edges follow in
// canonical predecessor order. All walk operations look only at the current
// vertex and one neighbour.

#include "catalytic/machine.hpp"
#include "catalytic/space_meter.hpp"

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace catalytic {

struct EdgeRef {
  Configuration conf;
  std::uint32_t index = 0;

  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

// Default tour cap S = 2^B with B = 2W.
inline std::uint64_t default_block_bits(const Layout& l) { return 2ull * l.extended_width(); }

class ZeroGraphView {
 public:
  ZeroGraphView(const Instance& inst, std::uint64_t bound, SpaceMeter* meter = nullptr)
      : inst_(&inst), bound_(bound), meter_(meter) {
    if (bound == 0) throw std::invalid_argument("tour bound S must be positive");
  }

  const Instance& instance() const { return *inst_; }
  const Machine& machine() const { return *inst_->machine; }
  const Layout& layout() const { return inst_->layout; }
  // S: the longest walk any operation will take.
  std::uint64_t bound() const { return bound_; }
  SpaceMeter* meter() const { return meter_; }

  // Number of vertex neighbourhoods computed so far.
  std::uint64_t neighborhood_queries() const { return queries_; }

  struct Neighborhood {
    bool has_forward = false;
    Configuration forward;
    std::vector<Configuration> back;
    std::uint32_t degree() const {
      return static_cast<std::uint32_t>(back.size()) + (has_forward ? 1u : 0u);
    }
  };

  Neighborhood neighborhood(const Configuration& v) const {
    ++queries_;
    Neighborhood n;
    if (!is_halting(*inst_, v)) {
      n.has_forward = true;
      n.forward = step(*inst_, v, 0);
    }
    n.back = zero_predecessors(*inst_, v);
    return n;
  }

  std::uint32_t degree(const Configuration& v) const { return neighborhood(v).degree(); }

  unsigned index_bits() const { return bits_for(machine().degree_bound()); }
  unsigned counter_bits() const { return bits_for(bound_) + 1; }

 private:
  const Instance* inst_;
  std::uint64_t bound_;
  SpaceMeter* meter_;
  mutable std::uint64_t queries_ = 0;
};

namespace detail {

struct Rotated {
  EdgeRef edge;
  std::uint32_t degree;  // degree of edge.conf
};

inline Rotated rotate(const ZeroGraphView& view, const EdgeRef& e,
                      const ZeroGraphView::Neighborhood& nv) {
  auto scratch = charge(view.meter(), "rot.scratch",
                        view.layout().extended_width() + 2ull * view.index_bits());
  const std::uint32_t d = nv.degree();
  if (e.index >= d) return {e, d};
  if (nv.has_forward && e.index == 0) {
    auto nu = view.neighborhood(nv.forward);
    for (std::uint32_t k = 0; k < nu.back.size(); ++k) {
      if (nu.back[k] == e.conf) {
        return {{nv.forward, (nu.has_forward ? 1u : 0u) + k}, nu.degree()};
      }
    }
    throw std::logic_error("forward 0-edge missing from its endpoint's predecessor list");
  }
  const Configuration& u = nv.back[e.index - (nv.has_forward ? 1u : 0u)];
  return {{u, 0}, view.degree(u)};
}

}  // namespace detail

// Rot: the i-th edge of v is the j-th edge of u. Identity for i >= deg(v).
inline EdgeRef rot(const ZeroGraphView& view, const EdgeRef& e) {
  return detail::rotate(view, e, view.neighborhood(e.conf)).edge;
}

// Next(v, i) = (u, j + 1 mod deg(u)) where Rot(v, i) = (u, j).
inline EdgeRef next_edge(const ZeroGraphView& view, const EdgeRef& e) {
  auto nv = view.neighborhood(e.conf);
  if (e.index >= nv.degree()) return e;
  auto [r, du] = detail::rotate(view, e, nv);
  r.index = (r.index + 1) % du;
  return r;
}

// StepBack(u, j) = Rot(u, j - 1 mod deg(u)); the inverse of next_edge.
inline EdgeRef step_back(const ZeroGraphView& view, const EdgeRef& e) {
  auto nu = view.neighborhood(e.conf);
  const std::uint32_t d = nu.degree();
  if (e.index >= d) return e;
  EdgeRef prev{e.conf, (e.index + d - 1) % d};
  return detail::rotate(view, prev, nu).edge;
}

// t-fold next_edge, t <= S.
inline EdgeRef walk(const ZeroGraphView& view, EdgeRef e, std::uint64_t t) {
  if (t > view.bound()) throw std::invalid_argument("walk length exceeds the bound S");
  auto counter = charge(view.meter(), "walk.counter", view.counter_bits());
  for (std::uint64_t i = 0; i < t; ++i) e = next_edge(view, e);
  return e;
}

struct StepsBack {
  std::optional<std::uint64_t> count;  // nullopt: more than S steps
  EdgeRef end;
};

// Steps back until reaching (h, 0) for a halting configuration h.
inline StepsBack count_steps_back(const ZeroGraphView& view, EdgeRef e) {
  auto counter = charge(view.meter(), "count_steps_back.counter", view.counter_bits());
  std::uint64_t count = 0;
  while (!(is_halting(view.instance(), e.conf) && e.index == 0)) {
    if (count == view.bound()) return {std::nullopt, e};
    e = step_back(view, e);
    ++count;
  }
  return {count, e};
}

// Least t >= 1 with walk((h,0), t) == (h,0), or nullopt when t > S.
inline std::optional<std::uint64_t> tour_size(const ZeroGraphView& view, const Configuration& h) {
  if (!is_halting(view.instance(), h)) throw std::invalid_argument("size needs a halting configuration");
  auto counter = charge(view.meter(), "size.counter", view.counter_bits());
  auto position = charge(view.meter(), "size.position",
                         view.layout().extended_width() + view.index_bits());
  const EdgeRef origin{h, 0};
  EdgeRef e = origin;
  for (std::uint64_t t = 1; t <= view.bound(); ++t) {
    e = next_edge(view, e);
    if (e == origin) return t;
  }
  return std::nullopt;
}

inline BitString conf_serialize(const Layout& l, const Configuration& c) { return serialize(l, c); }

inline unsigned conf_bit(const Layout& l, const Configuration& c, unsigned b) {
  if (b >= l.width()) throw std::out_of_range("configuration bit index out of range");
  return serialize(l, c)[b];
}

// Bit b of the configuration reached by walk((h,0), t). Walks there, reads
// the bit and walks back, so h and t are all that survive the call.
inline unsigned conf_bit_at(const ZeroGraphView& view, const Configuration& h, unsigned b,
                            std::uint64_t t) {
  if (!is_halting(view.instance(), h)) throw std::invalid_argument("ConfBit needs a halting configuration");
  if (b >= view.layout().width()) throw std::out_of_range("configuration bit index out of range");
  if (t > view.bound()) throw std::out_of_range("walk length exceeds the bound S");
  auto index = charge(view.meter(), "confbit.index", bits_for(view.layout().width()));
  auto position = charge(view.meter(), "confbit.position",
                         view.layout().extended_width() + view.index_bits());
  EdgeRef e = walk(view, {h, 0}, t);
  const unsigned bit = conf_bit(view.layout(), e.conf, b);
  {
    auto counter = charge(view.meter(), "confbit.back_counter", view.counter_bits());
    for (std::uint64_t i = 0; i < t; ++i) e = step_back(view, e);
  }
  if (!(e == EdgeRef{h, 0})) throw std::logic_error("ConfBit failed to return to its origin");
  return bit;
}

// 1 iff walk((h,i), t) ends on an index-0 edge slot.
inline bool canon(const ZeroGraphView& view, const Configuration& h, std::uint32_t i,
                  std::uint64_t t) {
  return walk(view, {h, i}, t).index == 0;
}

// Graphviz rendering of the 0-graph component of a halting configuration.
// Vertices carry the serialized configuration (hex) and canonical index;
// edges point along the machine's direction and carry "tail slot/head slot".
inline std::string export_component_dot(const ZeroGraphView& view, const Configuration& h,
                                        const std::string& name = "component") {
  auto size = tour_size(view, h);
  if (!size) throw std::runtime_error("component tour exceeds the bound S");
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n";
  EdgeRef e{h, 0};
  std::vector<std::pair<std::uint64_t, Configuration>> canonical;
  for (std::uint64_t t = 0; t < *size; ++t) {
    if (e.index == 0) {
      canonical.emplace_back(t, e.conf);
      os << "  n" << t << " [label=\"" << serialize(view.layout(), e.conf).to_hex() << "\\nt=" << t
         << "\"];\n";
    }
    e = next_edge(view, e);
  }
  auto id_of = [&](const Configuration& c) {
    for (auto& [t, conf] : canonical)
      if (conf == c) return t;
    throw std::logic_error("vertex without canonical index");
  };
  for (auto& [t, conf] : canonical) {
    auto n = view.neighborhood(conf);
    if (!n.has_forward || n.degree() == 0) continue;
    EdgeRef r = rot(view, {conf, 0});
    os << "  n" << t << " -> n" << id_of(r.conf) << " [label=\"0/" << r.index << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace catalytic
