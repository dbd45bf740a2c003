#include "catalytic/corpus.hpp"
#include "catalytic/semantics.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace catalytic;
using catalytic::testing::apply;
using catalytic::testing::universe;

namespace {

struct Oracle {
  // (source, target) -> label set, from direct table application.
  std::map<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>, std::uint8_t> edges;
};

std::vector<std::uint64_t> key(const Configuration& c) {
  return {c.state, c.input_head, c.work_head, c.cat_head, c.work, c.cat};
}

// Checks forward_edges and inverse_edges against edges computed by direct
// table lookup over the whole universe.
void check_edges_against_oracle(const Instance& inst) {
  const Machine& m = *inst.machine;
  std::map<std::vector<std::uint64_t>, std::map<std::vector<std::uint64_t>, std::uint8_t>> out, in;
  const auto all = universe(inst);
  for (const auto& c : all) {
    if (m.is_halting_state(c.state)) continue;
    for (unsigned ch = 0; ch < 2; ++ch) {
      const Configuration n = apply(inst, c, ch);
      const std::uint8_t bit = ch == 0 ? label_zero : label_one;
      out[key(c)][key(n)] |= bit;
      in[key(n)][key(c)] |= bit;
    }
  }
  for (const auto& c : all) {
    std::map<std::vector<std::uint64_t>, std::uint8_t> got_out, got_in;
    for (const auto& e : forward_edges(inst, c)) {
      ASSERT_TRUE(got_out.emplace(key(e.conf), e.labels).second) << "duplicate successor";
    }
    for (const auto& e : inverse_edges(inst, c)) {
      ASSERT_TRUE(got_in.emplace(key(e.conf), e.labels).second) << "duplicate predecessor";
    }
    ASSERT_EQ(got_out, out[key(c)]);
    ASSERT_EQ(got_in, in[key(c)]);
  }
}

}  // namespace

TEST(Step, IdentityMachineGoesToAcceptOnBothChoices) {
  const Machine m(make_identity(3));
  const Instance inst(m, BitString::parse("01"));
  for (std::uint64_t tau = 0; tau < 8; ++tau) {
    const auto start = start_configuration(m, tau);
    EXPECT_EQ(step(inst, start, 0), accept_configuration(m, tau));
    EXPECT_EQ(step(inst, start, 1), accept_configuration(m, tau));
  }
}

TEST(Step, FlipMachineFlipsCatalyticCellZero) {
  const Machine m(make_flip(3));
  const Instance inst(m, BitString::parse("1"));
  const auto next = step(inst, start_configuration(m, 0b010), 0);
  EXPECT_EQ(m.spec().states[next.state], "F");
  EXPECT_EQ(next.cat, 0b011u);
  EXPECT_EQ(next.work, 0u);
}

TEST(Step, HaltingConfigurationIsAContractViolation) {
  const Machine m(make_identity(2));
  const Instance inst(m, BitString{});
  EXPECT_THROW(step(inst, accept_configuration(m, 0), 0), std::logic_error);
}

TEST(Step, MovesOffTheTapeAreClamped) {
  auto spec = make_identity(2);
  for (auto& t : spec.transitions)
    if (t) (*t)[0].input_move = (*t)[1].input_move = -1, (*t)[0].cat_move = (*t)[1].cat_move = -1;
  const Machine m(spec);
  const Instance inst(m, BitString{});
  const auto n = step(inst, start_configuration(m, 3), 0);
  EXPECT_EQ(n.input_head, 0u);
  EXPECT_EQ(n.cat_head, 0u);
}

TEST(ForwardEdges, Examples) {
  const Machine id(make_identity(2));
  const Instance inst(id, BitString::parse("01"));
  EXPECT_TRUE(forward_edges(inst, accept_configuration(id, 1)).empty());
  const auto f = forward_edges(inst, start_configuration(id, 1));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].labels, label_both);
  EXPECT_EQ(f[0].conf, accept_configuration(id, 1));

  const Machine nd(make_stconn(2, false));
  const Instance g(nd, BitString::parse("111111"));
  const auto b = forward_edges(g, start_configuration(nd, 0));
  ASSERT_EQ(b.size(), 2u);
  std::set<std::uint8_t> labels{b[0].labels, b[1].labels};
  EXPECT_EQ(labels, (std::set<std::uint8_t>{label_zero, label_one}));
}

TEST(InverseEdges, Examples) {
  const Machine id(make_identity(2));
  const Instance inst(id, BitString::parse("01"));
  const auto p = inverse_edges(inst, accept_configuration(id, 2));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].labels, label_both);
  EXPECT_EQ(p[0].conf, start_configuration(id, 2));
  EXPECT_TRUE(inverse_edges(inst, start_configuration(id, 2)).empty());
}

TEST(InverseEdges, SortedByPredecessorDescriptor) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Machine m(catalytic::testing::random_spec(rng, 5, 2, 3));
    const Instance inst(m, catalytic::testing::random_input(rng, 3));
    for (const auto& c : universe(inst)) {
      const auto preds = inverse_edges(inst, c);
      for (std::size_t i = 1; i < preds.size(); ++i) {
        const auto& a = preds[i - 1].conf;
        const auto& b = preds[i].conf;
        auto desc = [&](const Configuration& p) {
          return std::make_tuple(p.state, int(c.input_head) - int(p.input_head), int(c.work_head) - int(p.work_head),
                                 int(c.cat_head) - int(p.cat_head), cell(p.work, p.work_head), cell(p.cat, p.cat_head));
        };
        ASSERT_LT(desc(a), desc(b));
      }
    }
  }
}

// Duality: both edge enumerations agree with direct table application,
// exhaustively for n <= 4, s <= 3, c <= 4.
TEST(Duality, CorpusMachinesExhaustive) {
  for (const auto& name : corpus_names()) {
    for (unsigned c : {1u, 2u, 4u}) {
      const auto e = corpus_entry(name, c);
      const Machine m(e.spec);
      for (const auto& x : e.inputs) {
        if (x.size() > 4) continue;
        check_edges_against_oracle(Instance(m, x));
      }
    }
  }
}

TEST(Duality, WideInputCorpusMachinesOneInput) {
  for (const char* name : {"ND-STCONN", "MAJ3"}) {
    const Machine m(corpus_entry(name, 1).spec);
    check_edges_against_oracle(Instance(m, BitString::parse("101101")));
  }
}

TEST(Duality, RandomMachinesExhaustive) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const unsigned s = 1 + rng() % 3;
    const unsigned c = 1 + rng() % std::min(4u, 1u << s);
    const unsigned n = rng() % 5;
    const Machine m(catalytic::testing::random_spec(rng, 3 + rng() % 3, s, c));
    check_edges_against_oracle(Instance(m, catalytic::testing::random_input(rng, n)));
  }
}

TEST(Validate, Examples) {
  const Machine id(make_identity(3));
  for (std::uint64_t tau = 0; tau < 8; ++tau) {
    const auto r = validate(Instance(id, BitString::parse("01")), tau);
    EXPECT_TRUE(r.valid());
    EXPECT_EQ(r.reachable, 2u);
  }
  const Machine loop(make_invalid_loop(2));
  const auto rl = validate(Instance(loop, BitString::parse("0")), 1);
  EXPECT_EQ(rl.kind, ValidityReport::Kind::cycle);
  ASSERT_GE(rl.witness.size(), 2u);
  EXPECT_EQ(rl.witness.front(), rl.witness.back());
  const Machine tape(make_invalid_tape(2));
  const auto rt = validate(Instance(tape, BitString::parse("0")), 2);
  EXPECT_EQ(rt.kind, ValidityReport::Kind::tape_not_restored);
  EXPECT_EQ(rt.witness.back().cat, 3u);
}

TEST(Validate, NonNormalizedHaltIsInvalid) {
  auto spec = make_identity(2);
  for (auto& t : spec.transitions)
    if (t) (*t)[0].work_move = (*t)[1].work_move = 1;
  const Machine m(spec);
  EXPECT_EQ(validate(Instance(m, BitString{}), 0).kind, ValidityReport::Kind::bad_halt);
}

TEST(BruteSemantics, Examples) {
  const Machine id(make_identity(2, Mode::nondet));
  EXPECT_EQ(brute_semantics(Instance(id, BitString{}), 0).outcome, Outcome::accept);
  const Machine coin(make_coin(2));
  const auto v = brute_semantics(Instance(coin, BitString::parse("0")), 0);
  EXPECT_EQ(v.outcome, Outcome::reject);
  ASSERT_TRUE(v.probability);
  EXPECT_EQ(*v.probability, Dyadic(1, 1));
  const Machine inv(make_invalid_loop(2));
  EXPECT_THROW(brute_semantics(Instance(inv, BitString::parse("0")), 0), InvalidRun);
}

TEST(BruteSemantics, StConnMatchesGraphSearch) {
  const Machine nd(make_stconn(2, false));
  const Machine co(make_stconn(2, true));
  for (const auto& x : all_inputs(6)) {
    const bool connected = catalytic::testing::graph_connects_0_3(x);
    for (std::uint64_t tau : {0u, 3u}) {
      EXPECT_EQ(brute_semantics(Instance(nd, x), tau).outcome, connected ? Outcome::accept : Outcome::reject)
          << x.to_string();
      EXPECT_EQ(brute_semantics(Instance(co, x), tau).outcome, connected ? Outcome::reject : Outcome::accept)
          << x.to_string();
    }
  }
  EXPECT_EQ(brute_semantics(Instance(nd, BitString::parse("100101")), 0).outcome, Outcome::accept);  // 4-cycle
}

TEST(BruteSemantics, BoundedPromiseViolationIsReported) {
  const Machine maj(make_majority(2));
  try {
    brute_semantics(Instance(maj, majority_violation_input()), 0);
    FAIL() << "expected PromiseViolation";
  } catch (const PromiseViolation& e) {
    EXPECT_EQ(e.probability(), Dyadic(1, 1));
  }
}

TEST(BruteSemantics, DeterministicCollapsesToSinglePath) {
  for (const char* name : {"M_id", "M_flip", "CHAIN", "CATCHAIN"}) {
    const auto e = corpus_entry(name, 3);
    const Machine m(e.spec);
    for (const auto& x : e.inputs) {
      const Instance inst(m, x);
      for (std::uint64_t tau = 0; tau < 8; ++tau) {
        const auto end = simulate_path(inst, tau);
        ASSERT_TRUE(end);
        EXPECT_EQ(end->state == m.spec().accept, brute_semantics(inst, tau).outcome == Outcome::accept);
      }
    }
  }
}

TEST(BruteSemantics, ProbabilitiesAreNormalized) {
  for (const char* name : {"COIN", "MAJ3"}) {
    const auto e = corpus_entry(name, 2);
    const Machine m(e.spec);
    for (const auto& x : e.inputs) {
      const Instance inst(m, x);
      const auto g = explore_reachable(inst, 1);
      const auto p = acceptance_probabilities(m, g);
      std::vector<unsigned> longest(g.nodes.size(), 0);
      for (std::size_t v : g.reverse_topological)
        for (auto [l, u] : g.successors[v]) longest[v] = std::max(longest[v], longest[u] + 1);
      for (std::size_t v = 0; v < p.size(); ++v) {
        EXPECT_GE(p[v], Dyadic::zero());
        EXPECT_LE(p[v], Dyadic::one());
        EXPECT_LE(p[v].exponent(), longest[v]);
      }
    }
  }
}

TEST(BruteSemantics, MajorityProbabilitiesMatchEnumeration) {
  const Machine m(make_majority(3));
  for (const auto& x : all_inputs(6)) {
    const auto [good, total] = catalytic::testing::majority_fraction(x);
    const Instance inst(m, x);
    EXPECT_EQ(reference_probability(inst, 5).compare_fraction(good, total), 0) << x.to_string();
  }
}

TEST(DegreeBound, BoundsEveryDegreeOnCorpusAndRandomMachines) {
  auto check = [](const Instance& inst) {
    std::map<std::vector<std::uint64_t>, std::set<std::vector<std::uint64_t>>> in, out;
    for (const auto& c : universe(inst)) {
      if (inst.machine->is_halting_state(c.state)) continue;
      for (unsigned ch = 0; ch < 2; ++ch) {
        const auto n = apply(inst, c, ch);
        out[key(c)].insert(key(n));
        in[key(n)].insert(key(c));
      }
    }
    std::size_t worst = 0;
    for (const auto& c : universe(inst)) worst = std::max(worst, in[key(c)].size() + out[key(c)].size());
    EXPECT_LE(worst, inst.machine->degree_bound());
  };
  for (const auto& name : corpus_names()) {
    const auto e = corpus_entry(name, 2);
    const Machine m(e.spec);
    check(Instance(m, e.inputs.front()));
  }
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const Machine m(catalytic::testing::random_spec(rng, 4, 2, 2));
    check(Instance(m, catalytic::testing::random_input(rng, rng() % 4)));
  }
}

// d_M - 2 against the exhaustive maximum in-degree at n = 2, c = 2.
TEST(DegreeBound, MatchesExhaustiveSweepForIdentityAndFlip) {
  for (const char* name : {"M_id", "M_flip"}) {
    const Machine m(corpus_entry(name, 2).spec);
    const Instance inst(m, BitString::parse("01"));
    std::map<std::vector<std::uint64_t>, std::set<std::vector<std::uint64_t>>> in;
    for (const auto& c : universe(inst)) {
      if (m.is_halting_state(c.state)) continue;
      for (unsigned ch = 0; ch < 2; ++ch) in[key(apply(inst, c, ch))].insert(key(c));
    }
    std::size_t max_in = 0;
    for (const auto& [k, v] : in) max_in = std::max(max_in, v.size());
    EXPECT_EQ(m.degree_bound() - 2, max_in) << name;
  }
  EXPECT_EQ(Machine(make_identity(2)).degree_bound(), 3u);
}
