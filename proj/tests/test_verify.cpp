#include "catalytic/verify.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace catalytic;

namespace {

std::string fact(const LemmaReport& r, const std::string& key) {
  for (const auto& [k, v] : r.facts)
    if (k == key) return v;
  return "<missing>";
}

const LemmaReport& by_name(const std::vector<LemmaReport>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.lemma == name) return r;
  throw std::logic_error("no report " + name);
}

}  // namespace

TEST(Lemmas, HoldOnValidCorpusMachines) {
  for (const auto& name : catalytic::testing::valid_corpus_names()) {
    for (unsigned c : {1u, 2u, 3u, 4u}) {
      const auto e = corpus_entry(name, c);
      const Machine m(e.spec);
      for (const auto& x : e.inputs) {
        for (const auto& r : check_lemmas(Instance(m, x))) {
          EXPECT_TRUE(r.pass) << format_report(r);
          EXPECT_GT(r.checked, 0u) << r.lemma;
        }
      }
    }
  }
}

// Component sizes in the snapshot match components of the 0-graph built
// from forward 0-steps alone.
TEST(Snapshot, ComponentsMatchZeroGraphOracle) {
  for (const char* name : {"M_flip", "ND-STCONN", "CATCHAIN", "INVALID-TAPE"}) {
    const Machine m(corpus_entry(name, 2).spec);
    const Instance inst(m, BitString::parse("101"));
    const auto s = snapshot(inst);
    const catalytic::testing::ZeroGraph zg(inst);
    detail::Components comps(s);
    ASSERT_EQ(s.tapes(), 4u);
    for (std::uint64_t tau = 0; tau < 4; ++tau) {
      EXPECT_EQ(comps.size[comps.of[s.accept_root[tau]]], zg.component(accept_configuration(m, tau)).size());
      EXPECT_EQ(comps.size[comps.of[s.reject_root[tau]]], zg.component(reject_configuration(m, tau)).size());
    }
  }
}

TEST(Lemmas, IdentitySums) {
  for (unsigned c : {1u, 3u, 5u}) {
    const Machine m(make_identity(c));
    const Instance inst(m, BitString::parse("01"));
    const auto rs = check_lemmas(inst);
    std::size_t halting = 0;
    for (const auto& v : catalytic::testing::universe(inst)) halting += m.is_halting_state(v.state);
    const auto& ex = by_name(rs, "expectation");
    EXPECT_EQ(fact(ex, "accept sum"), std::to_string(2u << c));
    EXPECT_EQ(fact(ex, "reject sum"), std::to_string(1u << c));
    EXPECT_EQ(fact(by_name(rs, "disjointness"), "intersecting tape pairs"), "0");
    EXPECT_EQ(fact(by_name(rs, "tree_facts"), "halting components"), std::to_string(halting));
  }
}

TEST(NegativeControls, TwoHaltingVerticesInOneComponent) {
  const auto s = catalytic::testing::two_root_snapshot();
  const auto r = check_tree_facts(s);
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.witness.find("2 halting"), std::string::npos) << r.witness;
  EXPECT_FALSE(check_disjointness(s).pass);
}

TEST(NegativeControls, CycleInHaltingComponent) {
  ComponentSnapshot s;
  const auto h = s.add_vertex("h", true);
  const auto x = s.add_vertex("x", false);
  const auto y = s.add_vertex("y", false);
  s.edges = {{h, x}, {x, y}, {y, h}};
  s.accept_root = {h};
  s.reject_root = {s.add_vertex("r", true)};
  s.reached = {{}};
  EXPECT_FALSE(check_tree_facts(s).pass);
}

TEST(NegativeControls, OversizedComponents) {
  const auto s = catalytic::testing::oversized_snapshot();
  const auto r = check_expectation(s);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(fact(r, "accept sum"), "20");
  EXPECT_EQ(fact(r, "tapes with both components <= 4*2^W"), "0/2");
  EXPECT_TRUE(check_tree_facts(s).pass);
}

TEST(NegativeControls, TapeChangingMachine) {
  const Machine m(make_invalid_tape(2));
  const auto rs = check_lemmas(Instance(m, BitString::parse("0")));
  EXPECT_TRUE(by_name(rs, "tree_facts").pass);
  const auto& d = by_name(rs, "disjointness");
  EXPECT_FALSE(d.pass);
  EXPECT_EQ(fact(d, "intersecting tape pairs"), "2");
  EXPECT_FALSE(by_name(rs, "containment").pass);
  EXPECT_NE(by_name(rs, "containment").witness.find("outside both halting components"), std::string::npos);
}

TEST(NegativeControls, NonHaltingMachine) {
  const Machine m(make_invalid_loop(2));
  const auto rs = check_lemmas(Instance(m, BitString::parse("0")));
  EXPECT_FALSE(by_name(rs, "containment").pass);
  EXPECT_TRUE(by_name(rs, "tree_facts").pass);
}

TEST(Report, Format) {
  LemmaReport r;
  r.lemma = "containment";
  r.machine = "M";
  r.parameters = "c=1";
  r.checked = 3;
  r.fact("k", "v");
  r.fail("first");
  r.fail("second");
  EXPECT_EQ(format_report(r),
            "lemma containment\n  machine: M\n  parameters: c=1\n  checked: 3\n  k: v\n  result: fail\n"
            "  witness: first\n");
}

TEST(Sweep, CorpusEquivalenceAtSmallC) {
  for (const auto& name : catalytic::testing::valid_corpus_names()) {
    const auto e = corpus_entry(name, 3);
    const Machine m(e.spec);
    const auto res = equivalence_sweep(m, e.inputs, all_taus(3));
    EXPECT_TRUE(res.report.pass) << format_report(res.report);
    EXPECT_EQ(res.restorations, res.report.checked);
  }
}

TEST(Sweep, ReportsPromiseViolationOnBothSides) {
  const Machine m(make_majority(2));
  const auto res = equivalence_sweep(m, {majority_violation_input()}, all_taus(2));
  EXPECT_TRUE(res.report.pass) << format_report(res.report);
  for (const auto& run : res.runs) {
    EXPECT_EQ(run.reference, "promise-violation");
    EXPECT_EQ(run.driver, "promise-violation");
    EXPECT_TRUE(run.restored);
  }
}

TEST(Sweep, DetectsDisagreementOnInvalidMachine) {
  const Machine m(make_invalid_tape(2));
  EXPECT_THROW(equivalence_sweep(m, {BitString::parse("0")}, all_taus(2)), std::exception);
}
