#include "catalytic/corpus.hpp"
#include "catalytic/machine_format.hpp"

#include <gtest/gtest.h>

using namespace catalytic;

namespace {

const char* identity_doc = R"(# three-state identity machine
machine ident
mode deterministic
work 2
cat 3
states start accept reject
start start
accept accept
reject reject
transition start 000 -> accept 0 0 0 0 0 | =
transition start 001 -> accept 0 1 0 0 0 | =
transition start 010 -> accept 1 0 0 0 0 | =
transition start 011 -> accept 1 1 0 0 0 | =
transition start 100 -> accept 0 0 0 0 0 | =
transition start 101 -> accept 0 1 0 0 0 | =
transition start 110 -> accept 1 0 0 0 0 | =
transition start 111 -> accept 1 1 0 0 0 | =
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Format, ParsesIdentityDocument) {
  const MachineSpec spec = parse_machine(identity_doc);
  EXPECT_EQ(spec.states.size(), 3u);
  EXPECT_EQ(spec.name, "ident");
  EXPECT_EQ(spec.work_len, 2u);
  EXPECT_EQ(spec.cat_len, 3u);
  const Machine m(spec);
  const auto& o = m.outcomes(spec.start, 0, 1, 0);
  EXPECT_EQ(o[0].next_state, spec.accept);
  EXPECT_EQ(o[0].work_write, 1);
  EXPECT_EQ(o[0], o[1]);
}

TEST(Format, WriteParseRoundTripOnCorpus) {
  for (const auto& name : corpus_names()) {
    const auto e = corpus_entry(name, 4);
    const std::string text = write_machine(e.spec);
    const MachineSpec back = parse_machine(text);
    EXPECT_EQ(back.states, e.spec.states) << name;
    EXPECT_EQ(back.transitions, e.spec.transitions) << name;
    EXPECT_EQ(back.mode, e.spec.mode) << name;
    EXPECT_EQ(write_machine(back), text) << name;
  }
}

TEST(Format, HaltingStateWithTransitionIsSemanticError) {
  std::string doc = identity_doc;
  doc += "transition accept 000 -> accept 0 0 0 0 0 | =\n";
  EXPECT_THROW(parse_machine(doc), MachineError);
}

TEST(Format, CatalyticLengthAboveTwoToTheSIsRejected) {
  EXPECT_THROW(parse_machine(replace(identity_doc, "cat 3", "cat 5")), MachineError);
  EXPECT_NO_THROW(parse_machine(replace(identity_doc, "cat 3", "cat 4")));
}

TEST(Format, MissingTransitionIsSemanticError) {
  EXPECT_THROW(parse_machine(replace(identity_doc, "transition start 111 -> accept 1 1 0 0 0 | =\n", "")),
               MachineError);
}

TEST(Format, SyntaxErrorsCarryLineAndField) {
  try {
    parse_machine(replace(identity_doc, "work 2", "work two"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.field(), "work");
  }
  try {
    parse_machine(replace(identity_doc, "start 101 -> accept 0 1 0 0 0", "start 101 -> accept 0 1 0 7 0"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 15u);
    EXPECT_EQ(e.field(), "work_move");
  }
  try {
    parse_machine(replace(identity_doc, "transition start 000 -> accept", "transition nowhere 000 -> accept"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 10u);
  }
}

TEST(Format, DeterministicModeNeedsEqualChoices) {
  const std::string doc =
      replace(identity_doc, "transition start 000 -> accept 0 0 0 0 0 | =",
              "transition start 000 -> accept 0 0 0 0 0 | reject 0 0 0 0 0");
  EXPECT_THROW(parse_machine(doc), MachineError);
  EXPECT_NO_THROW(parse_machine(replace(doc, "mode deterministic", "mode nondet")));
}
