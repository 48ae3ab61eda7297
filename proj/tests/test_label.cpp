#include <doctest.h>

#include "aid/label.hpp"
#include "aid/rng.hpp"

using namespace aid;

namespace {

Assignment assign(std::initializer_list<std::pair<VariableIndex, StateIndex>> xs) {
  Assignment a;
  for (const auto& [v, s] : xs) a.set(v, s);
  return a;
}

std::size_t two_states(VariableIndex) { return 2; }

}  // namespace

TEST_CASE("restricting an atom by its own variable") {
  Label atom = Label::atom(0, 1);
  CHECK(atom.restricted(assign({{0, 1}})).is_true());
  CHECK(atom.restricted(assign({{0, 0}})).is_false());
}

TEST_CASE("the night-club disjunction resolves under one assignment") {
  // Or(Accept?=n, Date?=n) restricted by Date? := n is true.
  Label l = Label::disjunction(Label::atom(0, 1), Label::atom(1, 1));
  CHECK(l.restricted(assign({{1, 1}})).is_true());
}

TEST_CASE("conjunction identity folding") {
  Label l = Label::conjunction(Label::atom(0, 0), Label::atom(1, 1));
  Label r = l.restricted(assign({{0, 0}}));
  CHECK(r.op() == Label::Op::Atom);
  CHECK(r.atom_var() == 1);
  CHECK(r.atom_state() == 1);
}

TEST_CASE("assigning variables outside the domain is a no-op") {
  Label l = Label::atom(0, 0);
  CHECK(l.restricted(assign({{5, 1}})).structurally_equal(l));
}

TEST_CASE("total evaluation") {
  CHECK(Label::constant(true).evaluate(Assignment{}));
  Label taut = Label::equivalence(Label::atom(0, 0), Label::atom(0, 0));
  CHECK(taut.evaluate(assign({{0, 1}})));
  Label imp = Label::implication(Label::atom(0, 0), Label::atom(1, 1));
  CHECK_FALSE(imp.evaluate(assign({{0, 0}, {1, 0}})));
  CHECK_THROWS_AS(Label::atom(0, 0).evaluate(Assignment{}), Error);
}

TEST_CASE("syntactic constness and the semantic fallback") {
  CHECK(Label::conjunction(Label::constant(true), Label::constant(true))
            .syntactic_constness() == Label::Constness::True);
  CHECK(Label::atom(0, 0).syntactic_constness() ==
        Label::Constness::NonConstant);

  // Or(X=x, !X=x) is untouched by folding yet semantically true.
  Label excluded_middle =
      Label::disjunction(Label::atom(0, 0), Label::negation(Label::atom(0, 0)));
  CHECK(excluded_middle.syntactic_constness() ==
        Label::Constness::NonConstant);
  auto semantic = excluded_middle.semantic_constant(two_states);
  REQUIRE(semantic.has_value());
  CHECK(*semantic);

  // Beyond the variable bound the check declines to answer.
  Label wide = Label::disjunction(Label::atom(0, 0), Label::atom(1, 0));
  for (VariableIndex v = 2; v < 11; ++v) {
    wide = Label::disjunction(wide, Label::atom(v, 0));
  }
  CHECK_FALSE(wide.semantic_constant(two_states, 8).has_value());
}

TEST_CASE("dom shrinks under restriction") {
  Label l = Label::conjunction(Label::atom(0, 0),
                               Label::disjunction(Label::atom(1, 1),
                                                  Label::atom(2, 0)));
  auto dom = l.restricted(assign({{1, 1}})).domain();
  CHECK(dom.count(1) == 0);
  for (VariableIndex v : dom) CHECK(l.domain().count(v) == 1);
}

namespace {

// Brute-force truth-table evaluator used as the independent reference.
bool reference_eval(const Label& l, const Assignment& a) {
  switch (l.op()) {
    case Label::Op::True:
      return true;
    case Label::Op::False:
      return false;
    case Label::Op::Atom:
      return *a.get(l.atom_var()) == l.atom_state();
    case Label::Op::Not:
      return !reference_eval(l.lhs(), a);
    case Label::Op::And:
      return reference_eval(l.lhs(), a) && reference_eval(l.rhs(), a);
    case Label::Op::Or:
      return reference_eval(l.lhs(), a) || reference_eval(l.rhs(), a);
    case Label::Op::Implies:
      return !reference_eval(l.lhs(), a) || reference_eval(l.rhs(), a);
    case Label::Op::Iff:
      return reference_eval(l.lhs(), a) == reference_eval(l.rhs(), a);
  }
  return false;
}

Label random_formula(Rng& rng, int depth) {
  if (depth == 0 || rng.chance(0.3)) {
    return Label::atom(static_cast<VariableIndex>(rng.below(5)),
                       static_cast<StateIndex>(rng.below(2)));
  }
  switch (rng.below(5)) {
    case 0:
      return Label::negation(random_formula(rng, depth - 1));
    case 1:
      return Label::conjunction(random_formula(rng, depth - 1),
                                random_formula(rng, depth - 1));
    case 2:
      return Label::disjunction(random_formula(rng, depth - 1),
                                random_formula(rng, depth - 1));
    case 3:
      return Label::implication(random_formula(rng, depth - 1),
                                random_formula(rng, depth - 1));
    default:
      return Label::equivalence(random_formula(rng, depth - 1),
                                random_formula(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("eval agrees with the truth-table reference on random formulas") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Label l = random_formula(rng, 6);
    for (int i = 0; i < 32; ++i) {
      Assignment a;
      for (VariableIndex v = 0; v < 5; ++v) {
        a.set(v, static_cast<StateIndex>((i >> v) & 1));
      }
      CHECK(l.evaluate(a) == reference_eval(l, a));
    }
  }
}

TEST_CASE("restriction composes like a merged assignment") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    Label l = random_formula(rng, 5);
    Assignment a = assign({{0, static_cast<StateIndex>(rng.below(2))}});
    Assignment b = assign({{1, static_cast<StateIndex>(rng.below(2))},
                           {3, static_cast<StateIndex>(rng.below(2))}});
    Label two_step = l.restricted(a).restricted(b);
    Label one_step = l.restricted(Assignment::merged(a, b));
    for (int i = 0; i < 32; ++i) {
      Assignment full;
      for (VariableIndex v = 0; v < 5; ++v) {
        full.set(v, static_cast<StateIndex>((i >> v) & 1));
      }
      if (*full.get(0) != *a.get(0)) continue;
      if (*full.get(1) != *b.get(1) || *full.get(3) != *b.get(3)) continue;
      CHECK(two_step.evaluate(full) == one_step.evaluate(full));
    }
    CHECK(two_step.domain().count(0) == 0);
    CHECK(two_step.domain().count(1) == 0);
  }
}
