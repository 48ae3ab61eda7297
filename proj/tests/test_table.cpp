#include <doctest.h>

#include <cmath>

#include "aid/rng.hpp"
#include "aid/table.hpp"
#include "support/load.hpp"

using namespace aid;

namespace {

PartialTable table1(TableKind kind, VariableIndex v, std::uint32_t card,
                    std::initializer_list<double> cells) {
  PartialTable t(kind, {v}, {card});
  std::size_t i = 0;
  for (double c : cells) t.set(i++, c);
  return t;
}

}  // namespace

TEST_CASE("undefined value is a multiplicative zero") {
  auto bot = PartialTable::undefined_scalar(TableKind::Probability);
  auto five = PartialTable::scalar(TableKind::Probability, 5.0);
  CHECK_FALSE(multiply(bot, five).cell(std::size_t{0}).has_value());
  CHECK_FALSE(multiply(bot, bot).cell(std::size_t{0}).has_value());
  auto a = PartialTable::scalar(TableKind::Probability, 0.3);
  auto b = PartialTable::scalar(TableKind::Probability, 0.5);
  CHECK(*multiply(a, b).cell(std::size_t{0}) == doctest::Approx(0.15));
}

TEST_CASE("chain-rule product of defined tables sums to one") {
  auto pa = table1(TableKind::Probability, 0, 2, {0.25, 0.75});
  PartialTable pba(TableKind::Probability, {0, 1}, {2, 2});
  pba.set({0, 0}, 0.9);
  pba.set({0, 1}, 0.1);
  pba.set({1, 0}, 0.4);
  pba.set({1, 1}, 0.6);
  auto joint = multiply(pa, pba);
  auto total = sum_out(sum_out(joint, 0), 1);
  CHECK(*total.cell(std::size_t{0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("undefined value is an additive identity") {
  auto bot = PartialTable::undefined_scalar(TableKind::Utility);
  auto five = PartialTable::scalar(TableKind::Utility, 5.0);
  CHECK(*add(bot, five).cell(std::size_t{0}) == 5.0);
  CHECK(*add(PartialTable::scalar(TableKind::Utility, 2.0),
             PartialTable::scalar(TableKind::Utility, 3.0))
            .cell(std::size_t{0}) == 5.0);
  // A table of undefined entries is a left and right identity.
  PartialTable all_bot(TableKind::Utility, {0}, {2});
  all_bot.set_undefined(std::size_t{0});
  all_bot.set_undefined(std::size_t{1});
  auto t = table1(TableKind::Utility, 0, 2, {1.5, 7.0});
  CHECK(approx_equal(add(all_bot, t), t, 0.0));
  CHECK_THROWS_AS(add(t, table1(TableKind::Probability, 0, 2, {0.5, 0.5})),
                  Error);
}

TEST_CASE("sum_out treats undefined cells as absent") {
  auto t = table1(TableKind::Probability, 3, 2, {0.3, 0.7});
  CHECK(*sum_out(t, 3).cell(std::size_t{0}) == doctest::Approx(1.0));

  PartialTable partial(TableKind::Probability, {3}, {2});
  partial.set_undefined(std::size_t{0});
  partial.set(std::size_t{1}, 0.4);
  CHECK(*sum_out(partial, 3).cell(std::size_t{0}) == doctest::Approx(0.4));

  PartialTable none(TableKind::Probability, {3}, {2});
  none.set_undefined(std::size_t{0});
  none.set_undefined(std::size_t{1});
  CHECK_FALSE(sum_out(none, 3).cell(std::size_t{0}).has_value());
  CHECK_THROWS_AS(sum_out(t, 9), Error);
}

TEST_CASE("max_out with masks and the deterministic tie-break") {
  auto t = table1(TableKind::Utility, 1, 2, {1.0, 3.0});
  auto [best, am] = max_out(t, 1, {1, 1});
  CHECK(*best.cell(std::size_t{0}) == 3.0);
  CHECK(am.choice[0] == 1);

  auto t2 = table1(TableKind::Utility, 1, 2, {7.0, 9.0});
  auto [best2, am2] = max_out(t2, 1, {1, 0});  // second option masked
  CHECK(*best2.cell(std::size_t{0}) == 7.0);
  CHECK(am2.choice[0] == 0);

  auto tied = table1(TableKind::Utility, 1, 3, {5.0, 5.0, 5.0});
  auto [best3, am3] = max_out(tied, 1, {1, 1, 1});
  CHECK(am3.choice[0] == 0);  // lowest state index wins ties
  CHECK(*best3.cell(std::size_t{0}) == 5.0);

  PartialTable bots(TableKind::Utility, {1}, {2});
  bots.set_undefined(std::size_t{0});
  bots.set_undefined(std::size_t{1});
  auto [best4, am4] = max_out(bots, 1, {1, 1});
  CHECK_FALSE(best4.cell(std::size_t{0}).has_value());
  CHECK(am4.choice[0] == kNoState);
}

TEST_CASE("instantiate slices and drops assigned dimensions") {
  PartialTable t(TableKind::Probability, {0, 1}, {2, 3});
  for (StateIndex a = 0; a < 2; ++a) {
    for (StateIndex b = 0; b < 3; ++b) {
      t.set({a, b}, a * 10.0 + b);
    }
  }
  Assignment at;
  at.set(0, 1);
  auto sliced = instantiate(t, at);
  CHECK(sliced.domain() == std::vector<VariableIndex>{1});
  CHECK(*sliced.cell(std::vector<StateIndex>{2}) == 12.0);
  CHECK(approx_equal(instantiate(t, Assignment{}), t, 0.0));
}

TEST_CASE("extend_with stacks branch tables along a new axis") {
  auto b0 = PartialTable::scalar(TableKind::Utility, 4.0);
  auto b1 = PartialTable::scalar(TableKind::Utility, 6.0);
  auto merged = extend_with(TableKind::Utility, 7, 2, {{0, b0}, {1, b1}});
  CHECK(merged.domain() == std::vector<VariableIndex>{7});
  CHECK(*merged.cell(std::vector<StateIndex>{0}) == 4.0);
  CHECK(*merged.cell(std::vector<StateIndex>{1}) == 6.0);

  // A branch absent from the list pads with the additive identity for
  // utilities and the empty product for probabilities.
  auto partial = extend_with(TableKind::Utility, 7, 2, {{1, b1}});
  CHECK_FALSE(partial.cell(std::vector<StateIndex>{0}).has_value());
  auto prob = extend_with(TableKind::Probability, 7, 2,
                          {{1, PartialTable::scalar(TableKind::Probability,
                                                    0.25)}});
  CHECK(*prob.cell(std::vector<StateIndex>{0}) == 1.0);
  CHECK(*prob.cell(std::vector<StateIndex>{1}) == 0.25);

  // Branches over different domains merge through the union shell.
  auto wide = extend_with(TableKind::Utility, 7, 2,
                          {{0, table1(TableKind::Utility, 2, 2, {1.0, 2.0})},
                           {1, b1}});
  CHECK(wide.domain() == std::vector<VariableIndex>{2, 7});
  CHECK(*wide.cell(std::vector<StateIndex>{1, 0}) == 2.0);
  CHECK(*wide.cell(std::vector<StateIndex>{1, 1}) == 6.0);
}

TEST_CASE("instantiate commutes with sum_out over a different variable") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    PartialTable t(TableKind::Probability, {0, 1}, {2, 3});
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (rng.chance(0.2)) {
        t.set_undefined(i);
      } else {
        t.set(i, rng.uniform());
      }
    }
    Assignment a;
    a.set(0, static_cast<StateIndex>(rng.below(2)));
    auto left = instantiate(sum_out(t, 1), a);
    auto right = sum_out(instantiate(t, a), 1);
    CHECK(approx_equal(left, right, 1e-12));
  }
}

TEST_CASE("divide_mass keeps utilities conditional") {
  auto num = table1(TableKind::Utility, 0, 2, {2.0, 0.0});
  auto den = table1(TableKind::Probability, 0, 2, {0.5, 0.0});
  auto q = divide_mass(num, den);
  CHECK(*q.cell(std::size_t{0}) == doctest::Approx(4.0));
  CHECK_FALSE(q.cell(std::size_t{1}).has_value());  // zero mass is undefined
}

TEST_CASE("slicing the bundled acceptance table gives its column") {
#ifdef AID_CORPUS_DIR
  // P(Accept? | Likes me?) at Likes me?=y is the first row of the bundled
  // realization.
  auto parsed = parse(aid::testing::read_corpus("dating.aid"));
  REQUIRE(parsed.ok());
  const Model& m = *parsed.model;
  auto accept = *m.find("Accept?");
  auto lm = *m.find("Likes me?");
  Assignment at;
  at.set(lm, *m.find_state(lm, "y"));
  auto column = instantiate(m.probabilities().at(accept), at);
  CHECK(column.domain() == std::vector<VariableIndex>{accept});
  CHECK(*column.cell(std::vector<StateIndex>{0}) == doctest::Approx(0.9));
  CHECK(*column.cell(std::vector<StateIndex>{1}) == doctest::Approx(0.1));
#endif
}
