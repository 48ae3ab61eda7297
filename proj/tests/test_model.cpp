#include <doctest.h>

#include <algorithm>

#include "aid/model.hpp"
#include "support/load.hpp"

using namespace aid;
using aid::testing::load_corpus;
using aid::testing::read_corpus;

TEST_CASE("the dating model builds with the drawn node kinds") {
  Model m = load_corpus("dating.aid");
  CHECK(m.node_count() == 17);
  CHECK(m.node(*m.find("Date?")).kind == NodeKind::TestDecision);
  CHECK(m.node(*m.find("Club?")).kind == NodeKind::TestDecision);
  for (const char* name : {"Night Club?", "To do?", "Movie", "Menu"}) {
    CHECK(m.node(*m.find(name)).kind == NodeKind::ActionDecision);
  }
  int values = 0;
  for (VariableIndex v = 0; v < m.node_count(); ++v) {
    if (m.is_value(v)) ++values;
  }
  CHECK(values == 4);
}

TEST_CASE("a single decision with one utility child is a valid model") {
  ModelBuilder b;
  auto d = b.add_node("D", NodeKind::ActionDecision, {"a", "b"});
  auto u = b.add_node("U", NodeKind::Value, {});
  b.add_arc(d, u, ArcKind::Functional);
  PartialTable t(TableKind::Utility, {d}, {2});
  t.set(std::size_t{0}, 1.0);
  t.set(std::size_t{1}, 3.0);
  b.add_utility(u, std::move(t));
  auto r = b.build();
  CHECK(r.ok());
  CHECK(r.diagnostics.empty());
}

TEST_CASE("a label without its arc is rejected") {
  ModelBuilder b;
  auto x = b.add_node("X", NodeKind::Chance, {"x1", "x2"});
  auto z = b.add_node("Z", NodeKind::Chance, {"z1", "z2"},
                      Label::atom(x, 0));
  auto d = b.add_node("D", NodeKind::ActionDecision, {"a", "b"});
  auto u = b.add_node("U", NodeKind::Value, {});
  b.add_arc(x, d, ArcKind::Informational);
  b.add_arc(z, u, ArcKind::Functional);
  b.add_arc(d, u, ArcKind::Functional);
  PartialTable px(TableKind::Probability, {x}, {2});
  px.set(std::size_t{0}, 0.5);
  px.set(std::size_t{1}, 0.5);
  b.add_probability(x, std::move(px));
  PartialTable pz(TableKind::Probability, {z}, {2});
  pz.set(std::size_t{0}, 0.5);
  pz.set(std::size_t{1}, 0.5);
  b.add_probability(z, std::move(pz));
  PartialTable t(TableKind::Utility, {z, d}, {2, 2});
  for (std::size_t i = 0; i < 4; ++i) t.set(i, 1.0);
  b.add_utility(u, std::move(t));
  auto r = b.build();
  CHECK_FALSE(r.ok());
  bool found = false;
  for (const auto& d2 : r.diagnostics) {
    if (d2.code == Code::LabelWithoutArc) found = true;
  }
  CHECK(found);
}

TEST_CASE("probability domains exclude test-decision parents") {
  Model m = load_corpus("dating.aid");
  auto accept = *m.find("Accept?");
  auto dom = probability_domain(m, accept);
  std::vector<VariableIndex> expected{*m.find("Likes me?"), accept};
  std::sort(expected.begin(), expected.end());
  CHECK(dom == expected);  // Date? excluded as a test-decision parent

  // Parentless chance.
  auto liking = *m.find("Liking");
  CHECK(probability_domain(m, liking) == std::vector<VariableIndex>{liking});

  CHECK_THROWS_AS(probability_domain(m, *m.find("Date?")), Error);
}

TEST_CASE("probability domain keeps chance parents next to test parents") {
  ModelBuilder b;
  auto a = b.add_node("A", NodeKind::Chance, {"a1", "a2"});
  auto t = b.add_node("T", NodeKind::TestDecision, {"y", "n"});
  auto x = b.add_node("X", NodeKind::Chance, {"x1", "x2"});
  auto d = b.add_node("D", NodeKind::ActionDecision, {"d1", "d2"});
  auto u = b.add_node("U", NodeKind::Value, {});
  b.add_arc(a, x, ArcKind::Dependency);
  b.add_arc(t, x, ArcKind::Test);
  b.add_arc(x, d, ArcKind::Informational);
  b.add_arc(d, u, ArcKind::Functional);
  PartialTable pa(TableKind::Probability, {a}, {2});
  pa.set(std::size_t{0}, 0.5);
  pa.set(std::size_t{1}, 0.5);
  b.add_probability(a, std::move(pa));
  PartialTable px(TableKind::Probability, {a, x}, {2, 2});
  for (StateIndex i = 0; i < 2; ++i) {
    px.set({i, 0}, 0.3);
    px.set({i, 1}, 0.7);
  }
  b.add_probability(x, std::move(px));
  PartialTable ut(TableKind::Utility, {d}, {2});
  ut.set(std::size_t{0}, 1.0);
  ut.set(std::size_t{1}, 2.0);
  b.add_utility(u, std::move(ut));
  auto r = b.build();
  REQUIRE(r.ok());
  CHECK(probability_domain(*r.model, x) == std::vector<VariableIndex>{a, x});
}

TEST_CASE("validation diagnostics are deterministic") {
  auto text = read_corpus("invalid/barren.aid");
  auto r1 = parse(text);
  auto r2 = parse(text);
  REQUIRE(r1.diagnostics.size() == r2.diagnostics.size());
  for (std::size_t i = 0; i < r1.diagnostics.size(); ++i) {
    CHECK(r1.diagnostics[i].code == r2.diagnostics[i].code);
    CHECK(r1.diagnostics[i].message == r2.diagnostics[i].message);
  }
}

TEST_CASE("every defined conditional row of the corpus sums to one") {
  for (const char* name : {"dating.aid", "chain.aid", "partial_cpt.aid",
                           "label_free.aid"}) {
    Model m = load_corpus(name);
    for (const auto& [v, t] : m.probabilities()) {
      std::size_t pos =
          std::lower_bound(t.domain().begin(), t.domain().end(), v) -
          t.domain().begin();
      std::uint32_t card = t.cardinalities()[pos];
      for (std::size_t flat = 0; flat < t.size(); ++flat) {
        auto config = t.config_of(flat);
        if (config[pos] != 0) continue;
        double total = 0.0;
        bool any = false;
        for (StateIndex s = 0; s < card; ++s) {
          config[pos] = s;
          if (auto c = t.cell(config)) {
            total += *c;
            any = true;
          }
        }
        if (any) CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}
