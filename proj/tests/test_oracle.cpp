#include <doctest.h>

#include <cmath>

#include "aid/oracle.hpp"
#include "aid/solver.hpp"
#include "support/load.hpp"
#include "support/model_gen.hpp"

using namespace aid;
using aid::testing::load_corpus;

TEST_CASE("a lone decision unfolds into one node with two terminals") {
  Model m = load_corpus("minimal.aid");
  auto tree = unfold(m);
  CHECK(tree->kind == TreeNode::Kind::Decision);
  REQUIRE(tree->branches.size() == 2);
  CHECK(tree->branches[0].child->kind == TreeNode::Kind::Terminal);
  CHECK(rollback(*tree) == doctest::Approx(3.0));
  CHECK(scenario_count(*tree) == 2);
}

TEST_CASE("rollback arithmetic") {
  // terminal -> its utility; chance -> the weighted average; decision ->
  // the best legal branch.
  Model m = load_corpus("chain.aid");
  auto tree = unfold(m);
  CHECK(rollback(*tree) == doctest::Approx(2.0));

  // 0.9 * 10 beats a certain 8.
  ModelBuilder b;
  auto d = b.add_node("D", NodeKind::ActionDecision, {"gamble", "sure"});
  auto x = b.add_node("X", NodeKind::Chance, {"win", "lose"});
  auto u = b.add_node("U", NodeKind::Value, {});
  b.add_arc(d, x, ArcKind::Dependency);
  b.add_arc(d, u, ArcKind::Functional);
  b.add_arc(x, u, ArcKind::Functional);
  PartialTable px(TableKind::Probability, {d, x}, {2, 2});
  px.set({0, 0}, 0.9);
  px.set({0, 1}, 0.1);
  px.set({1, 0}, 0.0);
  px.set({1, 1}, 1.0);
  b.add_probability(x, std::move(px));
  PartialTable ut(TableKind::Utility, {d, x}, {2, 2});
  ut.set({0, 0}, 10.0);
  ut.set({0, 1}, 0.0);
  ut.set({1, 0}, 8.0);
  ut.set({1, 1}, 8.0);
  b.add_utility(u, std::move(ut));
  auto built = b.build();
  REQUIRE(built.ok());
  auto tree2 = unfold(*built.model);
  CHECK(rollback(*tree2) == doctest::Approx(9.0));
  CHECK(tree2->chosen == 0);  // the gamble
}

TEST_CASE("the dating tree prunes impossible scenarios") {
  Model m = load_corpus("dating.aid");
  auto tree = unfold(m);
  std::size_t cartesian = 1;
  for (VariableIndex v = 0; v < m.node_count(); ++v) {
    if (!m.is_value(v)) cartesian *= m.state_count(v);
  }
  CHECK(scenario_count(*tree) < cartesian);
}

TEST_CASE("branch probabilities of defined branches sum to one") {
  Model m = load_corpus("partial_cpt.aid");
  auto tree = unfold(m);
  std::function<void(const TreeNode&)> walk = [&](const TreeNode& t) {
    if (t.kind == TreeNode::Kind::Chance && t.reachable) {
      double total = 0.0;
      for (const auto& b : t.branches) total += b.prob;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (const auto& b : t.branches) walk(*b.child);
  };
  walk(*tree);
}

TEST_CASE("cycles reorder the tree branches") {
  Model m = load_corpus("fig5_cycle.aid");
  auto tree = unfold(m);
  REQUIRE(tree->kind == TreeNode::Kind::Chance);  // X first
  auto d1 = *m.find("D1");
  auto d2 = *m.find("D2");
  // X=x1 puts D2 first, X=x2 puts D1 first.
  CHECK(tree->branches[0].child->var == d2);
  CHECK(tree->branches[1].child->var == d1);
}

TEST_CASE("the node budget guards against explosion") {
  Model m = load_corpus("dating.aid");
  UnfoldOptions opts;
  opts.node_budget = 10;
  CHECK_THROWS_AS(unfold(m, opts), Error);
}

TEST_CASE("the unfolding mirrors exhaustive split enumeration counts") {
  // When every variable is a split point, the scenario count matches a
  // recursive walk over possible states of the reduced models; check the
  // tree against the solver on a couple of asymmetric fixtures.
  for (const char* name : {"fig7_conditioning.aid", "partial_cpt.aid",
                           "restrict_demo.aid"}) {
    Model m = load_corpus(name);
    auto tree = unfold(m);
    double oracle = rollback(*tree);
    CHECK(std::abs(oracle - solve(m).meu) < 1e-9);
  }
}

TEST_CASE("randomized realizations stay valid models") {
  Model m = load_corpus("dating.aid");
  Rng rng(7);
  Model r = randomize_realization(m, rng);
  // Fully defined rows summing to one.
  for (const auto& [v, t] : r.probabilities()) {
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.defined(i));
  }
  CHECK(r.node_count() == m.node_count());
  // Same structure, fresh numbers: reductions still behave.
  auto tree = unfold(r);
  rollback(*tree);
}

TEST_CASE("the significance probe finds the constructed witness") {
  Model sig = load_corpus("sig_pid.aid");
  auto a = *sig.find("A");
  auto d1 = *sig.find("D1");
  auto probe = significance_probe(sig, d1, a, 100, 20260810);
  CHECK(probe.kind == ProbeResult::Kind::Significant);
  CHECK(probe.witness_trial >= 0);

  // Identical seeds give identical probes.
  auto probe2 = significance_probe(sig, d1, a, 100, 20260810);
  CHECK(probe2.witness_trial == probe.witness_trial);
}

TEST_CASE("a d-separated chance variable yields no evidence") {
  Model dsep = load_corpus("dsep.aid");
  auto a = *dsep.find("A");
  auto d1 = *dsep.find("D1");
  auto probe = significance_probe(dsep, d1, a, 100, 20260810);
  CHECK(probe.kind == ProbeResult::Kind::NoEvidence);
}

TEST_CASE("well-defined subproblems leave the probe without witnesses") {
  Model dating = load_corpus("dating.aid");
  auto wd = well_definedness(dating);
  CHECK(wd.witnesses.empty());
}

TEST_CASE("oracle equivalence over a generated batch") {
  Rng rng(606);
  for (int i = 0; i < 40; ++i) {
    Rng mr = rng.split();
    Model m = testing::random_model(mr);
    auto tree = unfold(m);
    double oracle = rollback(*tree);
    CHECK(std::abs(oracle - solve(m).meu) < 1e-9);
  }
}

TEST_CASE("every label-pruned fixture beats its Cartesian bound") {
  for (const char* name :
       {"dating.aid", "fig7_conditioning.aid", "partial_cpt.aid"}) {
    Model m = load_corpus(name);
    auto tree = unfold(m);
    std::size_t cartesian = 1;
    for (VariableIndex v = 0; v < m.node_count(); ++v) {
      if (!m.is_value(v)) cartesian *= m.state_count(v);
    }
    CHECK(scenario_count(*tree) < cartesian);
  }
}
