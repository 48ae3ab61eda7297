#include "aid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "aid/pool.hpp"

namespace aid {

namespace {

using detail::PoolEntry;
using detail::chance_mass;
using detail::initial_pool;
using detail::legal_mask;
using detail::transform_pool;

// Minimal present chance/decision variables of the induced order.
std::vector<VariableIndex> minimal_candidates(const Model& m,
                                              const PartialOrder& order) {
  std::vector<VariableIndex> out;
  for (VariableIndex v = 0; v < m.node_count(); ++v) {
    if (!m.present(v) || m.is_value(v)) continue;
    bool minimal = true;
    for (VariableIndex u = 0; u < m.node_count(); ++u) {
      if (u == v || !m.present(u) || m.is_value(u)) continue;
      if (order.precedes(u, v)) minimal = false;
    }
    if (minimal) out.push_back(v);
  }
  return out;
}

bool is_restrictive_var(const Model& m, VariableIndex v) {
  for (const auto& arc : m.arcs()) {
    if (arc.kind == ArcKind::Restriction && arc.src == v &&
        m.present(arc.dst)) {
      return true;
    }
  }
  return false;
}

struct Unfolder {
  const UnfoldOptions& options;
  std::size_t nodes_made = 0;

  std::unique_ptr<TreeNode> build(const Model& m, std::vector<PoolEntry> pool,
                                  Assignment path,
                                  std::vector<SplitStep> prefix,
                                  double path_prob, bool reachable) {
    if (++nodes_made > options.node_budget) {
      throw Error(Code::TreeBudgetExceeded,
                  "decision tree exceeds the node budget of " +
                      std::to_string(options.node_budget));
    }
    auto node = std::make_unique<TreeNode>();
    node->path = path;
    node->prefix = prefix;
    node->path_prob = path_prob;
    node->reachable = reachable;

    PartialOrder order = induce_order(m);
    auto candidates = minimal_candidates(m, order);
    if (candidates.empty()) {
      // Terminal: sum the present utility tables, all sliced to scalars.
      node->kind = TreeNode::Kind::Terminal;
      double total = 0.0;
      for (const auto& e : pool) {
        if (e.table.kind() != TableKind::Utility) continue;
        if (!e.table.is_scalar()) {
          throw Error(Code::UnknownReference,
                      "utility still mentions an uninstantiated variable at "
                      "a terminal");
        }
        if (auto c = e.table.cell(std::size_t{0})) total += *c;
      }
      node->utility = total;
      node->value = total;
      return node;
    }

    // A unique split variable must come first; two incomparable label-split
    // candidates violate the standing restriction, and a restrictive
    // variable incomparable to the initial split waits for it.
    auto splits = split_variables(m);
    std::optional<VariableIndex> split_candidate;
    {
      std::set<VariableIndex> split_set(splits.begin(), splits.end());
      for (VariableIndex v : candidates) {
        if (!split_set.count(v)) continue;
        if (split_candidate) {
          throw Error(Code::NoUniqueInitialSplit,
                      "no unique initial split variable while unfolding");
        }
        split_candidate = v;
      }
    }
    VariableIndex v;
    if (split_candidate) {
      v = *split_candidate;
    } else {
      v = options.pick ? options.pick(m, candidates) : candidates.front();
    }
    bool restrictive_tag =
        !std::binary_search(splits.begin(), splits.end(), v) &&
        is_restrictive_var(m, v);

    node->var = v;
    node->kind = m.is_chance(v) ? TreeNode::Kind::Chance
                                : TreeNode::Kind::Decision;

    bool tag_step =
        std::binary_search(splits.begin(), splits.end(), v) || restrictive_tag;

    std::vector<std::pair<StateIndex, std::optional<double>>> branch_mass;
    double mass_total = 0.0;
    std::vector<Model> child_models;
    std::vector<std::vector<PoolEntry>> child_pools;
    std::vector<StateIndex> branch_states;

    for (StateIndex s : m.current_states(v)) {
      Model child = reduce_unchecked(m, v, s, restrictive_tag);
      auto child_pool = transform_pool(pool, child, v, s);
      std::optional<double> mass;
      if (m.is_chance(v)) {
        mass = chance_mass(child, child_pool);
        if (mass) mass_total += *mass;
      }
      branch_mass.emplace_back(s, mass);
      child_models.push_back(std::move(child));
      child_pools.push_back(std::move(child_pool));
      branch_states.push_back(s);
    }

    for (std::size_t i = 0; i < branch_states.size(); ++i) {
      StateIndex s = branch_states[i];
      double prob = 0.0;
      bool child_reachable = reachable;
      if (m.is_chance(v)) {
        const auto& mass = branch_mass[i].second;
        if (!mass.has_value()) continue;  // impossible (⊥) branch: absent
        if (mass_total > 0.0) {
          prob = *mass / mass_total;
        } else {
          // Zero-probability context: keep the subtree, spread uniformly.
          prob = 1.0 / static_cast<double>(branch_states.size());
          child_reachable = false;
        }
        if (prob <= 0.0) child_reachable = false;
      }
      Assignment child_path = path;
      child_path.set(v, s);
      auto child_prefix = prefix;
      if (tag_step) child_prefix.push_back(SplitStep{v, s, restrictive_tag});
      TreeNode::Branch branch;
      branch.state = s;
      branch.prob = prob;
      branch.legal = true;
      branch.child = build(
          child_models[i], std::move(child_pools[i]), std::move(child_path),
          std::move(child_prefix), path_prob * (m.is_chance(v) ? prob : 1.0),
          child_reachable);
      node->branches.push_back(std::move(branch));
    }
    return node;
  }
};

}  // namespace

std::unique_ptr<TreeNode> unfold(const Model& m, const UnfoldOptions& options) {
  Unfolder unfolder{options};
  return unfolder.build(m, initial_pool(m), Assignment{}, {}, 1.0, true);
}

double rollback(TreeNode& t) {
  switch (t.kind) {
    case TreeNode::Kind::Terminal:
      t.value = t.utility;
      return t.value;
    case TreeNode::Kind::Chance: {
      double total = 0.0;
      for (auto& b : t.branches) total += b.prob * rollback(*b.child);
      t.value = total;
      return total;
    }
    case TreeNode::Kind::Decision: {
      t.option_value.clear();
      double best = 0.0;
      StateIndex best_state = kNoState;
      for (auto& b : t.branches) {
        double v = rollback(*b.child);
        t.option_value.push_back(v);
        if (!b.legal) continue;
        if (best_state == kNoState || v > best) {
          best = v;
          best_state = b.state;
        }
      }
      t.chosen = best_state;
      t.value = best_state == kNoState ? 0.0 : best;
      return t.value;
    }
  }
  return 0.0;
}

std::size_t scenario_count(const TreeNode& t) {
  if (t.branches.empty()) return 1;
  std::size_t total = 0;
  for (const auto& b : t.branches) total += scenario_count(*b.child);
  return total;
}

void visit_decisions(const TreeNode& t,
                     const std::function<void(const TreeNode&)>& f) {
  if (t.kind == TreeNode::Kind::Decision) f(t);
  for (const auto& b : t.branches) visit_decisions(*b.child, f);
}

Model randomize_realization(const Model& m, Rng& rng) {
  ModelBuilder builder;
  for (VariableIndex v = 0; v < m.node_count(); ++v) {
    const Node& n = m.node(v);
    builder.add_node(n.name, n.kind, n.states, n.label);
  }
  for (const auto& arc : m.arcs()) {
    builder.add_arc(arc.src, arc.dst, arc.kind, arc.label);
  }
  for (const auto& rf : m.restrictives()) builder.add_restrictive(rf);

  for (const auto& [v, old] : m.probabilities()) {
    PartialTable t(TableKind::Probability, old.domain(), old.cardinalities());
    // Dirichlet row per configuration of the conditioning set.
    std::size_t pos = std::lower_bound(old.domain().begin(),
                                       old.domain().end(), v) -
                      old.domain().begin();
    std::uint32_t card = old.cardinalities()[pos];
    std::size_t rows = t.size() / card;
    std::vector<std::vector<StateIndex>> row_configs;
    row_configs.reserve(rows);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      auto config = t.config_of(flat);
      if (config[pos] == 0) row_configs.push_back(config);
    }
    for (auto& config : row_configs) {
      auto row = rng.dirichlet_row(card);
      for (StateIndex s = 0; s < card; ++s) {
        config[pos] = s;
        t.set(config, row[s]);
      }
    }
    builder.add_probability(v, std::move(t));
  }
  for (const auto& [v, old] : m.utilities()) {
    PartialTable t(TableKind::Utility, old.domain(), old.cardinalities());
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      t.set(flat, rng.uniform(0.0, 10.0));
    }
    builder.add_utility(v, std::move(t));
  }
  auto built = builder.build();
  if (!built.ok()) {
    throw Error(Code::UnknownReference,
                "randomize_realization produced an invalid model");
  }
  return std::move(*built.model);
}

namespace {

// Decision records for one unfolding: observed history and the values each
// option achieved.
struct DecisionRecord {
  Assignment history;
  StateIndex chosen;
  double best;
  double runner_up;
  bool decisive;  // best beats every alternative by more than the tolerance
};

std::vector<DecisionRecord> decision_records(TreeNode& root,
                                             VariableIndex decision) {
  std::vector<DecisionRecord> out;
  visit_decisions(root, [&](const TreeNode& t) {
    if (t.var != decision) return;
    DecisionRecord r;
    r.history = t.path;
    r.chosen = t.chosen;
    r.best = t.value;
    r.runner_up = t.value;
    bool first_other = true;
    for (std::size_t i = 0; i < t.branches.size(); ++i) {
      if (!t.branches[i].legal || t.branches[i].state == t.chosen) continue;
      double v = t.option_value[i];
      if (first_other || v > r.runner_up) r.runner_up = v;
      first_other = false;
    }
    r.decisive = first_other || (r.best - r.runner_up) > 1e-9;
    out.push_back(std::move(r));
  });
  return out;
}

Assignment project(const Assignment& a, const Assignment& onto) {
  Assignment out;
  for (const auto& [v, s] : a.entries()) {
    if (onto.contains(v)) out.set(v, s);
  }
  return out;
}

bool same_entries(const Assignment& a, const Assignment& b) {
  return a.entries() == b.entries();
}

}  // namespace

ProbeResult significance_probe(const Model& m, VariableIndex decision,
                               VariableIndex chance, int trials,
                               std::uint64_t seed) {
  Rng rng(seed);
  UnfoldOptions before_opts;
  before_opts.pick = [&](const Model& model,
                         const std::vector<VariableIndex>& candidates) {
    // Keep `chance` as early and `decision` as late as possible so the two
    // meet adjacently.
    for (VariableIndex v : candidates) {
      if (v == chance) return v;
    }
    VariableIndex fallback = candidates.front();
    if (fallback == decision && candidates.size() > 1 &&
        model.present(chance)) {
      fallback = candidates[1];
    }
    return fallback;
  };
  UnfoldOptions after_opts;
  after_opts.pick = [&](const Model& model,
                        const std::vector<VariableIndex>& candidates) {
    for (VariableIndex v : candidates) {
      if (v == decision) return v;
    }
    VariableIndex fallback = candidates.front();
    if (fallback == chance && candidates.size() > 1 &&
        model.present(decision)) {
      fallback = candidates[1];
    }
    return fallback;
  };

  for (int trial = 0; trial < trials; ++trial) {
    Rng trial_rng = rng.split();
    Model realized = randomize_realization(m, trial_rng);

    auto tree_before = unfold(realized, before_opts);
    rollback(*tree_before);
    auto tree_after = unfold(realized, after_opts);
    rollback(*tree_after);

    auto before = decision_records(*tree_before, decision);
    auto after = decision_records(*tree_after, decision);

    // The strategy under "chance first" differs from any chance-free
    // strategy when it is non-constant over the chance variable.
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (std::size_t j = i + 1; j < before.size(); ++j) {
        if (!before[i].history.contains(chance) ||
            !before[j].history.contains(chance)) {
          continue;
        }
        Assignment hi = before[i].history;
        Assignment hj = before[j].history;
        // Same history apart from the chance variable?
        Assignment hi_rest, hj_rest;
        for (const auto& [v, s] : hi.entries()) {
          if (v != chance) hi_rest.set(v, s);
        }
        for (const auto& [v, s] : hj.entries()) {
          if (v != chance) hj_rest.set(v, s);
        }
        if (!same_entries(hi_rest, hj_rest)) continue;
        if (before[i].chosen != before[j].chosen && before[i].decisive &&
            before[j].decisive) {
          ProbeResult r;
          r.kind = ProbeResult::Kind::Significant;
          r.witness_trial = trial;
          r.detail = "optimal choice for " + m.node(decision).name +
                     " varies with " + m.node(chance).name +
                     " when it is observed first";
          return r;
        }
      }
    }
    // Constant over the chance variable: compare against the permuted order.
    for (const auto& rb : before) {
      for (const auto& ra : after) {
        Assignment common = project(rb.history, ra.history);
        if (!same_entries(common, ra.history)) continue;
        if (rb.chosen != ra.chosen && rb.decisive && ra.decisive) {
          ProbeResult r;
          r.kind = ProbeResult::Kind::Significant;
          r.witness_trial = trial;
          r.detail = "optimal choice for " + m.node(decision).name +
                     " changes when it is permuted with " +
                     m.node(chance).name;
          return r;
        }
      }
    }
  }
  return ProbeResult{};
}

}  // namespace aid
