#include "aid/structure.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace aid {

namespace {

constexpr std::size_t kSemanticBound = 8;

bool in_ibar(const Arc& arc) {
  // Ī removes test arcs and the informational family.
  return arc.kind == ArcKind::Dependency || arc.kind == ArcKind::Functional;
}

std::function<std::size_t(VariableIndex)> state_counter(const Model& m) {
  return [&m](VariableIndex v) { return m.state_count(v); };
}

}  // namespace

bool label_semantically_false(const Model& m, const Label& l) {
  auto c = l.semantic_constant(state_counter(m), kSemanticBound);
  return c.has_value() && !*c;
}

bool label_resolved(const Model& m, const Label& l) {
  return l.semantic_constant(state_counter(m), kSemanticBound).has_value();
}

std::set<VariableIndex> dep(const Model& m, VariableIndex x) {
  if (x >= m.node_count()) {
    throw Error(Code::UnknownNode, "dep: unknown node index");
  }
  std::set<VariableIndex> out;
  std::vector<char> seen(m.node_count(), 0);
  std::vector<VariableIndex> stack{x};
  seen[x] = 1;
  while (!stack.empty()) {
    VariableIndex u = stack.back();
    stack.pop_back();
    for (const auto& arc : m.arcs()) {
      if (arc.dst != u || !in_ibar(arc)) continue;
      if (!m.present(arc.src) || seen[arc.src]) continue;
      seen[arc.src] = 1;
      out.insert(arc.src);
      stack.push_back(arc.src);
    }
  }
  return out;
}

Label effective_label(const Model& m, VariableIndex x) {
  Label result = m.node(x).label;
  if (m.is_decision(x)) return result;  // decisions inherit from the empty set
  for (VariableIndex y : dep(m, x)) {
    result = Label::conjunction(result, m.node(y).label);
  }
  return result;
}

std::vector<VariableIndex> split_variables(const Model& m) {
  std::set<VariableIndex> out;
  for (VariableIndex v = 0; v < m.node_count(); ++v) {
    if (!m.present(v)) continue;
    for (VariableIndex d : m.node(v).label.domain()) out.insert(d);
  }
  for (const auto& arc : m.arcs()) {
    for (VariableIndex d : arc.label.domain()) out.insert(d);
  }
  return {out.begin(), out.end()};
}

std::vector<VariableIndex> extended_split_variables(const Model& m) {
  auto out = split_variables(m);
  std::set<VariableIndex> set(out.begin(), out.end());
  for (const auto& arc : m.arcs()) {
    if (arc.kind == ArcKind::Restriction && m.present(arc.src) &&
        m.present(arc.dst)) {
      set.insert(arc.src);
    }
  }
  return {set.begin(), set.end()};
}

std::optional<VariableIndex> initial_split_variable(const Model& m) {
  auto splits = split_variables(m);
  if (splits.empty()) return std::nullopt;
  PartialOrder order = induce_order(m);
  for (VariableIndex s : splits) {
    bool dominates = true;
    for (VariableIndex y : splits) {
      if (y != s && !order.precedes(s, y)) dominates = false;
    }
    if (dominates) return s;
  }
  throw Error(Code::NoUniqueInitialSplit,
              "no unique initial split variable among " +
                  std::to_string(splits.size()) + " split variables");
}

std::optional<NextStep> next_split(const Model& m) {
  auto extended = extended_split_variables(m);
  if (extended.empty()) return std::nullopt;
  auto splits = split_variables(m);
  std::set<VariableIndex> label_split(splits.begin(), splits.end());
  PartialOrder order = induce_order(m);

  auto minimal_restrictive = [&](const std::function<bool(VariableIndex)>&
                                     admit) -> std::optional<VariableIndex> {
    for (VariableIndex v : extended) {
      if (label_split.count(v) || !admit(v)) continue;
      bool minimal = true;
      for (VariableIndex u : extended) {
        if (u != v && admit(u) && !label_split.count(u) &&
            order.precedes(u, v)) {
          minimal = false;
        }
      }
      if (minimal) return v;
    }
    return std::nullopt;
  };

  auto initial = initial_split_variable(m);  // may throw
  if (initial) {
    // A restrictive variable strictly before the initial split variable is
    // instantiated first; one merely incomparable to it waits, since the
    // split's outcome may remove it.
    auto r = minimal_restrictive(
        [&](VariableIndex v) { return order.precedes(v, *initial); });
    if (r) return NextStep{*r, true};
    return NextStep{*initial, false};
  }
  auto r = minimal_restrictive([](VariableIndex) { return true; });
  if (r) return NextStep{*r, true};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reduction machinery

namespace {

struct Reduction {
  Model model;
  std::vector<VariableIndex> missing_nodes;
  std::vector<Arc> missing_arcs;
};

bool node_unresolved(const Model& m, VariableIndex x) {
  if (!label_resolved(m, m.node(x).label)) return true;
  if (m.is_decision(x)) return false;
  for (VariableIndex y : dep(m, x)) {
    if (!label_resolved(m, m.node(y).label)) return true;
  }
  return false;
}

}  // namespace

namespace {

Reduction apply_reduction(const Model& m, VariableIndex v, StateIndex s,
                          bool restrictive) {
  Reduction r{reduce_unchecked(m, v, s, restrictive), {}, {}};
  for (VariableIndex x = 0; x < m.node_count(); ++x) {
    if (x != v && m.present(x) && !r.model.present(x)) {
      r.missing_nodes.push_back(x);
    }
  }
  for (const auto& arc : m.arcs()) {
    if (arc.src == v || arc.dst == v) continue;
    bool survived = false;
    for (const auto& kept : r.model.arcs()) {
      if (kept.src == arc.src && kept.dst == arc.dst &&
          kept.kind == arc.kind) {
        survived = true;
        break;
      }
    }
    if (!survived) r.missing_arcs.push_back(arc);
  }
  return r;
}

}  // namespace

Model reduce_unchecked(const Model& m, VariableIndex v, StateIndex s,
                       bool restrictive) {
  Model out = m;
  Assignment a;
  a.set(v, s);

  // Free-set lower bound for the freshly reduced model: variables succeeding
  // the instantiated variable in the pre-reduction order. Boundness is
  // cumulative along the path — a variable bound at an ancestor stays bound
  // even if a later reduction loses the arcs that anchored its position.
  {
    PartialOrder pre = induce_order(m);
    out.free_floor_.assign(m.node_count(), 0);
    for (VariableIndex x = 0; x < m.node_count(); ++x) {
      if (m.present(x) && x != v && m.in_free_floor(x) &&
          pre.precedes(v, x)) {
        out.free_floor_[x] = 1;
      }
    }
  }

  out.provenance_.push_back(SplitStep{v, s, restrictive});
  out.present_[v] = 0;
  out.probabilities_.erase(v);
  out.utilities_.erase(v);

  // Substitute the assignment into every remaining label.
  for (auto& node : out.nodes_) node.label = node.label.restricted(a);
  for (auto& arc : out.arcs_) arc.label = arc.label.restricted(a);

  // Slice tables and restrictive functions mentioning v.
  for (auto& [owner, table] : out.probabilities_) {
    if (table.mentions(v)) table = instantiate(table, a);
  }
  for (auto& [owner, table] : out.utilities_) {
    if (table.mentions(v)) table = instantiate(table, a);
  }
  {
    std::vector<RestrictiveFunction> kept;
    for (auto rf : out.restrictives_) {
      if (!out.present_[rf.decision]) continue;
      auto pos = std::find(rf.domain.begin(), rf.domain.end(), v);
      if (pos != rf.domain.end()) {
        std::size_t k = pos - rf.domain.begin();
        // Slice the option rows at v = s.
        std::vector<std::vector<char>> sliced;
        std::vector<StateIndex> config(rf.domain.size(), 0);
        for (std::size_t row = 0; row < rf.options.size(); ++row) {
          if (config[k] == s) sliced.push_back(rf.options[row]);
          for (std::size_t i = config.size(); i-- > 0;) {
            if (++config[i] < rf.cardinalities[i]) break;
            config[i] = 0;
          }
        }
        rf.domain.erase(rf.domain.begin() + k);
        rf.cardinalities.erase(rf.cardinalities.begin() + k);
        rf.options = std::move(sliced);
      }
      if (rf.domain.empty()) {
        // Fold the constant mask into the decision's state set.
        auto& states = out.current_states_[rf.decision];
        std::vector<StateIndex> masked;
        for (StateIndex st : states) {
          if (rf.options[0][st]) masked.push_back(st);
        }
        if (!masked.empty()) states = std::move(masked);
        continue;  // consumed
      }
      kept.push_back(std::move(rf));
    }
    out.restrictives_ = std::move(kept);
  }

  // Drop arcs touching the instantiated variable.
  out.arcs_.erase(std::remove_if(out.arcs_.begin(), out.arcs_.end(),
                                 [&](const Arc& arc) {
                                   return arc.src == v || arc.dst == v;
                                 }),
                  out.arcs_.end());

  // Iterated missing-element removal.
  for (;;) {
    std::vector<char> to_remove(out.node_count(), 0);
    std::vector<std::size_t> missing_arcs;
    bool any = false;

    PartialOrder order = induce_order(out);
    auto splits = split_variables(out);

    for (VariableIndex x = 0; x < out.node_count(); ++x) {
      if (!out.present_[x]) continue;
      const Label& own = out.nodes_[x].label;
      // A node whose own label is constant false is missing.
      if (label_semantically_false(out, own)) {
        to_remove[x] = 1;
        any = true;
        continue;
      }
      // So is one that precedes all remaining split variables while its
      // label is still unresolved: nothing observed by its time can ever
      // satisfy it.
      if (!out.is_value(x) && node_unresolved(out, x)) {
        bool precedes_all = !splits.empty();
        for (VariableIndex sp : splits) {
          if (sp == x || !order.precedes(x, sp)) {
            precedes_all = false;
            break;
          }
        }
        if (precedes_all) {
          to_remove[x] = 1;
          any = true;
        }
      }
    }

    // Everything downstream of a missing node in the stripped graph
    // inherits the removal.
    if (any) {
      bool grown = true;
      while (grown) {
        grown = false;
        for (const auto& arc : out.arcs_) {
          if (!in_ibar(arc)) continue;
          if (to_remove[arc.src] && out.present_[arc.dst] &&
              !to_remove[arc.dst]) {
            to_remove[arc.dst] = 1;
            grown = true;
          }
        }
      }
    }

    for (std::size_t i = 0; i < out.arcs_.size(); ++i) {
      const Arc& arc = out.arcs_[i];
      if (label_semantically_false(out, arc.label)) {
        missing_arcs.push_back(i);
        continue;
      }
      // Arc variant of the unresolved rule: the destination decision
      // precedes every remaining split variable while the arc label is
      // still unresolved.
      if (!label_resolved(out, arc.label) && out.is_decision(arc.dst)) {
        bool precedes_all = !splits.empty();
        for (VariableIndex sp : splits) {
          if (sp == arc.dst || !order.precedes(arc.dst, sp)) {
            precedes_all = false;
            break;
          }
        }
        if (precedes_all) missing_arcs.push_back(i);
      }
    }

    if (!any && missing_arcs.empty()) break;

    for (auto it = missing_arcs.rbegin(); it != missing_arcs.rend(); ++it) {
      out.arcs_.erase(out.arcs_.begin() + *it);
    }
    for (VariableIndex x = 0; x < out.node_count(); ++x) {
      if (!to_remove[x]) continue;
      out.present_[x] = 0;
      out.probabilities_.erase(x);
      out.utilities_.erase(x);
      // A removed variable can never be observed: its atoms are false.
      for (auto& node : out.nodes_) {
        node.label = node.label.with_variable_constant(x, false);
      }
      for (auto& arc : out.arcs_) {
        arc.label = arc.label.with_variable_constant(x, false);
      }
      out.arcs_.erase(std::remove_if(out.arcs_.begin(), out.arcs_.end(),
                                     [&](const Arc& arc) {
                                       return arc.src == x || arc.dst == x;
                                     }),
                      out.arcs_.end());
      out.restrictives_.erase(
          std::remove_if(out.restrictives_.begin(), out.restrictives_.end(),
                         [&](const RestrictiveFunction& rf) {
                           if (rf.decision == x) return true;
                           return std::find(rf.domain.begin(), rf.domain.end(),
                                            x) != rf.domain.end();
                         }),
          out.restrictives_.end());
    }
  }
  return out;
}

namespace {

void check_applicable(const Model& m, VariableIndex v, StateIndex s,
                      bool& restrictive) {
  auto next = next_split(m);
  if (!next || next->var != v) {
    std::string name = v < m.node_count() ? m.node(v).name : "?";
    throw Error(Code::NotInitialSplit,
                name + " is not the applicable split variable here");
  }
  restrictive = next->restrictive;
  const auto& states = m.current_states(v);
  if (std::find(states.begin(), states.end(), s) == states.end()) {
    throw Error(Code::ImpossibleState,
                "state was removed by an earlier update of " +
                    m.node(v).name);
  }
}

}  // namespace

MissingSet missing_elements(const Model& m, VariableIndex s_var,
                            StateIndex s) {
  auto initial = initial_split_variable(m);
  if (!initial || *initial != s_var) {
    throw Error(Code::NotInitialSplit,
                "missing() requires the initial split variable");
  }
  Reduction r = apply_reduction(m, s_var, s, false);
  return MissingSet{std::move(r.missing_nodes), std::move(r.missing_arcs)};
}

Model reduce(const Model& m, VariableIndex v, StateIndex s) {
  bool restrictive = false;
  check_applicable(m, v, s, restrictive);
  return reduce_unchecked(m, v, s, restrictive);
}

// ---------------------------------------------------------------------------
// Split-configuration enumeration

namespace {

std::unique_ptr<SplitTreeNode> enumerate_node(Model model,
                                              std::vector<SplitStep> prefix) {
  auto node = std::make_unique<SplitTreeNode>();
  node->prefix = prefix;
  std::optional<NextStep> next;
  try {
    next = next_split(model);
  } catch (const Error& e) {
    if (e.code() != Code::NoUniqueInitialSplit) throw;
    std::ostringstream msg;
    msg << e.what() << " after configuration (";
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (i) msg << ", ";
      msg << model.node(prefix[i].var).name << "="
          << model.node(prefix[i].var).states[prefix[i].state];
    }
    msg << ")";
    throw Error(Code::NoUniqueInitialSplit, msg.str());
  }
  node->split = next;
  if (!next) {
    node->exhaustive = true;
    node->model = std::move(model);
    return node;
  }
  for (StateIndex s : model.current_states(next->var)) {
    Model child = reduce_unchecked(model, next->var, s, next->restrictive);
    auto child_prefix = prefix;
    child_prefix.push_back(SplitStep{next->var, s, next->restrictive});
    node->children.emplace_back(
        s, enumerate_node(std::move(child), std::move(child_prefix)));
  }
  node->model = std::move(model);
  return node;
}

}  // namespace

std::unique_ptr<SplitTreeNode> enumerate_split_configurations(const Model& m) {
  return enumerate_node(m, {});
}

// ---------------------------------------------------------------------------
// Contexts and free variables

bool Context::operator==(const Context& o) const {
  if (decision != o.decision) return false;
  if (split_part.size() != o.split_part.size()) return false;
  for (std::size_t i = 0; i < split_part.size(); ++i) {
    if (split_part[i].var != o.split_part[i].var ||
        split_part[i].state != o.split_part[i].state) {
      return false;
    }
  }
  return restrictive_part.entries() == o.restrictive_part.entries();
}

std::vector<VariableIndex> free_variables(const Model& m) {
  PartialOrder order = induce_order(m);
  auto extended = extended_split_variables(m);
  std::vector<VariableIndex> out;
  for (VariableIndex x = 0; x < m.node_count(); ++x) {
    if (!m.present(x) || m.is_value(x)) continue;
    if (!m.in_free_floor(x)) continue;
    bool ok = true;
    for (VariableIndex sp : extended) {
      if (sp == x || !order.precedes(x, sp)) {
        ok = false;
        break;
      }
    }
    if (extended.empty()) ok = true;
    if (ok) out.push_back(x);
  }
  return out;
}

namespace {

std::vector<VariableIndex> restrictors_of(const Model& m, VariableIndex d) {
  std::set<VariableIndex> out;
  for (const auto& arc : m.arcs()) {
    if (arc.kind == ArcKind::Restriction && arc.dst == d) out.insert(arc.src);
  }
  return {out.begin(), out.end()};
}

Context context_of_path(const Model& original, VariableIndex d,
                        const std::vector<SplitStep>& prefix) {
  Context ctx;
  ctx.decision = d;
  auto restrictors = restrictors_of(original, d);
  for (const auto& step : prefix) {
    if (!step.restrictive) {
      ctx.split_part.push_back(step);
    } else if (std::binary_search(restrictors.begin(), restrictors.end(),
                                  step.var)) {
      ctx.restrictive_part.set(step.var, step.state);
    }
  }
  return ctx;
}

// Decisions eliminated at a given decomposition node: the node's own split
// when it is a decision, plus the free decisions.
std::vector<VariableIndex> decisions_eliminated_here(const SplitTreeNode& n) {
  std::vector<VariableIndex> out;
  if (n.split && n.model.is_decision(n.split->var)) out.push_back(n.split->var);
  for (VariableIndex v : free_variables(n.model)) {
    if (n.model.is_decision(v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void collect_contexts(const Model& original, const SplitTreeNode& n,
                      VariableIndex d, std::vector<Context>& out) {
  for (VariableIndex v : decisions_eliminated_here(n)) {
    if (v == d) {
      Context ctx = context_of_path(original, d, n.prefix);
      if (std::find(out.begin(), out.end(), ctx) == out.end()) {
        out.push_back(ctx);
      }
    }
  }
  for (const auto& [s, child] : n.children) {
    (void)s;
    collect_contexts(original, *child, d, out);
  }
}

}  // namespace

std::vector<Context> contexts(const Model& m, VariableIndex d) {
  if (d >= m.node_count() || !m.is_decision(d)) {
    throw Error(Code::NotADecision, "contexts() requires a decision variable");
  }
  auto tree = enumerate_split_configurations(m);
  std::vector<Context> out;
  collect_contexts(m, *tree, d, out);
  return out;
}

// ---------------------------------------------------------------------------
// Cycle validation and well-definedness

namespace {

std::optional<std::vector<VariableIndex>> find_cycle(const Model& m) {
  const auto n = m.node_count();
  std::vector<std::vector<VariableIndex>> succ(n);
  for (const auto& arc : m.arcs()) succ[arc.src].push_back(arc.dst);
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
  std::vector<VariableIndex> stack;
  std::optional<std::vector<VariableIndex>> cycle;

  std::function<bool(VariableIndex)> dfs = [&](VariableIndex u) -> bool {
    state[u] = 1;
    stack.push_back(u);
    for (VariableIndex w : succ[u]) {
      if (!m.present(w)) continue;
      if (state[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle = std::vector<VariableIndex>(it, stack.end());
        return true;
      }
      if (state[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    state[u] = 2;
    return false;
  };
  for (VariableIndex v = 0; v < n; ++v) {
    if (m.present(v) && state[v] == 0 && dfs(v)) return cycle;
  }
  return std::nullopt;
}

std::string prefix_name(const Model& original, const std::vector<SplitStep>& p) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out << ", ";
    out << original.node(p[i].var).name << "="
        << original.node(p[i].var).states[p[i].state];
  }
  out << ")";
  return out.str();
}

void check_leaves(const Model& original, const SplitTreeNode& n,
                  std::vector<Diagnostic>& diags) {
  if (!n.split) {
    if (auto cycle = find_cycle(n.model)) {
      std::ostringstream msg;
      msg << "cycle survives the exhaustive configuration "
          << prefix_name(original, n.prefix) << ":";
      for (VariableIndex v : *cycle) msg << " " << n.model.node(v).name;
      diags.push_back(Diagnostic{Code::UnbrokenCycle, Severity::Error, "",
                                 msg.str()});
    }
    for (VariableIndex v = 0; v < n.model.node_count(); ++v) {
      if (!n.model.present(v)) continue;
      if (!label_resolved(n.model, n.model.node(v).label)) {
        diags.push_back(Diagnostic{
            Code::UnresolvedLeaf, Severity::Error, n.model.node(v).name,
            "label still unresolved under the exhaustive configuration " +
                prefix_name(original, n.prefix)});
      }
    }
    return;
  }
  for (const auto& [s, child] : n.children) {
    (void)s;
    check_leaves(original, *child, diags);
  }
}

}  // namespace

std::vector<Diagnostic> validate_cycles(const Model& m) {
  std::vector<Diagnostic> diags;
  auto tree = enumerate_split_configurations(m);
  check_leaves(m, *tree, diags);
  return diags;
}

namespace {

void check_well_defined(const Model& original, const SplitTreeNode& n,
                        WellDefinedness& result) {
  // Restrictive clash: two restrictive functions for one decision whose
  // domains are both fully present.
  for (VariableIndex d = 0; d < n.model.node_count(); ++d) {
    if (!n.model.present(d) || !n.model.is_decision(d)) continue;
    int active = 0;
    for (const auto& rf : n.model.restrictives()) {
      if (rf.decision != d) continue;
      bool domain_present = true;
      for (VariableIndex v : rf.domain) {
        if (!n.model.present(v)) domain_present = false;
      }
      if (domain_present) ++active;
    }
    if (active > 1) {
      result.verdict = WellDefinedness::Verdict::IllDefinedRestrictives;
      result.detail = "decision " + original.node(d).name +
                      " has several applicable restrictive functions under " +
                      prefix_name(original, n.prefix);
      return;
    }
  }
  // Conservative significance check: free chance variables must be
  // comparable to free decision variables.
  auto free = free_variables(n.model);
  PartialOrder order = induce_order(n.model);
  for (VariableIndex a : free) {
    if (!n.model.is_chance(a)) continue;
    for (VariableIndex d : free) {
      if (!n.model.is_decision(d)) continue;
      if (order.incomparable(a, d)) {
        auto pair = std::make_pair(a, d);
        if (std::find(result.witnesses.begin(), result.witnesses.end(),
                      pair) == result.witnesses.end()) {
          result.witnesses.push_back(pair);
        }
      }
    }
  }
  for (const auto& [s, child] : n.children) {
    (void)s;
    check_well_defined(original, *child, result);
    if (result.verdict == WellDefinedness::Verdict::IllDefinedRestrictives) {
      return;
    }
  }
}

}  // namespace

WellDefinedness well_definedness(const Model& m) {
  WellDefinedness result;
  auto tree = enumerate_split_configurations(m);
  check_well_defined(m, *tree, result);
  if (result.verdict != WellDefinedness::Verdict::IllDefinedRestrictives &&
      !result.witnesses.empty()) {
    result.verdict = WellDefinedness::Verdict::PossiblyIllDefined;
  }
  return result;
}

}  // namespace aid
