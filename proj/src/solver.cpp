#include "aid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "aid/pool.hpp"

namespace aid {

std::size_t DecisionFunction::flat_index(
    const std::vector<StateIndex>& config) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    flat = flat * cardinalities[i] + config[i];
  }
  return flat;
}

const DecisionFunction* SolveResult::find(VariableIndex decision,
                                          const Context& context) const {
  for (const auto& df : strategy) {
    if (df.decision == decision && df.context == context) return &df;
  }
  return nullptr;
}

namespace {

constexpr double kBranchEqualTolerance = 1e-12;

using detail::PoolEntry;
using detail::chance_mass;
using detail::initial_pool;
using detail::legal_mask;
using detail::transform_pool;

// Single-variable elimination over a potential pool.
void eliminate_one(const Model& m, std::vector<PartialTable>& pool,
                   VariableIndex v, std::vector<ArgmaxTable>* argmaxes) {
  std::vector<PartialTable> probs, utils, rest;
  for (auto& t : pool) {
    if (!t.mentions(v)) {
      rest.push_back(std::move(t));
    } else if (t.kind() == TableKind::Probability) {
      probs.push_back(std::move(t));
    } else {
      utils.push_back(std::move(t));
    }
  }
  if (probs.empty() && utils.empty()) {
    if (!m.is_chance(v) && argmaxes) {
      // Vacuous decision: nothing depends on it, any legal option serves.
      auto mask = legal_mask(m, v);
      ArgmaxTable am;
      am.decision = v;
      StateIndex pick = kNoState;
      for (StateIndex s = 0; s < mask.size(); ++s) {
        if (mask[s]) {
          pick = s;
          break;
        }
      }
      am.choice.assign(1, pick);
      argmaxes->push_back(std::move(am));
    }
    pool = std::move(rest);
    return;  // vacuous elimination
  }
  std::optional<PartialTable> phi;
  for (auto& t : probs) phi = phi ? multiply(*phi, t) : std::move(t);
  std::optional<PartialTable> psi;
  for (auto& t : utils) psi = psi ? add(*psi, t) : std::move(t);

  // The probability product and the weighted utility marginalize
  // together; dividing the mass back out keeps utility entries conditional,
  // so that no probability factor is counted twice downstream.
  if (m.is_chance(v)) {
    std::optional<PartialTable> phi_out;
    if (phi) phi_out = sum_out(*phi, v);
    if (psi) {
      PartialTable weighted = phi ? multiply(*phi, *psi) : *psi;
      PartialTable summed = sum_out(weighted, v);
      rest.push_back(phi_out ? divide_mass(summed, *phi_out)
                             : std::move(summed));
    }
    if (phi_out) rest.push_back(std::move(*phi_out));
  } else {
    auto mask = legal_mask(m, v);
    std::optional<PartialTable> phi_out;
    if (phi) phi_out = max_out(*phi, v, mask).first;
    if (psi) {
      PartialTable weighted = phi ? multiply(*phi, *psi) : *psi;
      auto [table, am] = max_out(weighted, v, mask);
      rest.push_back(phi_out ? divide_mass(table, *phi_out)
                             : std::move(table));
      if (argmaxes) argmaxes->push_back(std::move(am));
    } else if (argmaxes) {
      // No utility mentions the decision: any legal option is optimal.
      ArgmaxTable am;
      am.decision = v;
      StateIndex pick = kNoState;
      for (StateIndex s = 0; s < mask.size(); ++s) {
        if (mask[s]) {
          pick = s;
          break;
        }
      }
      am.choice.assign(1, pick);
      argmaxes->push_back(std::move(am));
    }
    if (phi_out) rest.push_back(std::move(*phi_out));
  }
  pool = std::move(rest);
}

// Reverse linear extension of the induced order restricted to `vars`:
// temporally latest first, declaration-index tie-break.
std::vector<VariableIndex> reverse_admissible(const Model& m,
                                              std::vector<VariableIndex> vars,
                                              SolveOptions::TieBreak tie) {
  PartialOrder order = induce_order(m);
  std::vector<VariableIndex> out;
  std::vector<char> used(m.node_count(), 0);
  while (out.size() < vars.size()) {
    std::optional<VariableIndex> pick;
    for (VariableIndex v : vars) {
      if (used[v]) continue;
      bool maximal = true;
      for (VariableIndex w : vars) {
        if (w != v && !used[w] && order.precedes(v, w)) maximal = false;
      }
      if (!maximal) continue;
      if (!pick) {
        pick = v;
      } else if (tie == SolveOptions::TieBreak::LowIndexFirst ? v < *pick
                                                              : v > *pick) {
        pick = v;
      }
    }
    out.push_back(*pick);
    used[*pick] = 1;
  }
  return out;
}

struct StrategyKey {
  VariableIndex decision;
  std::string context;
  bool operator<(const StrategyKey& o) const {
    if (decision != o.decision) return decision < o.decision;
    return context < o.context;
  }
};

std::string context_key(const Context& ctx) {
  std::ostringstream out;
  for (const auto& step : ctx.split_part) {
    out << step.var << ":" << step.state << ";";
  }
  out << "|";
  for (const auto& [v, s] : ctx.restrictive_part.entries()) {
    out << v << ":" << s << ";";
  }
  return out.str();
}

class Evaluator {
 public:
  Evaluator(const Model& original, const SolveOptions& options)
      : original_(original), options_(options) {}

  std::vector<PartialTable> run(const Model& m, std::vector<PoolEntry> pool,
                                double path_prob,
                                std::unique_ptr<TraceNode>* trace_out);

  std::vector<std::string>& warnings() { return warnings_; }
  std::vector<DecisionFunction> strategies() &&;

 private:
  void record_strategy(const Model& m, const ArgmaxTable& am,
                       double path_prob);

  const Model& original_;
  const SolveOptions& options_;
  std::vector<std::string> warnings_;
  std::map<StrategyKey, DecisionFunction> accumulator_;
};

std::vector<PartialTable> Evaluator::run(const Model& m,
                                         std::vector<PoolEntry> pool,
                                         double path_prob,
                                         std::unique_ptr<TraceNode>* trace_out) {
  std::unique_ptr<TraceNode> trace;
  if (options_.with_trace) {
    trace = std::make_unique<TraceNode>();
    trace->prefix = m.provenance();
  }

  auto next = next_split(m);
  std::vector<PartialTable> tables;

  if (!next) {
    for (auto& e : pool) tables.push_back(std::move(e.table));
  } else {
    if (trace) trace->split = next;
    VariableIndex split = next->var;

    struct BranchResult {
      StateIndex state;
      std::vector<PartialTable> residual;
    };
    std::vector<BranchResult> branches;
    std::vector<Model> child_models;
    std::vector<std::vector<PoolEntry>> child_pools;
    std::vector<double> masses;
    double mass_total = 0.0;
    for (StateIndex s : m.current_states(split)) {
      Model child = reduce_unchecked(m, split, s, next->restrictive);
      auto child_pool = transform_pool(pool, child, split, s);
      double mass = 0.0;
      if (m.is_chance(split)) {
        mass = chance_mass(child, child_pool).value_or(0.0);
        mass_total += mass;
      }
      branches.push_back({s, {}});
      child_models.push_back(std::move(child));
      child_pools.push_back(std::move(child_pool));
      masses.push_back(mass);
    }
    for (std::size_t b = 0; b < branches.size(); ++b) {
      double child_prob = path_prob;
      if (m.is_chance(split)) {
        child_prob *= mass_total > 0.0 ? masses[b] / mass_total : 0.0;
      }
      std::unique_ptr<TraceNode> child_trace;
      branches[b].residual =
          run(child_models[b], std::move(child_pools[b]), child_prob,
              trace ? &child_trace : nullptr);
      if (trace && child_trace) {
        trace->children.push_back(std::move(child_trace));
      }
    }

    // Absorption: utilities equal across every branch pass through once;
    // everything else is folded per branch and conditioned on the split
    // variable. Probability residuals carry the branch weights and are
    // always conditioned.
    std::vector<PartialTable> shared;
    std::vector<std::pair<StateIndex, PartialTable>> phi_branches;
    std::vector<std::pair<StateIndex, PartialTable>> psi_branches;
    bool any_psi = false;

    // Utilities present in all branches with equal cells are shared.
    std::vector<std::vector<PartialTable>> branch_utils(branches.size());
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (auto& t : branches[b].residual) {
        if (t.kind() == TableKind::Utility) {
          branch_utils[b].push_back(t);
        }
      }
    }
    std::vector<std::vector<char>> util_shared(branches.size());
    for (std::size_t b = 0; b < branches.size(); ++b) {
      util_shared[b].assign(branch_utils[b].size(), 0);
    }
    if (!branches.empty()) {
      for (std::size_t i = 0; i < branch_utils[0].size(); ++i) {
        std::vector<std::size_t> match(branches.size(),
                                       static_cast<std::size_t>(-1));
        match[0] = i;
        bool everywhere = true;
        for (std::size_t b = 1; b < branches.size() && everywhere; ++b) {
          everywhere = false;
          for (std::size_t j = 0; j < branch_utils[b].size(); ++j) {
            if (util_shared[b][j]) continue;
            if (approx_equal(branch_utils[0][i], branch_utils[b][j],
                             kBranchEqualTolerance)) {
              match[b] = j;
              everywhere = true;
              break;
            }
          }
        }
        if (everywhere) {
          for (std::size_t b = 0; b < branches.size(); ++b) {
            util_shared[b][match[b]] = 1;
          }
          shared.push_back(branch_utils[0][i]);
        }
      }
    }

    for (std::size_t b = 0; b < branches.size(); ++b) {
      std::optional<PartialTable> phi;
      std::optional<PartialTable> psi;
      std::size_t util_seen = 0;
      for (auto& t : branches[b].residual) {
        if (t.kind() == TableKind::Probability) {
          phi = phi ? multiply(*phi, t) : std::move(t);
        } else {
          if (!util_shared[b][util_seen++]) {
            psi = psi ? add(*psi, t) : std::move(t);
          }
        }
      }
      phi_branches.emplace_back(
          branches[b].state,
          phi ? std::move(*phi)
              : PartialTable::scalar(TableKind::Probability, 1.0));
      if (psi) {
        psi_branches.emplace_back(branches[b].state, std::move(*psi));
        any_psi = true;
      }
    }

    std::vector<PartialTable> merged = std::move(shared);
    {
      std::uint32_t card = static_cast<std::uint32_t>(m.state_count(split));
      merged.push_back(
          extend_with(TableKind::Probability, split, card, phi_branches));
      if (any_psi) {
        // Equal residuals across every branch need no conditioning on the
        // split variable.
        bool all_equal = psi_branches.size() == branches.size();
        for (std::size_t b = 1; all_equal && b < psi_branches.size(); ++b) {
          all_equal = approx_equal(psi_branches[0].second,
                                   psi_branches[b].second,
                                   kBranchEqualTolerance);
        }
        if (all_equal) {
          merged.push_back(psi_branches[0].second);
        } else {
          merged.push_back(
              extend_with(TableKind::Utility, split, card, psi_branches));
        }
      }
    }
    if (trace) trace->merged = merged;

    // Eliminate the split variable at its own merge point, then this
    // node's free variables.
    std::vector<ArgmaxTable> argmaxes;
    eliminate_one(m, merged, split, &argmaxes);
    for (auto& am : argmaxes) record_strategy(m, am, path_prob);
    tables = std::move(merged);
  }

  std::vector<VariableIndex> free = free_variables(m);
  // The split variable (when any) was handled above; free never contains it.
  auto order = reverse_admissible(m, free, options_.tie_break);
  for (VariableIndex v : order) {
    std::vector<ArgmaxTable> argmaxes;
    eliminate_one(m, tables, v, &argmaxes);
    for (auto& am : argmaxes) record_strategy(m, am, path_prob);
  }

  if (trace_out) *trace_out = std::move(trace);
  return tables;
}

void Evaluator::record_strategy(const Model& m, const ArgmaxTable& am,
                                double path_prob) {
  VariableIndex d = am.decision;

  // Context of this elimination point: split steps of the path plus the
  // restrictive steps restricting d.
  std::vector<VariableIndex> restrictors;
  for (const auto& arc : original_.arcs()) {
    if (arc.kind == ArcKind::Restriction && arc.dst == d) {
      restrictors.push_back(arc.src);
    }
  }
  std::sort(restrictors.begin(), restrictors.end());
  Context ctx;
  ctx.decision = d;
  std::vector<SplitStep> straddlers;
  PartialOrder original_order = induce_order(original_);
  for (const auto& step : m.provenance()) {
    if (!step.restrictive) {
      ctx.split_part.push_back(step);
    } else if (std::binary_search(restrictors.begin(), restrictors.end(),
                                  step.var)) {
      ctx.restrictive_part.set(step.var, step.state);
    } else if (original_order.precedes(step.var, d)) {
      straddlers.push_back(step);
    }
  }

  // δ domain: pred(d) in the context's reduced model. Instantiated
  // restrictive variables preceding d that do not restrict it keep their
  // dimension; the path's values select the slice being written. Variables
  // the argmax mentions beyond pred(d) come from tie-broken incomparable
  // pairs: they precede d under the admissible order that was chosen.
  PartialOrder order = induce_order(m);
  std::vector<VariableIndex> domain;
  for (VariableIndex x = 0; x < m.node_count(); ++x) {
    if (m.present(x) && !m.is_value(x) && order.precedes(x, d)) {
      domain.push_back(x);
    }
  }
  for (const auto& s : straddlers) domain.push_back(s.var);
  for (VariableIndex x : am.domain) domain.push_back(x);
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());

  StrategyKey key{d, context_key(ctx)};
  auto it = accumulator_.find(key);
  if (it == accumulator_.end()) {
    DecisionFunction df;
    df.decision = d;
    df.context = ctx;
    df.domain = domain;
    for (VariableIndex v : domain) {
      df.cardinalities.push_back(
          static_cast<std::uint32_t>(original_.state_count(v)));
    }
    std::size_t cells = 1;
    for (auto c : df.cardinalities) cells *= c;
    df.choice.assign(cells, kNoState);
    df.reachable = path_prob > 0.0;
    it = accumulator_.emplace(key, std::move(df)).first;
  } else if (path_prob > 0.0) {
    it->second.reachable = true;
  }
  DecisionFunction& df = it->second;
  if (df.domain != domain) {
    warnings_.push_back("inconsistent predecessor sets for " +
                        original_.node(d).name + " within one context");
    return;
  }

  // Fill: broadcast the argmax over domain variables it does not mention;
  // straddler dimensions only at the path's values.
  Assignment straddle;
  for (const auto& s : straddlers) straddle.set(s.var, s.state);
  std::vector<StateIndex> config(df.domain.size(), 0);
  for (;;) {
    bool matches = true;
    for (std::size_t i = 0; i < df.domain.size(); ++i) {
      if (auto s = straddle.get(df.domain[i])) {
        if (*s != config[i]) matches = false;
      }
    }
    if (matches) {
      std::vector<StateIndex> amconfig;
      for (std::size_t i = 0; i < am.domain.size(); ++i) {
        auto pos = std::lower_bound(df.domain.begin(), df.domain.end(),
                                    am.domain[i]) -
                   df.domain.begin();
        amconfig.push_back(config[pos]);
      }
      StateIndex pick = am.choice[am.flat_index(amconfig)];
      std::size_t flat = df.flat_index(config);
      if (df.choice[flat] != kNoState && df.choice[flat] != pick) {
        warnings_.push_back("conflicting prescriptions recorded for " +
                            original_.node(d).name);
      }
      df.choice[flat] = pick;
    }
    std::size_t i = config.size();
    for (; i-- > 0;) {
      if (++config[i] < df.cardinalities[i]) break;
      config[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
    if (config.empty()) break;
  }
}

std::vector<DecisionFunction> Evaluator::strategies() && {
  std::vector<DecisionFunction> out;
  for (auto& [key, df] : accumulator_) out.push_back(std::move(df));
  return out;
}

}  // namespace

SolveResult solve(const Model& m, const SolveOptions& options) {
  SolveResult result;

  auto wd = well_definedness(m);
  if (wd.verdict == WellDefinedness::Verdict::IllDefinedRestrictives) {
    throw Error(Code::IllDefined, wd.detail);
  }
  if (wd.verdict == WellDefinedness::Verdict::PossiblyIllDefined) {
    if (!options.force) {
      std::ostringstream msg;
      msg << "possibly ill-defined: incomparable free pairs";
      for (const auto& [a, d] : wd.witnesses) {
        msg << " (" << m.node(a).name << ", " << m.node(d).name << ")";
      }
      throw Error(Code::IllDefined, msg.str());
    }
    result.warnings.push_back(
        "solving a possibly ill-defined diagram; results depend on the "
        "elimination order");
  }

  Evaluator eval(m, options);
  std::unique_ptr<TraceNode> trace;
  auto residual = eval.run(m, initial_pool(m), 1.0,
                           options.with_trace ? &trace : nullptr);

  double phi = 1.0;
  double psi = 0.0;
  bool any_psi = false;
  for (const auto& t : residual) {
    if (!t.is_scalar()) {
      throw Error(Code::InadmissibleOrder,
                  "internal: non-scalar residual after root elimination");
    }
    auto c = t.cell(std::size_t{0});
    if (t.kind() == TableKind::Probability) {
      phi *= c ? *c : 0.0;
    } else if (c) {
      psi += *c;
      any_psi = true;
    }
  }
  if (std::abs(phi - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "total probability mass " << phi << " differs from 1";
    eval.warnings().push_back(msg.str());
  }
  result.meu = any_psi ? phi * psi : 0.0;
  for (auto& w : eval.warnings()) result.warnings.push_back(std::move(w));
  result.strategy = std::move(eval).strategies();
  result.trace = std::move(trace);
  return result;
}

EliminationOutcome eliminate_in_order(
    const Model& m, std::vector<PartialTable> potentials,
    const std::vector<VariableIndex>& variables,
    const std::vector<VariableIndex>& order) {
  auto sorted_vars = variables;
  auto sorted_order = order;
  std::sort(sorted_vars.begin(), sorted_vars.end());
  std::sort(sorted_order.begin(), sorted_order.end());
  if (sorted_vars != sorted_order) {
    throw Error(Code::InadmissibleOrder,
                "order must be a permutation of the eliminated variables");
  }
  PartialOrder po = induce_order(m);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (po.precedes(order[i], order[j])) {
        throw Error(Code::InadmissibleOrder,
                    m.node(order[i]).name + " is eliminated before " +
                        m.node(order[j]).name +
                        " yet precedes it in the induced order");
      }
    }
  }
  EliminationOutcome out;
  std::vector<PartialTable> pool = std::move(potentials);
  std::vector<ArgmaxTable> argmaxes;
  for (VariableIndex v : order) {
    eliminate_one(m, pool, v, &argmaxes);
  }
  out.argmaxes = std::move(argmaxes);
  for (auto& t : pool) {
    if (t.kind() == TableKind::Probability) {
      out.probabilities.push_back(std::move(t));
    } else {
      out.utilities.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace aid
