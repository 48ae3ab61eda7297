#include "model_gen.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>

#include "aid/structure.hpp"

namespace aid::testing {

namespace {

struct Slot {
  NodeKind kind;
  std::uint32_t card;
  bool observed = false;  // chance observed before a later decision
};

std::optional<Model> try_random_model(Rng& rng, const GenOptions& o) {
  std::size_t n_dec = 1 + rng.below(3);
  if (n_dec + 1 > o.max_variables) n_dec = o.max_variables - 1;
  std::size_t n_chance = 1 + rng.below(o.max_variables - n_dec);
  if (o.force_order_slack && n_chance < 2) n_chance = 2;

  // Variables on a temporal chain.
  std::vector<Slot> chain;
  for (std::size_t i = 0; i < n_dec; ++i) {
    chain.push_back({NodeKind::ActionDecision,
                     static_cast<std::uint32_t>(2 + rng.below(o.max_states - 1)),
                     false});
  }
  for (std::size_t i = 0; i < n_chance; ++i) {
    chain.push_back({NodeKind::Chance,
                     static_cast<std::uint32_t>(2 + rng.below(o.max_states - 1)),
                     false});
  }
  for (std::size_t i = chain.size(); i > 1; --i) {
    std::swap(chain[i - 1], chain[rng.below(i)]);
  }
  std::size_t last_decision = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].kind == NodeKind::ActionDecision) last_decision = i;
  }
  std::size_t unobserved = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].kind != NodeKind::Chance) continue;
    if (i < last_decision && rng.chance(0.7)) {
      chain[i].observed = true;
    } else {
      ++unobserved;
    }
  }
  if (o.force_order_slack && unobserved < 2) {
    for (std::size_t i = chain.size(); i-- > 0 && unobserved < 2;) {
      if (chain[i].kind == NodeKind::Chance && chain[i].observed) {
        chain[i].observed = false;
        ++unobserved;
      }
    }
    if (unobserved < 2) return std::nullopt;
  }

  // Split variables: pairwise comparable — decisions always qualify, and at
  // most one observed chance variable per decision-separated segment.
  std::size_t want_splits =
      o.min_splits + rng.below(o.max_splits - o.min_splits + 1);
  std::vector<std::size_t> splits;
  int segment = 0;
  int last_chance_split_segment = -1;
  for (std::size_t i = 0; i + 1 < chain.size() && splits.size() < want_splits;
       ++i) {
    bool usable = false;
    if (chain[i].kind == NodeKind::ActionDecision) {
      usable = true;
    } else if (chain[i].observed && segment != last_chance_split_segment) {
      usable = true;
    }
    if (usable && rng.chance(0.8)) {
      splits.push_back(i);
      if (chain[i].kind == NodeKind::Chance) {
        last_chance_split_segment = segment;
      }
    }
    if (chain[i].kind == NodeKind::ActionDecision) ++segment;
  }
  if (splits.empty()) return std::nullopt;

  // Labels on later, non-split chance variables over the split variables.
  std::vector<Label> labels(chain.size());
  std::vector<std::pair<std::size_t, std::size_t>> label_arcs;
  {
    std::set<std::size_t> labeled;
    std::size_t n_labels = 1 + rng.below(3);
    for (std::size_t k = 0; k < n_labels; ++k) {
      std::vector<std::size_t> candidates;
      for (std::size_t i = splits.front() + 1; i < chain.size(); ++i) {
        if (chain[i].kind != NodeKind::Chance) continue;
        if (labeled.count(i)) continue;
        if (std::find(splits.begin(), splits.end(), i) != splits.end()) {
          continue;
        }
        candidates.push_back(i);
      }
      if (candidates.empty()) break;
      std::size_t target = candidates[rng.below(candidates.size())];
      std::vector<std::size_t> refs;
      for (std::size_t s : splits) {
        if (s < target && (refs.empty() || rng.chance(0.4))) refs.push_back(s);
      }
      if (refs.empty()) continue;
      labeled.insert(target);
      Label l;
      bool first = true;
      for (std::size_t ref : refs) {
        StateIndex st = static_cast<StateIndex>(rng.below(chain[ref].card));
        Label atom = Label::atom(static_cast<VariableIndex>(ref), st);
        if (rng.chance(0.3)) atom = Label::negation(atom);
        l = first ? atom
                  : (rng.chance(0.5) ? Label::disjunction(l, atom)
                                     : Label::conjunction(l, atom));
        first = false;
        label_arcs.emplace_back(ref, target);
      }
      labels[target] = l;
    }
    if (labeled.empty()) return std::nullopt;
  }

  // Arc plan: chain indices coincide with variable indices.
  std::vector<std::pair<std::size_t, std::size_t>> info_arcs;
  std::optional<std::size_t> prev_decision;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].kind != NodeKind::ActionDecision) continue;
    if (prev_decision) info_arcs.emplace_back(*prev_decision, i);
    for (std::size_t j = prev_decision ? *prev_decision + 1 : 0; j < i; ++j) {
      if (chain[j].kind == NodeKind::Chance && chain[j].observed) {
        info_arcs.emplace_back(j, i);
      }
    }
    prev_decision = i;
  }
  std::vector<std::set<std::size_t>> cpt_parents(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].kind != NodeKind::Chance) continue;
    std::size_t picks = rng.below(3);
    for (std::size_t k = 0; k < picks && i > 0; ++k) {
      cpt_parents[i].insert(rng.below(i));
    }
    for (const auto& [src, dst] : label_arcs) {
      if (dst == i) cpt_parents[i].insert(src);
    }
  }

  // Restriction on a decision with an observed, unlabeled predecessor.
  std::optional<std::pair<std::size_t, std::size_t>> restriction;
  if (o.with_restrictive && rng.chance(0.4)) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (chain[i].kind != NodeKind::ActionDecision) continue;
      for (std::size_t j = 0; j < i; ++j) {
        bool observed_here = chain[j].kind == NodeKind::ActionDecision ||
                             (chain[j].kind == NodeKind::Chance &&
                              chain[j].observed);
        if (observed_here && labels[j].is_constant_true()) {
          restriction = {j, i};
        }
      }
    }
  }

  // Value nodes, with leaf coverage so nothing is barren.
  std::size_t n_values = 1 + rng.below(2);
  std::vector<std::set<std::size_t>> value_parents(n_values);
  for (std::size_t u = 0; u < n_values; ++u) {
    std::size_t picks = 1 + rng.below(3);
    for (std::size_t k = 0; k < picks; ++k) {
      value_parents[u].insert(rng.below(chain.size()));
    }
  }
  {
    std::vector<char> child(chain.size(), 0);
    for (const auto& [src, dst] : info_arcs) {
      (void)dst;
      child[src] = 1;
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
      for (std::size_t j : cpt_parents[i]) child[j] = 1;
    }
    if (restriction) child[restriction->first] = 1;
    for (std::size_t u = 0; u < n_values; ++u) {
      for (std::size_t p : value_parents[u]) child[p] = 1;
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (!child[i]) value_parents[0].insert(i);
    }
  }

  // Assemble.
  ModelBuilder builder;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    std::vector<std::string> states;
    for (std::uint32_t s = 0; s < chain[i].card; ++s) {
      states.push_back("s" + std::to_string(s));
    }
    std::string name =
        (chain[i].kind == NodeKind::Chance ? "C" : "D") + std::to_string(i);
    builder.add_node(name, chain[i].kind, states, labels[i]);
  }
  std::vector<VariableIndex> value_index;
  for (std::size_t u = 0; u < n_values; ++u) {
    value_index.push_back(
        builder.add_node("U" + std::to_string(u), NodeKind::Value, {}));
  }
  for (const auto& [src, dst] : info_arcs) {
    builder.add_arc(static_cast<VariableIndex>(src),
                    static_cast<VariableIndex>(dst), ArcKind::Informational);
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (std::size_t j : cpt_parents[i]) {
      builder.add_arc(static_cast<VariableIndex>(j),
                      static_cast<VariableIndex>(i), ArcKind::Dependency);
    }
  }
  for (const auto& [src, dst] : label_arcs) {
    if (chain[dst].kind == NodeKind::ActionDecision) {
      builder.add_arc(static_cast<VariableIndex>(src),
                      static_cast<VariableIndex>(dst),
                      ArcKind::Informational);
    }
  }
  if (restriction) {
    builder.add_arc(static_cast<VariableIndex>(restriction->first),
                    static_cast<VariableIndex>(restriction->second),
                    ArcKind::Restriction);
    RestrictiveFunction rf;
    rf.decision = static_cast<VariableIndex>(restriction->second);
    rf.domain = {static_cast<VariableIndex>(restriction->first)};
    rf.cardinalities = {chain[restriction->first].card};
    std::uint32_t dcard = chain[restriction->second].card;
    for (std::uint32_t r = 0; r < rf.cardinalities[0]; ++r) {
      std::vector<char> mask(dcard, 0);
      std::size_t keep = 1 + rng.below(dcard);
      for (std::size_t k = 0; k < keep; ++k) mask[rng.below(dcard)] = 1;
      if (std::none_of(mask.begin(), mask.end(), [](char c) { return c; })) {
        mask[0] = 1;
      }
      rf.options.push_back(mask);
    }
    builder.add_restrictive(std::move(rf));
  }
  for (std::size_t u = 0; u < n_values; ++u) {
    for (std::size_t p : value_parents[u]) {
      builder.add_arc(static_cast<VariableIndex>(p), value_index[u],
                      ArcKind::Functional);
    }
  }

  // Fully defined random realization.
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i].kind != NodeKind::Chance) continue;
    std::vector<VariableIndex> domain;
    for (std::size_t j : cpt_parents[i]) {
      domain.push_back(static_cast<VariableIndex>(j));
    }
    domain.push_back(static_cast<VariableIndex>(i));
    std::sort(domain.begin(), domain.end());
    std::vector<std::uint32_t> card;
    for (VariableIndex v : domain) card.push_back(chain[v].card);
    PartialTable t(TableKind::Probability, domain, card);
    std::size_t pos =
        std::lower_bound(domain.begin(), domain.end(),
                         static_cast<VariableIndex>(i)) -
        domain.begin();
    std::uint32_t xcard = chain[i].card;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      auto cfg = t.config_of(flat);
      if (cfg[pos] == 0) {
        auto row = rng.dirichlet_row(xcard);
        for (StateIndex s = 0; s < xcard; ++s) {
          cfg[pos] = s;
          t.set(cfg, row[s]);
        }
      }
    }
    builder.add_probability(static_cast<VariableIndex>(i), std::move(t));
  }
  for (std::size_t u = 0; u < n_values; ++u) {
    std::vector<VariableIndex> domain(value_parents[u].begin(),
                                      value_parents[u].end());
    std::vector<std::uint32_t> card;
    for (VariableIndex v : domain) card.push_back(chain[v].card);
    PartialTable t(TableKind::Utility, domain, card);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
      t.set(flat, rng.uniform(0.0, 10.0));
    }
    builder.add_utility(value_index[u], std::move(t));
  }

  auto built = builder.build();
  if (!built.ok()) return std::nullopt;
  try {
    auto wd = well_definedness(*built.model);
    if (wd.verdict != WellDefinedness::Verdict::WellDefined) {
      return std::nullopt;
    }
    if (!validate_cycles(*built.model).empty()) return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
  return std::move(built.model);
}

}  // namespace

Model random_model(Rng& rng, const GenOptions& options) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (auto m = try_random_model(rng, options)) return std::move(*m);
  }
  throw Error(Code::UnknownReference,
              "random_model failed to produce a well-defined diagram");
}

}  // namespace aid::testing
