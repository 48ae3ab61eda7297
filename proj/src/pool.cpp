#include "aid/pool.hpp"

namespace aid::detail {

std::vector<PoolEntry> initial_pool(const Model& m) {
  std::vector<PoolEntry> pool;
  for (const auto& [v, t] : m.probabilities()) pool.push_back({v, t});
  for (const auto& [v, t] : m.utilities()) pool.push_back({v, t});
  return pool;
}

bool instantiated_in(const Model& m, VariableIndex v) {
  for (const auto& step : m.provenance()) {
    if (step.var == v) return true;
  }
  return false;
}

std::vector<PoolEntry> transform_pool(const std::vector<PoolEntry>& pool,
                                      const Model& child, VariableIndex v,
                                      StateIndex s) {
  Assignment a;
  a.set(v, s);
  std::vector<PoolEntry> out;
  for (const auto& e : pool) {
    if (e.owner != kNoVariable && !child.present(e.owner) &&
        !instantiated_in(child, e.owner)) {
      continue;  // the owner went missing along with its potential
    }
    PoolEntry kept = e;
    if (kept.table.mentions(v)) kept.table = instantiate(kept.table, a);
    for (VariableIndex d : kept.table.domain()) {
      if (!child.present(d)) {
        throw Error(Code::UnknownReference,
                    "potential references the removed variable " +
                        child.node(d).name);
      }
    }
    out.push_back(std::move(kept));
  }
  return out;
}

std::optional<double> chance_mass(const Model& m,
                                  const std::vector<PoolEntry>& pool) {
  PartialTable acc = PartialTable::scalar(TableKind::Probability, 1.0);
  for (const auto& e : pool) {
    if (e.table.kind() == TableKind::Probability) {
      acc = multiply(acc, e.table);
    }
  }
  Assignment slice;
  for (VariableIndex v : acc.domain()) {
    if (m.is_decision(v)) {
      slice.set(v, m.current_states(v).empty() ? 0 : m.current_states(v)[0]);
    }
  }
  acc = instantiate(acc, slice);
  for (VariableIndex v : std::vector<VariableIndex>(acc.domain())) {
    acc = sum_out(acc, v);
  }
  return acc.cell(std::size_t{0});
}

std::vector<char> legal_mask(const Model& m, VariableIndex v) {
  std::vector<char> mask(m.state_count(v), 0);
  for (StateIndex s : m.current_states(v)) mask[s] = 1;
  return mask;
}

}  // namespace aid::detail
