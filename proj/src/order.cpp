#include "aid/order.hpp"

#include "aid/structure.hpp"

namespace aid {

void PartialOrder::close() {
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (!lt_[i * n_ + k]) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (lt_[k * n_ + j]) lt_[i * n_ + j] = 1;
      }
    }
  }
}

std::optional<VariableIndex> PartialOrder::contradiction() const {
  for (std::size_t v = 0; v < n_; ++v) {
    if (lt_[v * n_ + v]) return static_cast<VariableIndex>(v);
  }
  return std::nullopt;
}

namespace {

PartialOrder base_order(const Model& m) {
  const auto n = m.node_count();
  PartialOrder order(n);

  auto relevant = [&](VariableIndex v) {
    return m.present(v) && !m.is_value(v);
  };

  // Rule 1: any arc into a decision orders its source before it.
  for (const auto& arc : m.arcs()) {
    if (m.is_decision(arc.dst) && relevant(arc.src)) {
      order.add(arc.src, arc.dst);
    }
  }

  // Rule 2: a decision precedes everything reachable from it.
  std::vector<std::vector<VariableIndex>> succ(n);
  for (const auto& arc : m.arcs()) succ[arc.src].push_back(arc.dst);
  for (VariableIndex d = 0; d < n; ++d) {
    if (!relevant(d) || !m.is_decision(d)) continue;
    std::vector<char> seen(n, 0);
    std::vector<VariableIndex> stack{d};
    seen[d] = 1;
    while (!stack.empty()) {
      VariableIndex u = stack.back();
      stack.pop_back();
      for (VariableIndex w : succ[u]) {
        if (seen[w]) continue;
        seen[w] = 1;
        if (relevant(w)) order.add(d, w);
        stack.push_back(w);
      }
    }
  }
  order.close();

  // Rules 3 and 4 depend on the closure state; apply synchronously until
  // nothing changes.
  std::vector<VariableIndex> decisions, chances;
  for (VariableIndex v = 0; v < n; ++v) {
    if (!relevant(v)) continue;
    (m.is_decision(v) ? decisions : chances).push_back(v);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<VariableIndex, VariableIndex>> additions;
    for (VariableIndex a : chances) {
      bool precedes_some_decision = false;
      for (VariableIndex d : decisions) {
        if (order.precedes(a, d)) precedes_some_decision = true;
      }
      for (VariableIndex d : decisions) {
        if (order.precedes(d, a)) continue;
        if (!precedes_some_decision) {
          additions.emplace_back(d, a);  // rule 3: precedes no decision
          continue;
        }
        if (order.precedes(a, d)) continue;
        for (VariableIndex dj : decisions) {  // rule 4: shared successor
          if (order.precedes(d, dj) && order.precedes(a, dj)) {
            additions.emplace_back(d, a);
            break;
          }
        }
      }
    }
    for (const auto& [x, y] : additions) {
      if (!order.precedes(x, y)) {
        order.add(x, y);
        changed = true;
      }
    }
    if (changed) order.close();
  }
  return order;
}

}  // namespace

PartialOrder induce_pid_order(const Model& m) { return base_order(m); }

PartialOrder induce_order(const Model& m) {
  PartialOrder order = base_order(m);
  const auto n = m.node_count();

  // Split refinement: a split variable precedes any previously incomparable
  // non-split variable; restrictive variables count as split variables.
  auto splits = extended_split_variables(m);
  std::vector<char> is_split(n, 0);
  for (VariableIndex s : splits) is_split[s] = 1;
  bool added = false;
  for (VariableIndex x = 0; x < n; ++x) {
    if (!m.present(x) || m.is_value(x) || !is_split[x]) continue;
    for (VariableIndex y = 0; y < n; ++y) {
      if (y == x || !m.present(y) || m.is_value(y) || is_split[y]) continue;
      if (order.incomparable(x, y)) {
        order.add(x, y);
        added = true;
      }
    }
  }
  if (added) order.close();
  return order;
}

}  // namespace aid
