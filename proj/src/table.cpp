#include "aid/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace aid {

namespace {

std::size_t cell_count(const std::vector<std::uint32_t>& card) {
  std::size_t n = 1;
  for (auto c : card) n *= c;
  return n;
}

// Strides of each domain variable, first variable slowest (row-major).
std::vector<std::size_t> strides_of(const std::vector<std::uint32_t>& card) {
  std::vector<std::size_t> s(card.size(), 1);
  for (std::size_t i = card.size(); i-- > 1;) {
    s[i - 1] = s[i] * card[i];
  }
  return s;
}

}  // namespace

PartialTable::PartialTable(TableKind kind, std::vector<VariableIndex> domain,
                           std::vector<std::uint32_t> cardinalities)
    : kind_(kind), domain_(std::move(domain)), card_(std::move(cardinalities)) {
  if (domain_.size() != card_.size()) {
    throw Error(Code::Arity, "domain/cardinality length mismatch");
  }
  for (std::size_t i = 1; i < domain_.size(); ++i) {
    if (domain_[i - 1] >= domain_[i]) {
      throw Error(Code::Arity, "table domain must be strictly increasing");
    }
  }
  value_.assign(cell_count(card_), 0.0);
  defined_.assign(value_.size(), 0);
}

PartialTable PartialTable::scalar(TableKind kind, double value) {
  PartialTable t(kind, {}, {});
  t.set(0, value);
  return t;
}

PartialTable PartialTable::undefined_scalar(TableKind kind) {
  PartialTable t(kind, {}, {});
  t.set_undefined(0);
  return t;
}

bool PartialTable::mentions(VariableIndex v) const {
  return std::binary_search(domain_.begin(), domain_.end(), v);
}

std::optional<double> PartialTable::cell(std::size_t flat) const {
  if (!defined_[flat]) return std::nullopt;
  return value_[flat];
}

std::optional<double> PartialTable::cell(
    const std::vector<StateIndex>& config) const {
  return cell(flat_index(config));
}

void PartialTable::set(const std::vector<StateIndex>& config, double v) {
  set(flat_index(config), v);
}

void PartialTable::set_undefined(const std::vector<StateIndex>& config) {
  set_undefined(flat_index(config));
}

std::size_t PartialTable::flat_index(
    const std::vector<StateIndex>& config) const {
  if (config.size() != card_.size()) {
    throw Error(Code::Arity, "configuration arity mismatch");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    flat = flat * card_[i] + config[i];
  }
  return flat;
}

std::vector<StateIndex> PartialTable::config_of(std::size_t flat) const {
  std::vector<StateIndex> config(card_.size());
  for (std::size_t i = card_.size(); i-- > 0;) {
    config[i] = static_cast<StateIndex>(flat % card_[i]);
    flat /= card_[i];
  }
  return config;
}

std::size_t ArgmaxTable::flat_index(
    const std::vector<StateIndex>& config) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    flat = flat * cardinalities[i] + config[i];
  }
  return flat;
}

namespace {

// Maps flat indices of `out` to flat indices of `t`, where dom(t) ⊆ dom(out).
struct Projection {
  std::vector<std::size_t> stride;  // per out-domain position

  Projection(const PartialTable& out, const PartialTable& t) {
    auto tstrides = strides_of(t.cardinalities());
    stride.assign(out.domain().size(), 0);
    for (std::size_t i = 0; i < t.domain().size(); ++i) {
      auto it = std::lower_bound(out.domain().begin(), out.domain().end(),
                                 t.domain()[i]);
      stride[it - out.domain().begin()] = tstrides[i];
    }
  }

  std::size_t map(const std::vector<StateIndex>& out_config) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < out_config.size(); ++i) {
      flat += stride[i] * out_config[i];
    }
    return flat;
  }
};

PartialTable union_shell(TableKind kind, const PartialTable& a,
                         const PartialTable& b) {
  std::vector<VariableIndex> domain;
  std::vector<std::uint32_t> card;
  std::size_t i = 0, j = 0;
  while (i < a.domain().size() || j < b.domain().size()) {
    if (j == b.domain().size() ||
        (i < a.domain().size() && a.domain()[i] < b.domain()[j])) {
      domain.push_back(a.domain()[i]);
      card.push_back(a.cardinalities()[i]);
      ++i;
    } else if (i == a.domain().size() || b.domain()[j] < a.domain()[i]) {
      domain.push_back(b.domain()[j]);
      card.push_back(b.cardinalities()[j]);
      ++j;
    } else {
      if (a.cardinalities()[i] != b.cardinalities()[j]) {
        throw Error(Code::Arity, "cardinality mismatch for shared variable");
      }
      domain.push_back(a.domain()[i]);
      card.push_back(a.cardinalities()[i]);
      ++i;
      ++j;
    }
  }
  return PartialTable(kind, std::move(domain), std::move(card));
}

template <typename F>
void for_each_config(const PartialTable& t, F&& f) {
  std::vector<StateIndex> config(t.domain().size(), 0);
  std::size_t flat = 0;
  const auto& card = t.cardinalities();
  for (;;) {
    f(flat, config);
    std::size_t i = config.size();
    for (; i-- > 0;) {
      if (++config[i] < card[i]) break;
      config[i] = 0;
    }
    ++flat;
    if (i == static_cast<std::size_t>(-1)) break;
  }
}

}  // namespace

PartialTable multiply(const PartialTable& a, const PartialTable& b) {
  TableKind kind = (a.kind() == TableKind::Utility ||
                    b.kind() == TableKind::Utility)
                       ? TableKind::Utility
                       : TableKind::Probability;
  PartialTable out = union_shell(kind, a, b);
  Projection pa(out, a), pb(out, b);
  for_each_config(out, [&](std::size_t flat,
                           const std::vector<StateIndex>& config) {
    auto va = a.cell(pa.map(config));
    auto vb = b.cell(pb.map(config));
    if (va && vb) {
      out.set(flat, *va * *vb);
    } else {
      out.set_undefined(flat);
    }
  });
  return out;
}

PartialTable add(const PartialTable& a, const PartialTable& b) {
  if (a.kind() != TableKind::Utility || b.kind() != TableKind::Utility) {
    throw Error(Code::KindMismatch, "add is defined for utility tables");
  }
  PartialTable out = union_shell(TableKind::Utility, a, b);
  Projection pa(out, a), pb(out, b);
  for_each_config(out, [&](std::size_t flat,
                           const std::vector<StateIndex>& config) {
    auto va = a.cell(pa.map(config));
    auto vb = b.cell(pb.map(config));
    if (va && vb) {
      out.set(flat, *va + *vb);
    } else if (va) {
      out.set(flat, *va);
    } else if (vb) {
      out.set(flat, *vb);
    } else {
      out.set_undefined(flat);
    }
  });
  return out;
}

namespace {

std::size_t position_of(const PartialTable& t, VariableIndex v) {
  auto it = std::lower_bound(t.domain().begin(), t.domain().end(), v);
  if (it == t.domain().end() || *it != v) {
    throw Error(Code::VariableNotInDomain,
                "variable #" + std::to_string(v) + " not in table domain");
  }
  return it - t.domain().begin();
}

PartialTable drop_shell(const PartialTable& t, std::size_t pos) {
  std::vector<VariableIndex> domain = t.domain();
  std::vector<std::uint32_t> card = t.cardinalities();
  domain.erase(domain.begin() + pos);
  card.erase(card.begin() + pos);
  return PartialTable(t.kind(), std::move(domain), std::move(card));
}

}  // namespace

PartialTable sum_out(const PartialTable& t, VariableIndex v) {
  std::size_t pos = position_of(t, v);
  std::uint32_t n = t.cardinalities()[pos];
  PartialTable out = drop_shell(t, pos);
  for_each_config(out, [&](std::size_t flat,
                           const std::vector<StateIndex>& config) {
    std::vector<StateIndex> full(config);
    full.insert(full.begin() + pos, 0);
    bool any = false;
    double total = 0.0;
    for (StateIndex s = 0; s < n; ++s) {
      full[pos] = s;
      if (auto c = t.cell(full)) {
        total += *c;
        any = true;
      }
    }
    if (any) {
      out.set(flat, total);
    } else {
      out.set_undefined(flat);
    }
  });
  return out;
}

std::pair<PartialTable, ArgmaxTable> max_out(const PartialTable& t,
                                             VariableIndex v,
                                             const std::vector<char>& legal) {
  std::size_t pos = position_of(t, v);
  std::uint32_t n = t.cardinalities()[pos];
  if (legal.size() != n) {
    throw Error(Code::Arity, "legal mask arity mismatch");
  }
  PartialTable out = drop_shell(t, pos);
  ArgmaxTable am;
  am.decision = v;
  am.domain = out.domain();
  am.cardinalities = out.cardinalities();
  am.choice.assign(out.size(), kNoState);
  for_each_config(out, [&](std::size_t flat,
                           const std::vector<StateIndex>& config) {
    std::vector<StateIndex> full(config);
    full.insert(full.begin() + pos, 0);
    bool any = false;
    double best = 0.0;
    StateIndex best_s = kNoState;
    for (StateIndex s = 0; s < n; ++s) {
      if (!legal[s]) continue;
      full[pos] = s;
      auto c = t.cell(full);
      if (!c) continue;
      if (!any || *c > best) {
        best = *c;
        best_s = s;
        any = true;
      }
    }
    if (any) {
      out.set(flat, best);
      am.choice[flat] = best_s;
    } else {
      out.set_undefined(flat);
    }
  });
  return {std::move(out), std::move(am)};
}

PartialTable instantiate(const PartialTable& t, const Assignment& a) {
  std::vector<std::size_t> kept;
  std::vector<VariableIndex> domain;
  std::vector<std::uint32_t> card;
  std::vector<StateIndex> fixed(t.domain().size(), kNoState);
  bool any_fixed = false;
  for (std::size_t i = 0; i < t.domain().size(); ++i) {
    if (auto s = a.get(t.domain()[i])) {
      fixed[i] = *s;
      any_fixed = true;
    } else {
      kept.push_back(i);
      domain.push_back(t.domain()[i]);
      card.push_back(t.cardinalities()[i]);
    }
  }
  if (!any_fixed) return t;
  PartialTable out(t.kind(), std::move(domain), std::move(card));
  for_each_config(out, [&](std::size_t flat,
                           const std::vector<StateIndex>& config) {
    std::vector<StateIndex> full = fixed;
    for (std::size_t i = 0; i < kept.size(); ++i) full[kept[i]] = config[i];
    if (auto c = t.cell(full)) {
      out.set(flat, *c);
    } else {
      out.set_undefined(flat);
    }
  });
  return out;
}

PartialTable extend_with(
    TableKind kind, VariableIndex v, std::uint32_t cardinality,
    const std::vector<std::pair<StateIndex, PartialTable>>& branches) {
  // Shell: union of branch domains plus v.
  std::vector<VariableIndex> domain{v};
  std::vector<std::uint32_t> card{cardinality};
  for (const auto& [s, t] : branches) {
    (void)s;
    for (std::size_t i = 0; i < t.domain().size(); ++i) {
      auto it = std::lower_bound(domain.begin(), domain.end(), t.domain()[i]);
      if (it == domain.end() || *it != t.domain()[i]) {
        std::size_t pos = it - domain.begin();
        domain.insert(it, t.domain()[i]);
        card.insert(card.begin() + pos, t.cardinalities()[i]);
      }
    }
  }
  PartialTable out(kind, domain, card);
  std::size_t vpos = position_of(out, v);
  // Default: ⊥ for utilities, 1.0 (empty product) for probabilities.
  for_each_config(out, [&](std::size_t flat, const std::vector<StateIndex>&) {
    if (kind == TableKind::Probability) {
      out.set(flat, 1.0);
    } else {
      out.set_undefined(flat);
    }
  });
  for (const auto& [s, t] : branches) {
    Projection pt(out, t);
    for_each_config(out, [&](std::size_t flat,
                             const std::vector<StateIndex>& config) {
      if (config[vpos] != s) return;
      if (auto c = t.cell(pt.map(config))) {
        out.set(flat, *c);
      } else {
        out.set_undefined(flat);
      }
    });
  }
  return out;
}

PartialTable divide_mass(const PartialTable& num, const PartialTable& den) {
  PartialTable out = union_shell(num.kind(), num, den);
  Projection pn(out, num), pd(out, den);
  for_each_config(out, [&](std::size_t flat,
                           const std::vector<StateIndex>& config) {
    auto n = num.cell(pn.map(config));
    auto d = den.cell(pd.map(config));
    if (!n || !d || *d == 0.0) {
      out.set_undefined(flat);  // unreachable mass
    } else {
      out.set(flat, *n / *d);
    }
  });
  return out;
}

bool approx_equal(const PartialTable& a, const PartialTable& b, double tol) {
  if (a.kind() != b.kind() || a.domain() != b.domain() ||
      a.cardinalities() != b.cardinalities()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.defined(i) != b.defined(i)) return false;
    if (a.defined(i) && std::abs(a.value(i) - b.value(i)) > tol) return false;
  }
  return true;
}

}  // namespace aid
