#include "aid/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace aid {

const char* node_kind_name(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Chance:
      return "chance";
    case NodeKind::ActionDecision:
      return "decision";
    case NodeKind::TestDecision:
      return "testdecision";
    case NodeKind::Value:
      return "value";
  }
  return "?";
}

const char* arc_kind_name(ArcKind k) noexcept {
  switch (k) {
    case ArcKind::Dependency:
      return "dependency";
    case ArcKind::Informational:
      return "informational";
    case ArcKind::Restriction:
      return "restriction";
    case ArcKind::Test:
      return "test";
    case ArcKind::Functional:
      return "functional";
  }
  return "?";
}

const char* code_name(Code c) noexcept {
  switch (c) {
    case Code::Syntax: return "Syntax";
    case Code::EmptyModel: return "EmptyModel";
    case Code::DuplicateDeclaration: return "DuplicateDeclaration";
    case Code::UnknownReference: return "UnknownReference";
    case Code::UnknownState: return "UnknownState";
    case Code::Arity: return "Arity";
    case Code::LabelWithoutArc: return "LabelWithoutArc";
    case Code::LabelOnNonInformationalArc: return "LabelOnNonInformationalArc";
    case Code::BadArcKind: return "BadArcKind";
    case Code::NegativeUtility: return "NegativeUtility";
    case Code::BadProbability: return "BadProbability";
    case Code::CptRowSum: return "CptRowSum";
    case Code::PartialRowUncovered: return "PartialRowUncovered";
    case Code::TestArcFromNonTest: return "TestArcFromNonTest";
    case Code::ValueNodeWithSuccessor: return "ValueNodeWithSuccessor";
    case Code::BarrenNode: return "BarrenNode";
    case Code::RestrictiveIncomplete: return "RestrictiveIncomplete";
    case Code::RestrictiveEmptyOptions: return "RestrictiveEmptyOptions";
    case Code::NotAChanceVariable: return "NotAChanceVariable";
    case Code::NotADecision: return "NotADecision";
    case Code::UnknownNode: return "UnknownNode";
    case Code::IncompleteAssignment: return "IncompleteAssignment";
    case Code::KindMismatch: return "KindMismatch";
    case Code::VariableNotInDomain: return "VariableNotInDomain";
    case Code::NotInitialSplit: return "NotInitialSplit";
    case Code::ImpossibleState: return "ImpossibleState";
    case Code::NoUniqueInitialSplit: return "NoUniqueInitialSplit";
    case Code::OrderContradiction: return "OrderContradiction";
    case Code::UnbrokenCycle: return "UnbrokenCycle";
    case Code::UnresolvedLeaf: return "UnresolvedLeaf";
    case Code::IllDefined: return "IllDefined";
    case Code::InadmissibleOrder: return "InadmissibleOrder";
    case Code::TreeBudgetExceeded: return "TreeBudgetExceeded";
    case Code::Usage: return "Usage";
  }
  return "?";
}

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  out << (severity == Severity::Error ? "error" : "warning") << " ["
      << code_name(code) << "]";
  if (!subject.empty()) out << " " << subject;
  out << ": " << message;
  return out.str();
}

std::optional<VariableIndex> Model::find(const std::string& name) const {
  for (VariableIndex v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].name == name) return v;
  }
  return std::nullopt;
}

std::optional<StateIndex> Model::find_state(VariableIndex v,
                                            const std::string& state) const {
  const auto& states = nodes_[v].states;
  for (StateIndex s = 0; s < states.size(); ++s) {
    if (states[s] == state) return s;
  }
  return std::nullopt;
}

std::vector<VariableIndex> Model::parents(VariableIndex v) const {
  std::vector<VariableIndex> out;
  for (const auto& arc : arcs_) {
    if (arc.dst == v) out.push_back(arc.src);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<VariableIndex> Model::children(VariableIndex v) const {
  std::vector<VariableIndex> out;
  for (const auto& arc : arcs_) {
    if (arc.src == v) out.push_back(arc.dst);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

VariableIndex ModelBuilder::add_node(std::string name, NodeKind kind,
                                     std::vector<std::string> states,
                                     Label label) {
  nodes_.push_back(Node{std::move(name), kind, std::move(states),
                        std::move(label)});
  return static_cast<VariableIndex>(nodes_.size() - 1);
}

void ModelBuilder::add_arc(VariableIndex src, VariableIndex dst, ArcKind kind,
                           Label label) {
  arcs_.push_back(Arc{src, dst, kind, std::move(label)});
}

void ModelBuilder::add_probability(VariableIndex chance, PartialTable table) {
  probabilities_.insert_or_assign(chance, std::move(table));
}

void ModelBuilder::add_utility(VariableIndex value, PartialTable table) {
  utilities_.insert_or_assign(value, std::move(table));
}

void ModelBuilder::add_restrictive(RestrictiveFunction f) {
  restrictives_.push_back(std::move(f));
}

namespace {

constexpr double kRowSumTolerance = 1e-9;

struct Validator {
  const std::vector<Node>& nodes;
  const std::vector<Arc>& arcs;
  std::vector<Diagnostic> diags;

  void emit(Code code, Severity sev, const std::string& subject,
            const std::string& message) {
    diags.push_back(Diagnostic{code, sev, subject, message});
  }

  bool arc_exists(VariableIndex src, VariableIndex dst) const {
    for (const auto& a : arcs) {
      if (a.src == src && a.dst == dst) return true;
    }
    return false;
  }
};

}  // namespace

BuildResult ModelBuilder::build() const {
  Validator v{nodes_, arcs_, {}};
  const auto n = static_cast<VariableIndex>(nodes_.size());

  if (n == 0) {
    v.emit(Code::EmptyModel, Severity::Error, "", "no variables declared");
  }

  // Duplicate names and state lists.
  for (VariableIndex i = 0; i < n; ++i) {
    for (VariableIndex j = i + 1; j < n; ++j) {
      if (nodes_[i].name == nodes_[j].name) {
        v.emit(Code::DuplicateDeclaration, Severity::Error, nodes_[j].name,
               "variable declared more than once");
      }
    }
    const auto& node = nodes_[i];
    if (node.kind == NodeKind::Value) {
      if (!node.states.empty()) {
        v.emit(Code::Arity, Severity::Error, node.name,
               "value nodes have no states");
      }
    } else if (node.states.empty()) {
      v.emit(Code::Arity, Severity::Error, node.name,
             "chance and decision nodes need at least one state");
    }
    std::set<std::string> seen;
    for (const auto& s : node.states) {
      if (!seen.insert(s).second) {
        v.emit(Code::DuplicateDeclaration, Severity::Error, node.name,
               "duplicate state '" + s + "'");
      }
    }
  }

  // Arc endpoint and kind checks.
  for (const auto& arc : arcs_) {
    if (arc.src >= n || arc.dst >= n) {
      v.emit(Code::UnknownReference, Severity::Error, "arc",
             "arc endpoint out of range");
      continue;
    }
    const Node& src = nodes_[arc.src];
    const Node& dst = nodes_[arc.dst];
    std::string subject = src.name + " -> " + dst.name;
    if (src.kind == NodeKind::Value) {
      v.emit(Code::ValueNodeWithSuccessor, Severity::Error, subject,
             "value nodes have no outgoing arcs");
      continue;
    }
    switch (arc.kind) {
      case ArcKind::Test:
        if (src.kind != NodeKind::TestDecision) {
          v.emit(Code::TestArcFromNonTest, Severity::Error, subject,
                 "test arcs emanate from test-decision nodes only");
        }
        if (dst.kind == NodeKind::Value) {
          v.emit(Code::BadArcKind, Severity::Error, subject,
                 "test arcs point at chance or decision nodes");
        }
        break;
      case ArcKind::Dependency:
        if (dst.kind != NodeKind::Chance) {
          v.emit(Code::BadArcKind, Severity::Error, subject,
                 "dependency arcs point into chance nodes");
        } else if (src.kind == NodeKind::TestDecision) {
          v.emit(Code::BadArcKind, Severity::Error, subject,
                 "an arc from a test decision into a chance node is a test arc");
        }
        break;
      case ArcKind::Informational:
      case ArcKind::Restriction:
        if (dst.kind != NodeKind::ActionDecision &&
            dst.kind != NodeKind::TestDecision) {
          v.emit(Code::BadArcKind, Severity::Error, subject,
                 "informational arcs point into decision nodes");
        }
        break;
      case ArcKind::Functional:
        if (dst.kind != NodeKind::Value) {
          v.emit(Code::BadArcKind, Severity::Error, subject,
                 "functional arcs point into value nodes");
        }
        break;
    }
    bool informational_family =
        arc.kind == ArcKind::Informational || arc.kind == ArcKind::Restriction ||
        (arc.kind == ArcKind::Test && dst.kind != NodeKind::Chance &&
         dst.kind != NodeKind::Value);
    if (!arc.label.is_constant_true() && !informational_family) {
      v.emit(Code::LabelOnNonInformationalArc, Severity::Error, subject,
             "labels are only meaningful on informational arcs");
    }
  }

  // Label references resolve and satisfy the arc-existence rule: a label on
  // Z (or on an arc into Z) mentioning X requires an arc (X, Z).
  auto check_label = [&](const Label& label, VariableIndex target,
                         const std::string& subject) {
    for (VariableIndex x : label.domain()) {
      if (x >= n) {
        v.emit(Code::UnknownReference, Severity::Error, subject,
               "label references an unknown variable");
        continue;
      }
      if (!v.arc_exists(x, target)) {
        v.emit(Code::LabelWithoutArc, Severity::Error, subject,
               "label mentions " + nodes_[x].name + " but there is no arc " +
                   nodes_[x].name + " -> " + nodes_[target].name);
      }
    }
  };
  for (VariableIndex i = 0; i < n; ++i) {
    if (!nodes_[i].label.is_constant_true()) {
      check_label(nodes_[i].label, i, nodes_[i].name);
    }
  }
  for (const auto& arc : arcs_) {
    if (arc.src >= n || arc.dst >= n) continue;
    if (!arc.label.is_constant_true()) {
      check_label(arc.label, arc.dst,
                  nodes_[arc.src].name + " -> " + nodes_[arc.dst].name);
    }
  }

  // Tables.
  for (VariableIndex i = 0; i < n; ++i) {
    const Node& node = nodes_[i];
    if (node.kind == NodeKind::Chance) {
      auto it = probabilities_.find(i);
      if (it == probabilities_.end()) {
        v.emit(Code::UnknownReference, Severity::Error, node.name,
               "chance variable has no probability table");
        continue;
      }
      const PartialTable& t = it->second;
      // Expected domain {X} ∪ (parents minus test decisions).
      std::vector<VariableIndex> expected{i};
      for (const auto& arc : arcs_) {
        if (arc.dst == i && arc.src < n &&
            nodes_[arc.src].kind != NodeKind::TestDecision) {
          expected.push_back(arc.src);
        }
      }
      std::sort(expected.begin(), expected.end());
      expected.erase(std::unique(expected.begin(), expected.end()),
                     expected.end());
      if (t.domain() != expected) {
        v.emit(Code::Arity, Severity::Error, node.name,
               "probability table domain must be the variable plus its "
               "non-test parents");
        continue;
      }
      // Cell ranges and per-parent-configuration sums.
      std::size_t xpos =
          std::lower_bound(t.domain().begin(), t.domain().end(), i) -
          t.domain().begin();
      std::uint32_t xcard = t.cardinalities()[xpos];
      std::size_t groups = t.size() / xcard;
      std::vector<double> sums(groups, 0.0);
      std::vector<bool> any(groups, false);
      for (std::size_t flat = 0; flat < t.size(); ++flat) {
        auto config = t.config_of(flat);
        if (t.defined(flat)) {
          double val = t.value(flat);
          if (val < 0.0 || val > 1.0) {
            v.emit(Code::BadProbability, Severity::Error, node.name,
                   "probability cell outside [0, 1]");
          }
          // Group index: config with X removed.
          std::vector<StateIndex> rest = config;
          rest.erase(rest.begin() + xpos);
          std::size_t g = 0;
          for (std::size_t k = 0, r = 0; k < t.domain().size(); ++k) {
            if (k == xpos) continue;
            g = g * t.cardinalities()[k] + rest[r++];
          }
          sums[g] += val;
          any[g] = true;
        }
      }
      for (std::size_t g = 0; g < groups; ++g) {
        if (any[g] && std::abs(sums[g] - 1.0) > kRowSumTolerance) {
          v.emit(Code::CptRowSum, Severity::Error, node.name,
                 "defined cells of a conditional row must sum to 1");
        }
        if (!any[g]) {
          // Legal only when the labeling rules out the configuration.
          Assignment a;
          // Decode the group index back into parent states.
          std::vector<StateIndex> pconfig;
          {
            std::vector<std::uint32_t> pcard;
            std::vector<VariableIndex> pvars;
            for (std::size_t k = 0; k < t.domain().size(); ++k) {
              if (k == xpos) continue;
              pcard.push_back(t.cardinalities()[k]);
              pvars.push_back(t.domain()[k]);
            }
            std::size_t r = g;
            pconfig.assign(pcard.size(), 0);
            for (std::size_t k = pcard.size(); k-- > 0;) {
              pconfig[k] = static_cast<StateIndex>(r % pcard[k]);
              r /= pcard[k];
            }
            for (std::size_t k = 0; k < pvars.size(); ++k) {
              a.set(pvars[k], pconfig[k]);
            }
          }
          auto excluded = node.label.restricted(a).semantic_constant(
              [&](VariableIndex vv) { return nodes_[vv].states.size(); }, 8);
          if (!(excluded.has_value() && !*excluded)) {
            v.emit(Code::PartialRowUncovered, Severity::Warning, node.name,
                   "a parent configuration has only undefined cells and the "
                   "label of the variable does not exclude it");
          }
        }
      }
    } else if (probabilities_.count(i)) {
      v.emit(Code::NotAChanceVariable, Severity::Error, node.name,
             "only chance variables carry probability tables");
    }
    if (node.kind == NodeKind::Value) {
      auto it = utilities_.find(i);
      if (it == utilities_.end()) {
        v.emit(Code::UnknownReference, Severity::Error, node.name,
               "value node has no utility table");
        continue;
      }
      const PartialTable& t = it->second;
      std::vector<VariableIndex> expected;
      for (const auto& arc : arcs_) {
        if (arc.dst == i && arc.src < n) expected.push_back(arc.src);
      }
      std::sort(expected.begin(), expected.end());
      expected.erase(std::unique(expected.begin(), expected.end()),
                     expected.end());
      if (t.domain() != expected) {
        v.emit(Code::Arity, Severity::Error, node.name,
               "utility table domain must be the value node's parents");
        continue;
      }
      for (std::size_t flat = 0; flat < t.size(); ++flat) {
        if (t.defined(flat) && t.value(flat) < 0.0) {
          v.emit(Code::NegativeUtility, Severity::Error, node.name,
                 "utility cells are nonnegative or undefined");
          break;
        }
      }
    } else if (utilities_.count(i)) {
      v.emit(Code::UnknownReference, Severity::Error, node.name,
             "only value nodes carry utility tables");
    }
  }

  // Restrictive functions.
  for (const auto& rf : restrictives_) {
    if (rf.decision >= n) {
      v.emit(Code::UnknownReference, Severity::Error, "restrict",
             "restrictive function names an unknown decision");
      continue;
    }
    const Node& dec = nodes_[rf.decision];
    if (dec.kind != NodeKind::ActionDecision &&
        dec.kind != NodeKind::TestDecision) {
      v.emit(Code::NotADecision, Severity::Error, dec.name,
             "restrictive functions attach to decisions");
      continue;
    }
    std::size_t rows = 1;
    for (std::size_t k = 0; k < rf.domain.size(); ++k) {
      VariableIndex rv = rf.domain[k];
      if (rv >= n) {
        v.emit(Code::UnknownReference, Severity::Error, dec.name,
               "restrictive domain names an unknown variable");
        continue;
      }
      rows *= rf.cardinalities[k];
      bool has_restriction_arc = false;
      for (const auto& arc : arcs_) {
        if (arc.src == rv && arc.dst == rf.decision &&
            arc.kind == ArcKind::Restriction) {
          has_restriction_arc = true;
        }
      }
      if (!has_restriction_arc) {
        v.emit(Code::UnknownReference, Severity::Error, dec.name,
               "restricting variable " + nodes_[rv].name +
                   " has no restriction arc into the decision");
      }
    }
    if (rf.options.size() != rows) {
      v.emit(Code::RestrictiveIncomplete, Severity::Error, dec.name,
             "every configuration over the restrictive domain needs an "
             "option set");
      continue;
    }
    for (const auto& mask : rf.options) {
      if (mask.size() != dec.states.size() ||
          std::none_of(mask.begin(), mask.end(), [](char c) { return c; })) {
        v.emit(Code::RestrictiveEmptyOptions, Severity::Error, dec.name,
               "restrictive option sets must be nonempty subsets of the "
               "decision's states");
        break;
      }
    }
  }

  // Barren check: chance/decision nodes must precede some other node,
  // directly or through descendants.
  {
    std::vector<char> barren(n, 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (VariableIndex i = 0; i < n; ++i) {
        if (barren[i] || nodes_[i].kind == NodeKind::Value) continue;
        bool all_barren = true;
        bool has_child = false;
        for (const auto& arc : arcs_) {
          if (arc.src != i || arc.dst >= n) continue;
          has_child = true;
          if (!barren[arc.dst]) all_barren = false;
        }
        if (!has_child || all_barren) {
          barren[i] = 1;
          changed = true;
        }
      }
    }
    for (VariableIndex i = 0; i < n; ++i) {
      if (barren[i]) {
        v.emit(Code::BarrenNode, Severity::Error, nodes_[i].name,
               "node precedes no other node and has no impact on decisions");
      }
    }
  }

  std::sort(v.diags.begin(), v.diags.end(), [](const auto& a, const auto& b) {
    if (a.code != b.code) return a.code < b.code;
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.message < b.message;
  });
  v.diags.erase(std::unique(v.diags.begin(), v.diags.end(),
                            [](const auto& a, const auto& b) {
                              return a.code == b.code &&
                                     a.subject == b.subject &&
                                     a.message == b.message;
                            }),
                v.diags.end());

  bool has_error = std::any_of(v.diags.begin(), v.diags.end(), [](const auto& d) {
    return d.severity == Severity::Error;
  });
  BuildResult result;
  result.diagnostics = std::move(v.diags);
  if (has_error) return result;

  Model m;
  m.nodes_ = nodes_;
  m.arcs_ = arcs_;
  m.restrictives_ = restrictives_;
  m.probabilities_ = probabilities_;
  m.utilities_ = utilities_;
  m.present_.assign(nodes_.size(), 1);
  m.current_states_.resize(nodes_.size());
  for (VariableIndex i = 0; i < nodes_.size(); ++i) {
    for (StateIndex s = 0; s < nodes_[i].states.size(); ++s) {
      m.current_states_[i].push_back(s);
    }
  }
  m.free_floor_.assign(nodes_.size(), 1);
  result.model = std::move(m);
  return result;
}

std::vector<VariableIndex> probability_domain(const Model& m, VariableIndex x) {
  if (x >= m.node_count() || !m.is_chance(x)) {
    throw Error(Code::NotAChanceVariable,
                "probability_domain requires a chance variable");
  }
  std::vector<VariableIndex> out{x};
  for (const auto& arc : m.arcs()) {
    if (arc.dst == x && m.node(arc.src).kind != NodeKind::TestDecision) {
      out.push_back(arc.src);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

bool tables_equal(const std::map<VariableIndex, PartialTable>& a,
                  const std::map<VariableIndex, PartialTable>& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!approx_equal(ia->second, ib->second, 0.0)) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Model& a, const Model& b) {
  if (a.node_count() != b.node_count()) return false;
  for (VariableIndex i = 0; i < a.node_count(); ++i) {
    const Node& na = a.node(i);
    const Node& nb = b.node(i);
    if (na.name != nb.name || na.kind != nb.kind || na.states != nb.states ||
        !na.label.structurally_equal(nb.label)) {
      return false;
    }
    if (a.present(i) != b.present(i)) return false;
    if (a.current_states(i) != b.current_states(i)) return false;
  }
  if (a.arcs().size() != b.arcs().size()) return false;
  for (std::size_t i = 0; i < a.arcs().size(); ++i) {
    const Arc& xa = a.arcs()[i];
    const Arc& xb = b.arcs()[i];
    if (xa.src != xb.src || xa.dst != xb.dst || xa.kind != xb.kind ||
        !xa.label.structurally_equal(xb.label)) {
      return false;
    }
  }
  if (a.restrictives().size() != b.restrictives().size()) return false;
  for (std::size_t i = 0; i < a.restrictives().size(); ++i) {
    const auto& ra = a.restrictives()[i];
    const auto& rb = b.restrictives()[i];
    if (ra.decision != rb.decision || ra.domain != rb.domain ||
        ra.cardinalities != rb.cardinalities || ra.options != rb.options) {
      return false;
    }
  }
  return tables_equal(a.probabilities(), b.probabilities()) &&
         tables_equal(a.utilities(), b.utilities());
}

}  // namespace aid
