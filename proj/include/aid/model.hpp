#ifndef AID_MODEL_HPP
#define AID_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aid/core.hpp"
#include "aid/label.hpp"
#include "aid/table.hpp"

namespace aid {

struct Node {
  std::string name;
  NodeKind kind;
  std::vector<std::string> states;  // empty iff kind == Value
  Label label;                      // defaults to the constant true
};

struct Arc {
  VariableIndex src;
  VariableIndex dst;
  ArcKind kind;
  Label label;  // only meaningful on informational-family arcs
};

// Legitimate option subsets for one decision, per configuration of the
// restricting variables. `options` is indexed row-major over the domain.
struct RestrictiveFunction {
  VariableIndex decision;
  std::vector<VariableIndex> domain;  // canonical order
  std::vector<std::uint32_t> cardinalities;
  std::vector<std::vector<char>> options;  // per config: mask over W_decision
};

// One step of a reduction path.
struct SplitStep {
  VariableIndex var;
  StateIndex state;
  bool restrictive;  // instantiated as a restrictive variable
};

// An asymmetric influence diagram together with its realization. Node
// indices are stable across reductions: reduced models keep the full node
// table and mark absent nodes as not present. Immutable after build; reduce
// returns a fresh model.
class Model {
 public:
  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(VariableIndex v) const { return nodes_[v]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<RestrictiveFunction>& restrictives() const {
    return restrictives_;
  }
  const std::map<VariableIndex, PartialTable>& probabilities() const {
    return probabilities_;
  }
  const std::map<VariableIndex, PartialTable>& utilities() const {
    return utilities_;
  }

  bool present(VariableIndex v) const { return present_[v] != 0; }
  bool is_decision(VariableIndex v) const {
    return nodes_[v].kind == NodeKind::ActionDecision ||
           nodes_[v].kind == NodeKind::TestDecision;
  }
  bool is_chance(VariableIndex v) const {
    return nodes_[v].kind == NodeKind::Chance;
  }
  bool is_value(VariableIndex v) const {
    return nodes_[v].kind == NodeKind::Value;
  }

  // Possible states after reduction updates (restrictive masking folds into
  // this set); a subsequence of the declared states.
  const std::vector<StateIndex>& current_states(VariableIndex v) const {
    return current_states_[v];
  }

  std::optional<VariableIndex> find(const std::string& name) const;
  std::size_t state_count(VariableIndex v) const {
    return nodes_[v].states.size();
  }
  std::optional<StateIndex> find_state(VariableIndex v,
                                       const std::string& state) const;

  std::vector<VariableIndex> parents(VariableIndex v) const;
  std::vector<VariableIndex> children(VariableIndex v) const;

  // Reduction path that produced this model (empty for a freshly built one).
  const std::vector<SplitStep>& provenance() const { return provenance_; }
  // Present variables that succeeded the last instantiated split variable in
  // the pre-reduction order (the lower bound of the free set); everything when the
  // provenance is empty.
  bool in_free_floor(VariableIndex v) const {
    return provenance_.empty() || free_floor_[v] != 0;
  }


 private:
  friend class ModelBuilder;
  friend Model reduce_unchecked(const Model&, VariableIndex, StateIndex, bool);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<RestrictiveFunction> restrictives_;
  std::map<VariableIndex, PartialTable> probabilities_;
  std::map<VariableIndex, PartialTable> utilities_;
  std::vector<char> present_;
  std::vector<std::vector<StateIndex>> current_states_;
  std::vector<SplitStep> provenance_;
  std::vector<char> free_floor_;
};

struct BuildResult {
  std::optional<Model> model;
  std::vector<Diagnostic> diagnostics;  // warnings may accompany a model
  bool ok() const { return model.has_value(); }
};

// Assembles and validates a model. Collects diagnostics instead of stopping
// at the first defect; the returned diagnostics are sorted and deterministic.
class ModelBuilder {
 public:
  VariableIndex add_node(std::string name, NodeKind kind,
                         std::vector<std::string> states, Label label = {});
  void add_arc(VariableIndex src, VariableIndex dst, ArcKind kind,
               Label label = {});
  void add_probability(VariableIndex chance, PartialTable table);
  void add_utility(VariableIndex value, PartialTable table);
  void add_restrictive(RestrictiveFunction f);

  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  BuildResult build() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<RestrictiveFunction> restrictives_;
  std::map<VariableIndex, PartialTable> probabilities_;
  std::map<VariableIndex, PartialTable> utilities_;
};

// dom(φ_X) = {X} ∪ Π'_X where Π'_X excludes test-decision parents.
std::vector<VariableIndex> probability_domain(const Model& m, VariableIndex x);

// Structural equality over nodes, arcs, labels, tables (cellwise, ⊥ matching
// ⊥) and restrictive functions.
bool structurally_equal(const Model& a, const Model& b);

}  // namespace aid

#endif  // AID_MODEL_HPP
