#ifndef AID_LABEL_HPP
#define AID_LABEL_HPP

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aid/core.hpp"

namespace aid {

// A partial assignment of variables to states. Immutable value type.
class Assignment {
 public:
  Assignment() = default;

  void set(VariableIndex v, StateIndex s);
  std::optional<StateIndex> get(VariableIndex v) const;
  bool contains(VariableIndex v) const { return get(v).has_value(); }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // Sorted by variable index.
  const std::vector<std::pair<VariableIndex, StateIndex>>& entries() const {
    return entries_;
  }

  // Union of two compatible assignments; throws on conflicting states.
  static Assignment merged(const Assignment& a, const Assignment& b);

 private:
  std::vector<std::pair<VariableIndex, StateIndex>> entries_;
};

// Boolean label over Variable=state atoms. Immutable expression tree with
// shared subterms; all operations return fresh values.
class Label {
 public:
  enum class Op : std::uint8_t { True, False, Atom, Not, And, Or, Implies, Iff };

  // Defaults to the constant true (the implicit label of unlabeled nodes).
  Label();

  static Label constant(bool value);
  static Label atom(VariableIndex var, StateIndex state);
  static Label negation(Label e);
  static Label conjunction(Label a, Label b);
  static Label disjunction(Label a, Label b);
  static Label implication(Label a, Label b);
  static Label equivalence(Label a, Label b);

  Op op() const;
  // Atom accessors; only valid when op() == Op::Atom.
  VariableIndex atom_var() const;
  StateIndex atom_state() const;
  const Label lhs() const;  // Not: the child
  const Label rhs() const;

  bool is_true() const { return op() == Op::True; }
  bool is_false() const { return op() == Op::False; }
  bool is_constant_true() const { return is_true(); }

  // Set of variables appearing in atoms.
  std::set<VariableIndex> domain() const;

  // Truth assignment: atoms over assigned variables become constants and the
  // result is constant-folded. Assigning variables outside dom is a no-op.
  Label restricted(const Assignment& a) const;

  // Replace every atom over `v` by the given constant, folding. Used when a
  // variable is removed from a model: its atoms can never be satisfied.
  Label with_variable_constant(VariableIndex v, bool value) const;

  // Total evaluation; throws IncompleteAssignment when dom ⊄ assigned.
  bool evaluate(const Assignment& a) const;

  enum class Constness : std::uint8_t { True, False, NonConstant };
  // Syntactic constness of the (already folded) expression.
  Constness syntactic_constness() const;

  // Semantic constancy by exhaustive enumeration over dom, when |dom| is
  // within `variable_bound`; nullopt means "not decidable within the bound
  // or genuinely non-constant".
  std::optional<bool> semantic_constant(
      const std::function<std::size_t(VariableIndex)>& state_count,
      std::size_t variable_bound = 8) const;

  bool structurally_equal(const Label& other) const;

  // Printer; names resolved through callbacks so the label type stays
  // independent of the model. Minimal parentheses per grammar precedence.
  std::string to_string(
      const std::function<std::string(VariableIndex)>& var_name,
      const std::function<std::string(VariableIndex, StateIndex)>& state_name)
      const;

  struct Rep;  // opaque

 private:
  explicit Label(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

}  // namespace aid

#endif  // AID_LABEL_HPP
