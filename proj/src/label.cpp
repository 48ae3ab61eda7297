#include "aid/label.hpp"

#include <algorithm>
#include <sstream>

namespace aid {

void Assignment::set(VariableIndex v, StateIndex s) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(),
                             std::make_pair(v, StateIndex{0}),
                             [](const auto& a, const auto& b) {
                               return a.first < b.first;
                             });
  if (it != entries_.end() && it->first == v) {
    it->second = s;
  } else {
    entries_.insert(it, {v, s});
  }
}

std::optional<StateIndex> Assignment::get(VariableIndex v) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(),
                             std::make_pair(v, StateIndex{0}),
                             [](const auto& a, const auto& b) {
                               return a.first < b.first;
                             });
  if (it != entries_.end() && it->first == v) return it->second;
  return std::nullopt;
}

Assignment Assignment::merged(const Assignment& a, const Assignment& b) {
  Assignment out = a;
  for (const auto& [v, s] : b.entries()) {
    auto prev = out.get(v);
    if (prev && *prev != s) {
      throw Error(Code::IncompleteAssignment,
                  "conflicting states in assignment merge");
    }
    out.set(v, s);
  }
  return out;
}

struct Label::Rep {
  Op op;
  VariableIndex var = kNoVariable;
  StateIndex state = kNoState;
  std::shared_ptr<const Rep> lhs, rhs;
};

namespace {

std::shared_ptr<const Label::Rep> make_const(bool value) {
  static const auto true_rep = std::make_shared<const Label::Rep>(
      Label::Rep{Label::Op::True, kNoVariable, kNoState, nullptr, nullptr});
  static const auto false_rep = std::make_shared<const Label::Rep>(
      Label::Rep{Label::Op::False, kNoVariable, kNoState, nullptr, nullptr});
  return value ? true_rep : false_rep;
}

}  // namespace

Label::Label() : rep_(make_const(true)) {}

Label Label::constant(bool value) { return Label(make_const(value)); }

Label Label::atom(VariableIndex var, StateIndex state) {
  return Label(std::make_shared<const Rep>(
      Rep{Op::Atom, var, state, nullptr, nullptr}));
}

Label Label::negation(Label e) {
  switch (e.op()) {
    case Op::True:
      return constant(false);
    case Op::False:
      return constant(true);
    default:
      return Label(std::make_shared<const Rep>(
          Rep{Op::Not, kNoVariable, kNoState, e.rep_, nullptr}));
  }
}

Label Label::conjunction(Label a, Label b) {
  if (a.is_false() || b.is_false()) return constant(false);
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  return Label(std::make_shared<const Rep>(
      Rep{Op::And, kNoVariable, kNoState, a.rep_, b.rep_}));
}

Label Label::disjunction(Label a, Label b) {
  if (a.is_true() || b.is_true()) return constant(true);
  if (a.is_false()) return b;
  if (b.is_false()) return a;
  return Label(std::make_shared<const Rep>(
      Rep{Op::Or, kNoVariable, kNoState, a.rep_, b.rep_}));
}

Label Label::implication(Label a, Label b) {
  if (a.is_false()) return constant(true);
  if (b.is_true()) return constant(true);
  if (a.is_true()) return b;
  if (b.is_false()) return negation(a);
  return Label(std::make_shared<const Rep>(
      Rep{Op::Implies, kNoVariable, kNoState, a.rep_, b.rep_}));
}

Label Label::equivalence(Label a, Label b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  if (a.is_false()) return negation(b);
  if (b.is_false()) return negation(a);
  return Label(std::make_shared<const Rep>(
      Rep{Op::Iff, kNoVariable, kNoState, a.rep_, b.rep_}));
}

Label::Op Label::op() const { return rep_->op; }
VariableIndex Label::atom_var() const { return rep_->var; }
StateIndex Label::atom_state() const { return rep_->state; }
const Label Label::lhs() const { return Label(rep_->lhs); }
const Label Label::rhs() const { return Label(rep_->rhs); }

namespace {

void collect_domain(const Label& l, std::set<VariableIndex>& out) {
  switch (l.op()) {
    case Label::Op::True:
    case Label::Op::False:
      return;
    case Label::Op::Atom:
      out.insert(l.atom_var());
      return;
    case Label::Op::Not:
      collect_domain(l.lhs(), out);
      return;
    default:
      collect_domain(l.lhs(), out);
      collect_domain(l.rhs(), out);
      return;
  }
}

}  // namespace

std::set<VariableIndex> Label::domain() const {
  std::set<VariableIndex> out;
  collect_domain(*this, out);
  return out;
}

Label Label::restricted(const Assignment& a) const {
  switch (op()) {
    case Op::True:
    case Op::False:
      return *this;
    case Op::Atom: {
      auto s = a.get(atom_var());
      if (!s) return *this;
      return constant(*s == atom_state());
    }
    case Op::Not:
      return negation(lhs().restricted(a));
    case Op::And:
      return conjunction(lhs().restricted(a), rhs().restricted(a));
    case Op::Or:
      return disjunction(lhs().restricted(a), rhs().restricted(a));
    case Op::Implies:
      return implication(lhs().restricted(a), rhs().restricted(a));
    case Op::Iff:
      return equivalence(lhs().restricted(a), rhs().restricted(a));
  }
  return *this;
}

Label Label::with_variable_constant(VariableIndex v, bool value) const {
  switch (op()) {
    case Op::True:
    case Op::False:
      return *this;
    case Op::Atom:
      if (atom_var() == v) return constant(value);
      return *this;
    case Op::Not:
      return negation(lhs().with_variable_constant(v, value));
    case Op::And:
      return conjunction(lhs().with_variable_constant(v, value),
                         rhs().with_variable_constant(v, value));
    case Op::Or:
      return disjunction(lhs().with_variable_constant(v, value),
                         rhs().with_variable_constant(v, value));
    case Op::Implies:
      return implication(lhs().with_variable_constant(v, value),
                         rhs().with_variable_constant(v, value));
    case Op::Iff:
      return equivalence(lhs().with_variable_constant(v, value),
                         rhs().with_variable_constant(v, value));
  }
  return *this;
}

bool Label::evaluate(const Assignment& a) const {
  switch (op()) {
    case Op::True:
      return true;
    case Op::False:
      return false;
    case Op::Atom: {
      auto s = a.get(atom_var());
      if (!s) {
        throw Error(Code::IncompleteAssignment,
                    "label evaluation requires variable #" +
                        std::to_string(atom_var()) + " to be assigned");
      }
      return *s == atom_state();
    }
    case Op::Not:
      return !lhs().evaluate(a);
    case Op::And:
      return lhs().evaluate(a) && rhs().evaluate(a);
    case Op::Or:
      return lhs().evaluate(a) || rhs().evaluate(a);
    case Op::Implies:
      return !lhs().evaluate(a) || rhs().evaluate(a);
    case Op::Iff:
      return lhs().evaluate(a) == rhs().evaluate(a);
  }
  return false;
}

Label::Constness Label::syntactic_constness() const {
  switch (op()) {
    case Op::True:
      return Constness::True;
    case Op::False:
      return Constness::False;
    default:
      return Constness::NonConstant;
  }
}

std::optional<bool> Label::semantic_constant(
    const std::function<std::size_t(VariableIndex)>& state_count,
    std::size_t variable_bound) const {
  switch (syntactic_constness()) {
    case Constness::True:
      return true;
    case Constness::False:
      return false;
    case Constness::NonConstant:
      break;
  }
  auto dom = domain();
  std::vector<VariableIndex> vars(dom.begin(), dom.end());
  if (vars.size() > variable_bound) return std::nullopt;

  std::optional<bool> value;
  std::vector<StateIndex> config(vars.size(), 0);
  for (;;) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a.set(vars[i], config[i]);
    bool r = evaluate(a);
    if (!value) {
      value = r;
    } else if (*value != r) {
      return std::nullopt;  // genuinely non-constant
    }
    // Odometer step.
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++config[i] < state_count(vars[i])) break;
      config[i] = 0;
    }
    if (i == vars.size()) break;
  }
  return value;
}

bool Label::structurally_equal(const Label& other) const {
  if (rep_ == other.rep_) return true;
  if (op() != other.op()) return false;
  switch (op()) {
    case Op::True:
    case Op::False:
      return true;
    case Op::Atom:
      return atom_var() == other.atom_var() &&
             atom_state() == other.atom_state();
    case Op::Not:
      return lhs().structurally_equal(other.lhs());
    default:
      return lhs().structurally_equal(other.lhs()) &&
             rhs().structurally_equal(other.rhs());
  }
}

namespace {

// Higher binds tighter: ! > & > | > => > <=>.
int precedence(Label::Op op) {
  switch (op) {
    case Label::Op::Iff:
      return 1;
    case Label::Op::Implies:
      return 2;
    case Label::Op::Or:
      return 3;
    case Label::Op::And:
      return 4;
    case Label::Op::Not:
      return 5;
    default:
      return 6;
  }
}

// Prints `l`, parenthesizing whenever its precedence falls below the minimum
// the context requires.
void print(const Label& l, int min_prec,
           const std::function<std::string(VariableIndex)>& var_name,
           const std::function<std::string(VariableIndex, StateIndex)>& state_name,
           std::ostringstream& out) {
  int prec = precedence(l.op());
  const char* sym = nullptr;
  switch (l.op()) {
    case Label::Op::True:
      out << "true";
      return;
    case Label::Op::False:
      out << "false";
      return;
    case Label::Op::Atom:
      out << var_name(l.atom_var()) << "="
          << state_name(l.atom_var(), l.atom_state());
      return;
    case Label::Op::Not:
      if (prec < min_prec) {
        out << "(!";
        print(l.lhs(), prec, var_name, state_name, out);
        out << ")";
      } else {
        out << "!";
        print(l.lhs(), prec, var_name, state_name, out);
      }
      return;
    case Label::Op::And:
      sym = " & ";
      break;
    case Label::Op::Or:
      sym = " | ";
      break;
    case Label::Op::Implies:
      sym = " => ";
      break;
    case Label::Op::Iff:
      sym = " <=> ";
      break;
  }
  // & and | are left-associative, => and <=> right-associative.
  bool rassoc = l.op() == Label::Op::Implies || l.op() == Label::Op::Iff;
  bool need_paren = prec < min_prec;
  if (need_paren) out << "(";
  print(l.lhs(), rassoc ? prec + 1 : prec, var_name, state_name, out);
  out << sym;
  print(l.rhs(), rassoc ? prec : prec + 1, var_name, state_name, out);
  if (need_paren) out << ")";
}

}  // namespace

std::string Label::to_string(
    const std::function<std::string(VariableIndex)>& var_name,
    const std::function<std::string(VariableIndex, StateIndex)>& state_name)
    const {
  std::ostringstream out;
  print(*this, 0, var_name, state_name, out);
  return out.str();
}

}  // namespace aid
