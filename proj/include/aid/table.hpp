#ifndef AID_TABLE_HPP
#define AID_TABLE_HPP

#include <optional>
#include <vector>

#include "aid/core.hpp"
#include "aid/label.hpp"

namespace aid {

enum class TableKind : std::uint8_t { Probability, Utility };

// Dense multidimensional table over a canonically ordered variable domain
// whose cells are real values or the undefined value ⊥. ⊥ is an additive
// identity and a multiplicative zero, kept distinct from 0.0 through a
// parallel definedness mask.
class PartialTable {
 public:
  PartialTable() = default;
  PartialTable(TableKind kind, std::vector<VariableIndex> domain,
               std::vector<std::uint32_t> cardinalities);

  static PartialTable scalar(TableKind kind, double value);
  static PartialTable undefined_scalar(TableKind kind);

  TableKind kind() const { return kind_; }
  const std::vector<VariableIndex>& domain() const { return domain_; }
  const std::vector<std::uint32_t>& cardinalities() const { return card_; }
  std::size_t size() const { return value_.size(); }
  bool is_scalar() const { return domain_.empty(); }
  bool mentions(VariableIndex v) const;

  bool defined(std::size_t flat) const { return defined_[flat] != 0; }
  double value(std::size_t flat) const { return value_[flat]; }
  std::optional<double> cell(std::size_t flat) const;
  std::optional<double> cell(const std::vector<StateIndex>& config) const;

  void set(std::size_t flat, double v) {
    value_[flat] = v;
    defined_[flat] = 1;
  }
  void set_undefined(std::size_t flat) {
    value_[flat] = 0.0;
    defined_[flat] = 0;
  }
  void set(const std::vector<StateIndex>& config, double v);
  void set_undefined(const std::vector<StateIndex>& config);

  std::size_t flat_index(const std::vector<StateIndex>& config) const;
  std::vector<StateIndex> config_of(std::size_t flat) const;

 private:
  TableKind kind_ = TableKind::Probability;
  std::vector<VariableIndex> domain_;   // strictly increasing variable indices
  std::vector<std::uint32_t> card_;
  std::vector<double> value_;
  std::vector<char> defined_;
};

// Records the maximizing option of an eliminated decision per surviving
// configuration; ⊥ where every option was masked or undefined.
struct ArgmaxTable {
  VariableIndex decision = kNoVariable;
  std::vector<VariableIndex> domain;
  std::vector<std::uint32_t> cardinalities;
  std::vector<StateIndex> choice;  // kNoState encodes ⊥
  std::size_t flat_index(const std::vector<StateIndex>& config) const;
};

// Cellwise product; domains unify by union. ⊥ · v = ⊥.
PartialTable multiply(const PartialTable& a, const PartialTable& b);

// Cellwise sum of utilities; ⊥ + v = v. Throws KindMismatch unless both
// operands are utilities.
PartialTable add(const PartialTable& a, const PartialTable& b);

// Sum-marginalization of a chance variable; all-⊥ groups stay ⊥.
PartialTable sum_out(const PartialTable& t, VariableIndex v);

// Max-marginalization of a decision variable over the legal option mask.
// Ties break toward the lowest state index.
std::pair<PartialTable, ArgmaxTable> max_out(const PartialTable& t,
                                             VariableIndex v,
                                             const std::vector<char>& legal);

// Slice at a (partial) assignment; assigned variables leave the domain.
PartialTable instantiate(const PartialTable& t, const Assignment& a);

// Builds a table over domain(branches) ∪ {v} whose slice at v=s is the
// branch-s table. Cells of configurations absent from a branch's domain pad
// with ⊥ for utilities and 1.0 for probabilities (an empty product).
PartialTable extend_with(TableKind kind, VariableIndex v,
                         std::uint32_t cardinality,
                         const std::vector<std::pair<StateIndex, PartialTable>>&
                             branches);

// Cellwise quotient used to keep utility entries conditional after a
// marginalization: cells with zero or undefined mass become ⊥.
PartialTable divide_mass(const PartialTable& num, const PartialTable& den);

// Structural comparison: same kind, domain, definedness pattern, and values
// within `tol` (⊥ matches only ⊥).
bool approx_equal(const PartialTable& a, const PartialTable& b, double tol);

}  // namespace aid

#endif  // AID_TABLE_HPP
