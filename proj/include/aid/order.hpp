#ifndef AID_ORDER_HPP
#define AID_ORDER_HPP

#include <optional>
#include <vector>

#include "aid/model.hpp"

namespace aid {

// Information-precedence order over the present chance and decision
// variables. Computed tolerantly: directed cycles (legal in an AID until the
// reductions break them) show up as contradiction witnesses instead of
// aborting the computation, because minimality queries stay meaningful for
// variables outside the cyclic region.
class PartialOrder {
 public:
  PartialOrder() = default;
  explicit PartialOrder(std::size_t n) : n_(n), lt_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool precedes(VariableIndex a, VariableIndex b) const {
    return lt_[a * n_ + b] != 0;
  }
  bool incomparable(VariableIndex a, VariableIndex b) const {
    return a != b && !precedes(a, b) && !precedes(b, a);
  }

  void add(VariableIndex a, VariableIndex b) { lt_[a * n_ + b] = 1; }
  void close();  // transitive closure

  // First variable with v ≺ v, if any.
  std::optional<VariableIndex> contradiction() const;

 private:
  std::size_t n_ = 0;
  std::vector<char> lt_;
};

// The four information-precedence rules closed transitively, then refined so
// that split variables (restrictive variables included) precede previously
// incomparable non-split variables.
PartialOrder induce_order(const Model& m);

// Same relation without the split refinement (the plain PID order).
PartialOrder induce_pid_order(const Model& m);

}  // namespace aid

#endif  // AID_ORDER_HPP
