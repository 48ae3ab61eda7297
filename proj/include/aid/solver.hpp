#ifndef AID_SOLVER_HPP
#define AID_SOLVER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aid/model.hpp"
#include "aid/structure.hpp"

namespace aid {

// One decision function δ_D: per context, a map from configurations of the
// observed predecessors (the full pred(D) set under the context's reduction)
// to the chosen option.
struct DecisionFunction {
  VariableIndex decision = kNoVariable;
  Context context;
  std::vector<VariableIndex> domain;  // pred(D), canonically ordered
  std::vector<std::uint32_t> cardinalities;
  std::vector<StateIndex> choice;  // kNoState where never reached / ⊥
  bool reachable = true;

  std::size_t flat_index(const std::vector<StateIndex>& config) const;
};

// Decomposition trace for explain output and the conditioning tests.
struct TraceNode {
  std::vector<SplitStep> prefix;
  std::optional<NextStep> split;
  std::vector<PartialTable> merged;  // potentials after branch absorption
  std::vector<std::unique_ptr<TraceNode>> children;
};

struct SolveOptions {
  bool force = false;       // proceed on PossiblyIllDefined with a warning
  bool with_trace = false;
  enum class TieBreak : std::uint8_t { LowIndexFirst, HighIndexFirst };
  // Declaration-index tie-break among order-incomparable variables in the
  // per-subproblem elimination order.
  TieBreak tie_break = TieBreak::LowIndexFirst;
};

struct SolveResult {
  double meu = 0.0;
  std::vector<DecisionFunction> strategy;
  std::vector<std::string> warnings;
  std::unique_ptr<TraceNode> trace;

  const DecisionFunction* find(VariableIndex decision,
                               const Context& context) const;
};

// Evaluates the diagram by recursive decomposition over initial split
// variables, absorbing eliminated-subproblem potentials upward.
SolveResult solve(const Model& m, const SolveOptions& options = {});

struct EliminationOutcome {
  std::vector<PartialTable> probabilities;
  std::vector<PartialTable> utilities;
  std::vector<ArgmaxTable> argmaxes;
};

// Variable elimination over an explicit admissible order (a reverse linear
// extension of the model's induced order restricted to `variables`).
// Decisions are maximized under the model's current legal-state masks.
EliminationOutcome eliminate_in_order(const Model& m,
                                      std::vector<PartialTable> potentials,
                                      const std::vector<VariableIndex>& variables,
                                      const std::vector<VariableIndex>& order);

}  // namespace aid

#endif  // AID_SOLVER_HPP
