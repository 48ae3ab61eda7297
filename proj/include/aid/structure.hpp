#ifndef AID_STRUCTURE_HPP
#define AID_STRUCTURE_HPP

#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "aid/model.hpp"
#include "aid/order.hpp"

namespace aid {

// Variables with a directed path to x in the graph stripped of test and
// informational arcs; the source of inherited labels for chance and value
// nodes. Decisions inherit from the empty set but the graph reachability is
// reported for them too.
std::set<VariableIndex> dep(const Model& m, VariableIndex x);

// Own label conjoined with the labels of all dep members (chance and value
// nodes); decisions and arcs use their own label only.
Label effective_label(const Model& m, VariableIndex x);

// S_I: variables appearing in the domain of some attached label.
std::vector<VariableIndex> split_variables(const Model& m);
// S^R: S_I plus the restrictive variables.
std::vector<VariableIndex> extended_split_variables(const Model& m);

// The unique split variable preceding all others; nullopt when no split
// variables remain. Throws NoUniqueInitialSplit otherwise.
std::optional<VariableIndex> initial_split_variable(const Model& m);

// The next variable the decomposition instantiates: a minimal restrictive
// variable when one is applicable, else the initial split variable.
struct NextStep {
  VariableIndex var;
  bool restrictive;
};
std::optional<NextStep> next_split(const Model& m);

// Nodes and arcs rendered missing by instantiating the initial split
// variable, iterated to fixpoint.
struct MissingSet {
  std::vector<VariableIndex> nodes;
  std::vector<Arc> arcs;
};
MissingSet missing_elements(const Model& m, VariableIndex s_var, StateIndex s);

// The reduction I[S ↦ s]: removes missing nodes and arcs, substitutes the
// assignment into every remaining label, slices tables and restrictive
// functions, and updates restricted state sets. Accepts the initial split
// variable or an applicable restrictive variable; throws NotInitialSplit /
// ImpossibleState otherwise.
Model reduce(const Model& m, VariableIndex v, StateIndex s);

// Reduction without the applicability check; callers that already followed
// next_split() use this directly.
Model reduce_unchecked(const Model& m, VariableIndex v, StateIndex s,
                       bool restrictive);

// Depth-first decomposition tree. Each path from the root is a split
// configuration; leaves flagged exhaustive have no split variables left.
struct SplitTreeNode {
  Model model;
  std::vector<SplitStep> prefix;
  std::optional<NextStep> split;
  std::vector<std::pair<StateIndex, std::unique_ptr<SplitTreeNode>>> children;
  bool exhaustive = false;
};
std::unique_ptr<SplitTreeNode> enumerate_split_configurations(const Model& m);

// A decision's information state: split part ω̄ plus restrictive part x̄.
struct Context {
  VariableIndex decision = kNoVariable;
  std::vector<SplitStep> split_part;
  Assignment restrictive_part;

  bool operator==(const Context& o) const;
};
std::vector<Context> contexts(const Model& m, VariableIndex d);

// Free set: present chance/decision variables succeeding the last
// instantiated split variable and preceding every remaining member of S^R.
std::vector<VariableIndex> free_variables(const Model& m);

// Every exhaustive reduction must be acyclic and fully resolved; returns a
// diagnostic per surviving cycle or unresolved label.
std::vector<Diagnostic> validate_cycles(const Model& m);

struct WellDefinedness {
  enum class Verdict : std::uint8_t {
    WellDefined,
    PossiblyIllDefined,
    IllDefinedRestrictives,
  };
  Verdict verdict = Verdict::WellDefined;
  // Incomparable (chance, decision) pairs escalated to the oracle's probe.
  std::vector<std::pair<VariableIndex, VariableIndex>> witnesses;
  std::string detail;
};

// Exact restrictive-clash check plus the conservative significance check
// over every reachable subproblem.
WellDefinedness well_definedness(const Model& m);

// Semantic label helpers (exhaustive enumeration fallback up to the given
// variable bound; larger domains count as unresolved).
bool label_semantically_false(const Model& m, const Label& l);
bool label_resolved(const Model& m, const Label& l);

}  // namespace aid

#endif  // AID_STRUCTURE_HPP
