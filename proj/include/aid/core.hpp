#ifndef AID_CORE_HPP
#define AID_CORE_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace aid {

// Variables are indexed by declaration order; that order is also the
// canonical axis order inside every potential.
using VariableIndex = std::uint32_t;
using StateIndex = std::uint32_t;

inline constexpr VariableIndex kNoVariable =
    std::numeric_limits<VariableIndex>::max();
inline constexpr StateIndex kNoState = std::numeric_limits<StateIndex>::max();

enum class NodeKind : std::uint8_t {
  Chance,
  ActionDecision,
  TestDecision,
  Value,
};

enum class ArcKind : std::uint8_t {
  Dependency,     // into a chance node
  Informational,  // into a decision node
  Restriction,    // informational arc flagged restrictive
  Test,           // out of a test-decision node
  Functional,     // into a value node
};

const char* node_kind_name(NodeKind k) noexcept;
const char* arc_kind_name(ArcKind k) noexcept;

enum class Severity : std::uint8_t { Error, Warning };

// Stable diagnostic / error codes. The string forms are part of the CLI
// output contract.
enum class Code : std::uint8_t {
  Syntax,
  EmptyModel,
  DuplicateDeclaration,
  UnknownReference,
  UnknownState,
  Arity,
  LabelWithoutArc,
  LabelOnNonInformationalArc,
  BadArcKind,
  NegativeUtility,
  BadProbability,
  CptRowSum,
  PartialRowUncovered,
  TestArcFromNonTest,
  ValueNodeWithSuccessor,
  BarrenNode,
  RestrictiveIncomplete,
  RestrictiveEmptyOptions,
  NotAChanceVariable,
  NotADecision,
  UnknownNode,
  IncompleteAssignment,
  KindMismatch,
  VariableNotInDomain,
  NotInitialSplit,
  ImpossibleState,
  NoUniqueInitialSplit,
  OrderContradiction,
  UnbrokenCycle,
  UnresolvedLeaf,
  IllDefined,
  InadmissibleOrder,
  TreeBudgetExceeded,
  Usage,
};

const char* code_name(Code c) noexcept;

struct Diagnostic {
  Code code;
  Severity severity = Severity::Error;
  std::string subject;  // offending element, by name
  std::string message;

  std::string to_string() const;
};

// Thrown for contract violations and unrecoverable requests (the CLI turns
// these into exit code 1 diagnostics).
class Error : public std::runtime_error {
 public:
  Error(Code code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace aid

#endif  // AID_CORE_HPP
