#ifndef AID_ORACLE_HPP
#define AID_ORACLE_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aid/model.hpp"
#include "aid/rng.hpp"
#include "aid/structure.hpp"

namespace aid {

// Explicit decision tree obtained by treating every chance and decision
// variable as a split point in an admissible order, with the reduction
// machinery applied at each step. The trusted brute-force reference.
struct TreeNode {
  enum class Kind : std::uint8_t { Chance, Decision, Terminal };

  struct Branch {
    StateIndex state;
    double prob = 0.0;  // chance branches
    bool legal = true;  // decision branches
    std::unique_ptr<TreeNode> child;
  };

  Kind kind = Kind::Terminal;
  VariableIndex var = kNoVariable;
  double utility = 0.0;  // terminals
  std::vector<Branch> branches;

  // Path bookkeeping for strategy extraction.
  Assignment path;
  std::vector<SplitStep> prefix;  // split/restrictive-tagged steps so far
  double path_prob = 1.0;
  bool reachable = true;

  // Filled by rollback.
  double value = 0.0;
  StateIndex chosen = kNoState;
  std::vector<double> option_value;  // per branch, on decision nodes
};

struct UnfoldOptions {
  std::size_t node_budget = 1000000;
  // Chooses among the minimal candidates of the current order; defaults to
  // the lowest declaration index.
  std::function<VariableIndex(const Model&, const std::vector<VariableIndex>&)>
      pick;
};

std::unique_ptr<TreeNode> unfold(const Model& m, const UnfoldOptions& = {});

// Average-out and fold-back; fills values and choices, returns the MEU.
double rollback(TreeNode& t);

std::size_t scenario_count(const TreeNode& t);

// Walks the rolled-back tree, reporting every decision point.
void visit_decisions(const TreeNode& t,
                     const std::function<void(const TreeNode&)>& f);

// A fresh fully defined random realization over the model's structure:
// uniform Dirichlet conditional rows, utilities uniform in [0, 10).
Model randomize_realization(const Model& m, Rng& rng);

struct ProbeResult {
  enum class Kind : std::uint8_t { NoEvidence, Significant };
  Kind kind = Kind::NoEvidence;
  int witness_trial = -1;
  std::string detail;
};

// Samples random realizations and compares optimal strategies for `decision`
// under two admissible orders that differ by placing `chance` immediately
// before or after it. Returns the first witness where prescriptions differ
// by more than tie-break ambiguity; absence of a witness proves nothing.
ProbeResult significance_probe(const Model& m, VariableIndex decision,
                               VariableIndex chance, int trials,
                               std::uint64_t seed);

}  // namespace aid

#endif  // AID_ORACLE_HPP
