#ifndef AID_IO_HPP
#define AID_IO_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aid/model.hpp"
#include "aid/solver.hpp"

namespace aid {

struct SourceSpan {
  int line = 0;  // 1-based; 0 when no location applies
  int column = 0;
};

struct SpanDiagnostic {
  Code code;
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;

  std::string to_string(const std::string& filename) const;
};

struct ParseResult {
  std::optional<Model> model;
  std::vector<SpanDiagnostic> diagnostics;
  bool ok() const { return model.has_value(); }
};

// Parses the textual model format (see README). Collects every diagnostic it
// can attribute; identical input yields identical diagnostic lists.
ParseResult parse(std::string_view text);

// Canonical form: declarations in declaration order, labels re-emitted with
// minimal parentheses, `_` for undefined cells. parse(serialize(m)) is
// structurally equal to m.
std::string serialize(const Model& m);

// The solve result as JSON (schema in README); deterministic key and row
// ordering.
std::string solve_result_json(const Model& m, const SolveResult& r);

}  // namespace aid

#endif  // AID_IO_HPP
