#include <json.hpp>

#include "aid/io.hpp"

namespace aid {

namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

std::string solve_result_json(const Model& m, const SolveResult& r) {
  ordered_json doc;
  doc["format"] = 1;
  doc["meu"] = r.meu;
  doc["strategies"] = ordered_json::array();

  // Stable order: by decision declaration index, then by context shape.
  std::vector<const DecisionFunction*> sorted;
  for (const auto& df : r.strategy) sorted.push_back(&df);
  std::sort(sorted.begin(), sorted.end(), [&](const auto* a, const auto* b) {
    if (a->decision != b->decision) return a->decision < b->decision;
    auto key = [&](const DecisionFunction* df) {
      std::string k;
      for (const auto& s : df->context.split_part) {
        k += std::to_string(s.var) + ":" + std::to_string(s.state) + ";";
      }
      k += "|";
      for (const auto& [v, s] : df->context.restrictive_part.entries()) {
        k += std::to_string(v) + ":" + std::to_string(s) + ";";
      }
      return k;
    };
    return key(a) < key(b);
  });

  for (const auto* df : sorted) {
    ordered_json entry;
    entry["decision"] = m.node(df->decision).name;
    ordered_json ctx = ordered_json::object();
    for (const auto& step : df->context.split_part) {
      ctx[m.node(step.var).name] = m.node(step.var).states[step.state];
    }
    for (const auto& [v, s] : df->context.restrictive_part.entries()) {
      ctx[m.node(v).name] = m.node(v).states[s];
    }
    entry["context"] = ctx;
    ordered_json function = ordered_json::array();
    std::vector<StateIndex> config(df->domain.size(), 0);
    for (;;) {
      std::size_t flat = df->flat_index(config);
      if (df->choice[flat] != kNoState) {
        ordered_json row;
        ordered_json observed = ordered_json::object();
        for (std::size_t i = 0; i < df->domain.size(); ++i) {
          observed[m.node(df->domain[i]).name] =
              m.node(df->domain[i]).states[config[i]];
        }
        row["observed"] = observed;
        row["choose"] = m.node(df->decision).states[df->choice[flat]];
        function.push_back(row);
      }
      std::size_t i = config.size();
      for (; i-- > 0;) {
        if (++config[i] < df->cardinalities[i]) break;
        config[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    entry["function"] = function;
    if (!df->reachable) entry["unreachable"] = true;
    doc["strategies"].push_back(entry);
  }

  doc["warnings"] = ordered_json::array();
  for (const auto& w : r.warnings) doc["warnings"].push_back(w);
  return doc.dump(2) + "\n";
}

}  // namespace aid
