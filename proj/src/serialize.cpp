#include <algorithm>
#include <charconv>
#include <sstream>

#include "aid/io.hpp"

namespace aid {

namespace {

const char* kReserved[] = {"format", "chance",  "decision", "testdecision",
                           "value",  "arc",     "kind",     "label",
                           "cpt",    "utility", "restrict", "given",
                           "true",   "false",   "_"};

bool needs_quotes(const std::string& name) {
  if (name.empty()) return true;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') {
    return true;
  }
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return true;
  }
  for (const char* r : kReserved) {
    if (name == r) return true;
  }
  return false;
}

std::string quoted(const std::string& name) {
  if (!needs_quotes(name)) return name;
  return "\"" + name + "\"";
}

std::string number(double v) {
  char buf[64];
  auto rc = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, rc.ptr);
}

std::string label_text(const Model& m, const Label& l) {
  return l.to_string(
      [&](VariableIndex v) { return quoted(m.node(v).name); },
      [&](VariableIndex v, StateIndex s) {
        return quoted(m.node(v).states[s]);
      });
}

}  // namespace

std::string serialize(const Model& m) {
  std::ostringstream out;
  out << "format 1\n";

  for (VariableIndex v = 0; v < m.node_count(); ++v) {
    if (!m.present(v)) continue;
    const Node& n = m.node(v);
    out << node_kind_name(n.kind) << " " << quoted(n.name);
    if (n.kind != NodeKind::Value) {
      out << " { ";
      for (std::size_t i = 0; i < n.states.size(); ++i) {
        if (i) out << ", ";
        out << quoted(n.states[i]);
      }
      out << " }";
    }
    if (!n.label.is_constant_true()) {
      out << " label " << label_text(m, n.label);
    }
    out << "\n";
    if (m.current_states(v).size() < n.states.size()) {
      out << "# options " << quoted(n.name) << ":";
      for (StateIndex s : m.current_states(v)) {
        out << " " << quoted(n.states[s]);
      }
      out << "\n";
    }
  }

  for (const auto& arc : m.arcs()) {
    if (!m.present(arc.src) || !m.present(arc.dst)) continue;
    out << "arc " << quoted(m.node(arc.src).name) << " -> "
        << quoted(m.node(arc.dst).name) << " kind " << arc_kind_name(arc.kind);
    if (!arc.label.is_constant_true()) {
      out << " label " << label_text(m, arc.label);
    }
    out << "\n";
  }

  for (const auto& [v, table] : m.probabilities()) {
    out << "cpt " << quoted(m.node(v).name);
    std::vector<VariableIndex> parents;
    for (VariableIndex p : table.domain()) {
      if (p != v) parents.push_back(p);
    }
    if (!parents.empty()) {
      out << " | ";
      for (std::size_t i = 0; i < parents.size(); ++i) {
        if (i) out << ", ";
        out << quoted(m.node(parents[i]).name);
      }
    }
    out << " { ";
    // Rows over the parent configurations in row-major order.
    std::vector<std::uint32_t> pcard;
    for (VariableIndex p : parents) {
      pcard.push_back(static_cast<std::uint32_t>(m.node(p).states.size()));
    }
    std::size_t rows = 1;
    for (auto c : pcard) rows *= c;
    std::vector<StateIndex> pconfig(parents.size(), 0);
    for (std::size_t row = 0; row < rows; ++row) {
      if (row) out << " ; ";
      if (!parents.empty()) {
        for (std::size_t i = 0; i < parents.size(); ++i) {
          if (i) out << ", ";
          out << quoted(m.node(parents[i]).states[pconfig[i]]);
        }
        out << " : ";
      }
      Assignment a;
      for (std::size_t i = 0; i < parents.size(); ++i) {
        a.set(parents[i], pconfig[i]);
      }
      for (StateIndex s = 0; s < m.node(v).states.size(); ++s) {
        if (s) out << ", ";
        Assignment cell = a;
        cell.set(v, s);
        std::vector<StateIndex> config;
        for (VariableIndex d : table.domain()) config.push_back(*cell.get(d));
        auto c = table.cell(config);
        out << (c ? number(*c) : "_");
      }
      for (std::size_t i = pconfig.size(); i-- > 0;) {
        if (++pconfig[i] < pcard[i]) break;
        pconfig[i] = 0;
      }
    }
    out << " }\n";
  }

  for (const auto& [v, table] : m.utilities()) {
    out << "utility " << quoted(m.node(v).name) << " { ";
    bool first = true;
    bool any = false;
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
      auto c = table.cell(flat);
      if (!c) continue;  // unlisted configurations default to undefined
      any = true;
      if (!first) out << " ; ";
      first = false;
      auto config = table.config_of(flat);
      if (!table.domain().empty()) {
        for (std::size_t i = 0; i < table.domain().size(); ++i) {
          if (i) out << ", ";
          out << quoted(m.node(table.domain()[i]).states[config[i]]);
        }
        out << " : ";
      }
      out << number(*c);
    }
    (void)any;
    out << " }\n";
  }

  for (const auto& rf : m.restrictives()) {
    out << "restrict " << quoted(m.node(rf.decision).name) << " given ";
    for (std::size_t i = 0; i < rf.domain.size(); ++i) {
      if (i) out << ", ";
      out << quoted(m.node(rf.domain[i]).name);
    }
    out << " { ";
    std::vector<StateIndex> config(rf.domain.size(), 0);
    for (std::size_t row = 0; row < rf.options.size(); ++row) {
      if (row) out << " ; ";
      for (std::size_t i = 0; i < rf.domain.size(); ++i) {
        if (i) out << ", ";
        out << quoted(m.node(rf.domain[i]).states[config[i]]);
      }
      out << " : { ";
      bool first = true;
      for (StateIndex s = 0; s < rf.options[row].size(); ++s) {
        if (!rf.options[row][s]) continue;
        if (!first) out << ", ";
        first = false;
        out << quoted(m.node(rf.decision).states[s]);
      }
      out << " }";
      for (std::size_t i = config.size(); i-- > 0;) {
        if (++config[i] < rf.cardinalities[i]) break;
        config[i] = 0;
      }
    }
    out << " }\n";
  }
  return out.str();
}

}  // namespace aid
