#include "aid/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aid/io.hpp"
#include "aid/oracle.hpp"
#include "aid/solver.hpp"
#include "aid/structure.hpp"

namespace aid {

namespace {

std::optional<std::string> read_file(const std::string& path,
                                     std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << path << ": cannot open file\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<Model> load(const std::string& path, std::ostream& err,
                          bool print_warnings = true) {
  auto text = read_file(path, err);
  if (!text) return std::nullopt;
  ParseResult parsed = parse(*text);
  for (const auto& d : parsed.diagnostics) {
    if (d.severity == Severity::Error || print_warnings) {
      err << d.to_string(path) << "\n";
    }
  }
  return std::move(parsed.model);
}

std::string step_name(const Model& m, const SplitStep& s) {
  return m.node(s.var).name + "=" + m.node(s.var).states[s.state];
}

void print_tree(std::ostream& out, const Model& original,
                const SplitTreeNode& node, int depth) {
  if (!node.split) {
    if (node.prefix.empty()) out << "(empty) [exhaustive]\n";
    return;
  }
  for (const auto& [state, child] : node.children) {
    (void)state;
    for (int i = 0; i < depth; ++i) out << "  ";
    out << step_name(original, child->prefix.back());
    if (node.split->restrictive) out << " (restrictive)";
    if (child->exhaustive) out << " [exhaustive]";
    out << "\n";
    print_tree(out, original, *child, depth + 1);
  }
}

std::string context_text(const Model& m, const Context& ctx) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < ctx.split_part.size(); ++i) {
    if (i) out << ", ";
    out << step_name(m, ctx.split_part[i]);
  }
  out << ")";
  if (!ctx.restrictive_part.empty()) {
    out << " | ";
    bool first = true;
    for (const auto& [v, s] : ctx.restrictive_part.entries()) {
      if (!first) out << ", ";
      first = false;
      out << m.node(v).name << "=" << m.node(v).states[s];
    }
  }
  return out.str();
}

int cmd_validate(const std::string& path, std::ostream& out,
                 std::ostream& err) {
  auto text = read_file(path, err);
  if (!text) return 1;
  ParseResult parsed = parse(*text);
  bool errors = false;
  for (const auto& d : parsed.diagnostics) {
    err << d.to_string(path) << "\n";
    if (d.severity == Severity::Error) errors = true;
  }
  if (!parsed.model) return 1;
  const Model& m = *parsed.model;

  try {
    auto cycle_diags = validate_cycles(m);
    for (const auto& d : cycle_diags) {
      err << path << ": " << d.to_string() << "\n";
      if (d.severity == Severity::Error) errors = true;
    }
    auto wd = well_definedness(m);
    switch (wd.verdict) {
      case WellDefinedness::Verdict::WellDefined:
        out << "well-definedness: WellDefined\n";
        break;
      case WellDefinedness::Verdict::PossiblyIllDefined:
        out << "well-definedness: PossiblyIllDefined";
        for (const auto& [a, d] : wd.witnesses) {
          out << " (" << m.node(a).name << ", " << m.node(d).name << ")";
        }
        out << "\n";
        break;
      case WellDefinedness::Verdict::IllDefinedRestrictives:
        err << path << ": error [IllDefined] " << wd.detail << "\n";
        errors = true;
        break;
    }
  } catch (const Error& e) {
    err << path << ": error [" << code_name(e.code()) << "] " << e.what()
        << "\n";
    errors = true;
  }
  if (!errors) out << "ok\n";
  return errors ? 1 : 0;
}

int cmd_reduce(const std::string& path,
               const std::vector<std::string>& assignments, std::ostream& out,
               std::ostream& err) {
  auto model = load(path, err);
  if (!model) return 1;
  Model m = std::move(*model);
  for (const auto& text : assignments) {
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      err << "--assign expects Var=state, got '" << text << "'\n";
      return 2;
    }
    std::string var = text.substr(0, eq);
    std::string state = text.substr(eq + 1);
    auto v = m.find(var);
    if (!v) {
      err << "unknown variable '" << var << "'\n";
      return 1;
    }
    auto s = m.find_state(*v, state);
    if (!s) {
      err << "'" << state << "' is not a state of " << var << "\n";
      return 1;
    }
    try {
      m = reduce(m, *v, *s);
    } catch (const Error& e) {
      err << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
      return 1;
    }
  }
  out << serialize(m);
  return 0;
}

int cmd_contexts(const std::string& path, const std::string& decision,
                 std::ostream& out, std::ostream& err) {
  auto model = load(path, err);
  if (!model) return 1;
  auto d = model->find(decision);
  if (!d) {
    err << "unknown variable '" << decision << "'\n";
    return 1;
  }
  try {
    for (const auto& ctx : contexts(*model, *d)) {
      out << context_text(*model, ctx) << "\n";
    }
  } catch (const Error& e) {
    err << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_splits(const std::string& path, std::ostream& out, std::ostream& err) {
  auto model = load(path, err);
  if (!model) return 1;
  try {
    auto tree = enumerate_split_configurations(*model);
    print_tree(out, *model, *tree, 0);
  } catch (const Error& e) {
    err << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cmd_solve(const std::string& path, bool oracle_check, bool json,
              bool force, std::ostream& out, std::ostream& err) {
  auto model = load(path, err, !json);
  if (!model) return 1;
  SolveOptions options;
  options.force = force;
  SolveResult result;
  try {
    result = solve(*model, options);
  } catch (const Error& e) {
    err << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
    return 1;
  }
  if (json) {
    out << solve_result_json(*model, result);
  } else {
    out << "meu: " << result.meu << "\n";
    for (const auto& df : result.strategy) {
      out << model->node(df.decision).name << " @ "
          << context_text(*model, df.context);
      if (!df.reachable) out << " [unreachable]";
      out << ":\n";
      std::vector<StateIndex> config(df.domain.size(), 0);
      for (;;) {
        std::size_t flat = df.flat_index(config);
        if (df.choice[flat] != kNoState) {
          out << " ";
          if (df.domain.empty()) {
            out << " choose " << model->node(df.decision).states[df.choice[flat]];
          } else {
            out << " ";
            for (std::size_t i = 0; i < df.domain.size(); ++i) {
              if (i) out << ", ";
              out << model->node(df.domain[i]).name << "="
                  << model->node(df.domain[i]).states[config[i]];
            }
            out << " -> " << model->node(df.decision).states[df.choice[flat]];
          }
          out << "\n";
        }
        std::size_t i = config.size();
        for (; i-- > 0;) {
          if (++config[i] < df.cardinalities[i]) break;
          config[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
    }
    for (const auto& w : result.warnings) out << "warning: " << w << "\n";
  }
  if (oracle_check) {
    try {
      auto tree = unfold(*model);
      double oracle_meu = rollback(*tree);
      double delta = std::abs(oracle_meu - result.meu);
      if (delta < 1e-9) {
        out << "oracle agreement: meu Δ < 1e-9\n";
      } else {
        err << "oracle mismatch: solver " << result.meu << " vs oracle "
            << oracle_meu << "\n";
        return 1;
      }
    } catch (const Error& e) {
      err << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}

int cmd_oracle(const std::string& path, std::ostream& out, std::ostream& err) {
  auto model = load(path, err);
  if (!model) return 1;
  try {
    auto tree = unfold(*model);
    double meu = rollback(*tree);
    std::size_t scenarios = scenario_count(*tree);
    std::size_t cartesian = 1;
    for (VariableIndex v = 0; v < model->node_count(); ++v) {
      if (!model->is_value(v)) cartesian *= model->state_count(v);
    }
    out << "meu: " << meu << "\n";
    out << "scenarios: " << scenarios << "\n";
    out << "cartesian product: " << cartesian << "\n";
  } catch (const Error& e) {
    err << "error [" << code_name(e.code()) << "] " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"asymmetric influence diagram toolkit"};
  app.require_subcommand(1);

  std::string file;
  std::vector<std::string> assignments;
  std::string decision;
  bool oracle_check = false;
  bool json = false;
  bool force = false;
  std::uint64_t seed = 0;

  auto* validate = app.add_subcommand("validate", "check a model file");
  validate->add_option("file", file)->required();

  auto* reduce_cmd = app.add_subcommand("reduce", "instantiate split variables");
  reduce_cmd->add_option("file", file)->required();
  reduce_cmd->add_option("--assign", assignments, "Var=state, applied in order");

  auto* contexts_cmd =
      app.add_subcommand("contexts", "list the contexts of a decision");
  contexts_cmd->add_option("file", file)->required();
  contexts_cmd->add_option("--decision", decision)->required();

  auto* splits =
      app.add_subcommand("splits", "print the split-configuration tree");
  splits->add_option("file", file)->required();

  auto* solve_cmd = app.add_subcommand("solve", "compute strategy and MEU");
  solve_cmd->add_option("file", file)->required();
  solve_cmd->add_flag("--oracle-check", oracle_check);
  solve_cmd->add_flag("--json", json);
  solve_cmd->add_flag("--force", force);
  solve_cmd->add_option("--seed", seed);

  auto* oracle_cmd =
      app.add_subcommand("oracle", "brute-force decision-tree rollback");
  oracle_cmd->add_option("file", file)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  if (validate->parsed()) return cmd_validate(file, out, err);
  if (reduce_cmd->parsed()) return cmd_reduce(file, assignments, out, err);
  if (contexts_cmd->parsed()) return cmd_contexts(file, decision, out, err);
  if (splits->parsed()) return cmd_splits(file, out, err);
  if (solve_cmd->parsed()) {
    return cmd_solve(file, oracle_check, json, force, out, err);
  }
  if (oracle_cmd->parsed()) return cmd_oracle(file, out, err);
  err << "no subcommand\n";
  return 2;
}

}  // namespace aid
