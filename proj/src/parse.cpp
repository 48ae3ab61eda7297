#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "aid/io.hpp"

namespace aid {

std::string SpanDiagnostic::to_string(const std::string& filename) const {
  std::ostringstream out;
  out << filename;
  if (span.line > 0) out << ":" << span.line << ":" << span.column;
  out << ": " << (severity == Severity::Error ? "error" : "warning") << " ["
      << code_name(code) << "] " << message;
  return out.str();
}

namespace {

enum class Tok : std::uint8_t {
  End,
  Ident,   // bare or quoted
  Number,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Semicolon,
  Colon,
  Pipe,
  Arrow,
  Equals,
  Bang,
  Amp,
  Implies,
  Iff,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run(std::vector<SpanDiagnostic>& diags) {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      SourceSpan span{line_, col_};
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      if (c == '"') {
        advance();
        std::string s;
        bool closed = false;
        while (pos_ < text_.size()) {
          char d = text_[pos_];
          if (d == '"') {
            advance();
            closed = true;
            break;
          }
          if (d == '\n') break;
          s.push_back(d);
          advance();
        }
        if (!closed) {
          diags.push_back({Code::Syntax, Severity::Error, span,
                           "unterminated quoted identifier"});
        }
        out.push_back({Tok::Ident, s, 0.0, span});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string s;
        while (pos_ < text_.size()) {
          char d = text_[pos_];
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
            s.push_back(d);
            advance();
          } else {
            break;
          }
        }
        out.push_back({Tok::Ident, s, 0.0, span});
        continue;
      }
      // Multi-character punctuation comes before numbers so that '->' is
      // not read as a sign.
      {
        auto two = text_.substr(pos_, 2);
        auto three = text_.substr(pos_, 3);
        if (three == "<=>") {
          out.push_back({Tok::Iff, "<=>", 0.0, span});
          advance();
          advance();
          advance();
          continue;
        }
        if (two == "=>") {
          out.push_back({Tok::Implies, "=>", 0.0, span});
          advance();
          advance();
          continue;
        }
        if (two == "->") {
          out.push_back({Tok::Arrow, "->", 0.0, span});
          advance();
          advance();
          continue;
        }
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
          c == '+' || c == '.') {
        std::size_t start = pos_;
        if (c == '-' || c == '+') advance();
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '.')) {
          advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
          advance();
          if (pos_ < text_.size() &&
              (text_[pos_] == '-' || text_[pos_] == '+')) {
            advance();
          }
          while (pos_ < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            advance();
          }
        }
        std::string_view repr = text_.substr(start, pos_ - start);
        double value = 0.0;
        auto rc = std::from_chars(repr.data(), repr.data() + repr.size(), value);
        if (rc.ec != std::errc{} || rc.ptr != repr.data() + repr.size()) {
          diags.push_back({Code::Syntax, Severity::Error, span,
                           "malformed number '" + std::string(repr) + "'"});
        }
        out.push_back({Tok::Number, std::string(repr), value, span});
        continue;
      }
      // Single-character punctuation.
      Tok kind;
      switch (c) {
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case ',': kind = Tok::Comma; break;
        case ';': kind = Tok::Semicolon; break;
        case ':': kind = Tok::Colon; break;
        case '|': kind = Tok::Pipe; break;
        case '=': kind = Tok::Equals; break;
        case '!': kind = Tok::Bang; break;
        case '&': kind = Tok::Amp; break;
        default:
          diags.push_back({Code::Syntax, Severity::Error, span,
                           std::string("unexpected character '") + c + "'"});
          advance();
          continue;
      }
      out.push_back({kind, std::string(1, c), 0.0, span});
      advance();
    }
    out.push_back({Tok::End, "", 0.0, {line_, col_}});
    return out;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      advance();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// --------------------------------------------------------------------------
// Untyped parse tree; resolution happens once all declarations are known.

struct PExpr {
  enum class Kind : std::uint8_t { Const, Atom, Not, And, Or, Implies, Iff };
  Kind kind = Kind::Const;
  bool value = true;
  std::string var, state;
  SourceSpan span;
  std::unique_ptr<PExpr> lhs, rhs;
};

struct PCell {
  std::optional<double> value;  // nullopt encodes ⊥
  SourceSpan span;
};

struct PRow {
  std::vector<std::string> config;
  std::vector<PCell> values;
  SourceSpan span;
};

struct PNodeDecl {
  NodeKind kind;
  std::string name;
  std::vector<std::string> states;
  std::unique_ptr<PExpr> label;
  SourceSpan span;
};

struct PArcDecl {
  std::string src, dst, kind;
  std::unique_ptr<PExpr> label;
  SourceSpan span;
};

struct PTableDecl {
  bool probability;
  std::string var;
  std::vector<std::string> parents;  // cpt only
  std::vector<PRow> rows;
  SourceSpan span;
};

struct PRestrictRow {
  std::vector<std::string> config;
  std::vector<std::string> options;
  SourceSpan span;
};

struct PRestrictDecl {
  std::string decision;
  std::vector<std::string> given;
  std::vector<PRestrictRow> rows;
  SourceSpan span;
};

struct ParseTree {
  std::vector<PNodeDecl> nodes;
  std::vector<PArcDecl> arcs;
  std::vector<PTableDecl> tables;
  std::vector<PRestrictDecl> restricts;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<SpanDiagnostic>& diags)
      : tokens_(std::move(tokens)), diags_(diags) {}

  std::optional<ParseTree> run() {
    if (!expect_keyword("format", "the file starts with 'format 1'")) {
      return std::nullopt;
    }
    if (peek().kind != Tok::Number || peek().number != 1.0) {
      error(peek().span, "unsupported format version");
      return std::nullopt;
    }
    next();
    ParseTree tree;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind != Tok::Ident) {
        error(t.span, "expected a declaration");
        return std::nullopt;
      }
      if (t.text == "chance" || t.text == "decision" ||
          t.text == "testdecision" || t.text == "value") {
        if (!parse_node(tree)) return std::nullopt;
      } else if (t.text == "arc") {
        if (!parse_arc(tree)) return std::nullopt;
      } else if (t.text == "cpt" || t.text == "utility") {
        if (!parse_table(tree)) return std::nullopt;
      } else if (t.text == "restrict") {
        if (!parse_restrict(tree)) return std::nullopt;
      } else {
        error(t.span, "unknown declaration '" + t.text + "'");
        return std::nullopt;
      }
    }
    return tree;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  void error(SourceSpan span, const std::string& message) {
    diags_.push_back({Code::Syntax, Severity::Error, span, message});
  }
  bool expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      error(peek().span, std::string("expected ") + what);
      return false;
    }
    next();
    return true;
  }
  bool expect_keyword(const std::string& kw, const char* what) {
    if (peek().kind != Tok::Ident || peek().text != kw) {
      error(peek().span, std::string("expected ") + what);
      return false;
    }
    next();
    return true;
  }
  std::optional<std::string> expect_name(const char* what) {
    if (peek().kind != Tok::Ident) {
      error(peek().span, std::string("expected ") + what);
      return std::nullopt;
    }
    return next().text;
  }

  bool parse_name_list(std::vector<std::string>& out, Tok terminator) {
    while (peek().kind == Tok::Ident) {
      out.push_back(next().text);
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
    if (peek().kind != terminator) {
      error(peek().span, "expected a name list");
      return false;
    }
    return true;
  }

  bool parse_node(ParseTree& tree) {
    PNodeDecl decl;
    decl.span = peek().span;
    std::string kw = next().text;
    decl.kind = kw == "chance"         ? NodeKind::Chance
                : kw == "decision"     ? NodeKind::ActionDecision
                : kw == "testdecision" ? NodeKind::TestDecision
                                       : NodeKind::Value;
    auto name = expect_name("a variable name");
    if (!name) return false;
    decl.name = *name;
    if (decl.kind != NodeKind::Value) {
      if (!expect(Tok::LBrace, "'{'")) return false;
      if (!parse_name_list(decl.states, Tok::RBrace)) return false;
      next();  // consume '}'
    }
    if (peek().kind == Tok::Ident && peek().text == "label") {
      next();
      decl.label = parse_expr();
      if (!decl.label) return false;
    }
    tree.nodes.push_back(std::move(decl));
    return true;
  }

  bool parse_arc(ParseTree& tree) {
    PArcDecl decl;
    decl.span = peek().span;
    next();  // 'arc'
    auto src = expect_name("a source variable");
    if (!src) return false;
    decl.src = *src;
    if (!expect(Tok::Arrow, "'->'")) return false;
    auto dst = expect_name("a target variable");
    if (!dst) return false;
    decl.dst = *dst;
    if (!expect_keyword("kind", "'kind'")) return false;
    auto kind = expect_name("an arc kind");
    if (!kind) return false;
    decl.kind = *kind;
    if (peek().kind == Tok::Ident && peek().text == "label") {
      next();
      decl.label = parse_expr();
      if (!decl.label) return false;
    }
    tree.arcs.push_back(std::move(decl));
    return true;
  }

  bool parse_table(ParseTree& tree) {
    PTableDecl decl;
    decl.span = peek().span;
    decl.probability = next().text == "cpt";
    auto var = expect_name("a variable name");
    if (!var) return false;
    decl.var = *var;
    if (decl.probability && peek().kind == Tok::Pipe) {
      next();
      while (peek().kind == Tok::Ident) {
        decl.parents.push_back(next().text);
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    if (!expect(Tok::LBrace, "'{'")) return false;
    while (peek().kind != Tok::RBrace && peek().kind != Tok::End) {
      PRow row;
      row.span = peek().span;
      // A row is `config : values` or bare `values` (empty config).
      bool has_config = false;
      {
        // Look ahead for a ':' before the next ';' or '}'.
        std::size_t i = pos_;
        while (i < tokens_.size() && tokens_[i].kind != Tok::Semicolon &&
               tokens_[i].kind != Tok::RBrace && tokens_[i].kind != Tok::End) {
          if (tokens_[i].kind == Tok::Colon) {
            has_config = true;
            break;
          }
          ++i;
        }
      }
      if (has_config) {
        while (peek().kind == Tok::Ident) {
          row.config.push_back(next().text);
          if (peek().kind == Tok::Comma) {
            next();
            continue;
          }
          break;
        }
        if (!expect(Tok::Colon, "':'")) return false;
      }
      for (;;) {
        PCell cell;
        cell.span = peek().span;
        if (peek().kind == Tok::Number) {
          cell.value = next().number;
        } else if (peek().kind == Tok::Ident && peek().text == "_") {
          next();
        } else {
          error(peek().span, "expected a number or '_'");
          return false;
        }
        row.values.push_back(cell);
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
      decl.rows.push_back(std::move(row));
      if (peek().kind == Tok::Semicolon) {
        next();
        continue;
      }
      break;
    }
    if (!expect(Tok::RBrace, "'}'")) return false;
    tree.tables.push_back(std::move(decl));
    return true;
  }

  bool parse_restrict(ParseTree& tree) {
    PRestrictDecl decl;
    decl.span = peek().span;
    next();  // 'restrict'
    auto dec = expect_name("a decision name");
    if (!dec) return false;
    decl.decision = *dec;
    if (!expect_keyword("given", "'given'")) return false;
    while (peek().kind == Tok::Ident && peek().text != "label") {
      decl.given.push_back(next().text);
      if (peek().kind == Tok::Comma) {
        next();
        continue;
      }
      break;
    }
    if (!expect(Tok::LBrace, "'{'")) return false;
    while (peek().kind != Tok::RBrace && peek().kind != Tok::End) {
      PRestrictRow row;
      row.span = peek().span;
      while (peek().kind == Tok::Ident) {
        row.config.push_back(next().text);
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
      if (!expect(Tok::Colon, "':'")) return false;
      if (!expect(Tok::LBrace, "'{'")) return false;
      if (!parse_name_list(row.options, Tok::RBrace)) return false;
      next();  // '}'
      decl.rows.push_back(std::move(row));
      if (peek().kind == Tok::Semicolon) {
        next();
        continue;
      }
      break;
    }
    if (!expect(Tok::RBrace, "'}'")) return false;
    tree.restricts.push_back(std::move(decl));
    return true;
  }

  // Label grammar: precedence ! > & > | > => > <=>; =>, <=> right-assoc.
  std::unique_ptr<PExpr> parse_expr() { return parse_iff(); }

  std::unique_ptr<PExpr> parse_iff() {
    auto lhs = parse_implies();
    if (!lhs) return nullptr;
    if (peek().kind == Tok::Iff) {
      SourceSpan span = next().span;
      auto rhs = parse_iff();
      if (!rhs) return nullptr;
      auto e = std::make_unique<PExpr>();
      e->kind = PExpr::Kind::Iff;
      e->span = span;
      e->lhs = std::move(lhs);
      e->rhs = std::move(rhs);
      return e;
    }
    return lhs;
  }

  std::unique_ptr<PExpr> parse_implies() {
    auto lhs = parse_or();
    if (!lhs) return nullptr;
    if (peek().kind == Tok::Implies) {
      SourceSpan span = next().span;
      auto rhs = parse_implies();
      if (!rhs) return nullptr;
      auto e = std::make_unique<PExpr>();
      e->kind = PExpr::Kind::Implies;
      e->span = span;
      e->lhs = std::move(lhs);
      e->rhs = std::move(rhs);
      return e;
    }
    return lhs;
  }

  std::unique_ptr<PExpr> parse_or() {
    auto lhs = parse_and();
    if (!lhs) return nullptr;
    while (peek().kind == Tok::Pipe) {
      SourceSpan span = next().span;
      auto rhs = parse_and();
      if (!rhs) return nullptr;
      auto e = std::make_unique<PExpr>();
      e->kind = PExpr::Kind::Or;
      e->span = span;
      e->lhs = std::move(lhs);
      e->rhs = std::move(rhs);
      lhs = std::move(e);
    }
    return lhs;
  }

  std::unique_ptr<PExpr> parse_and() {
    auto lhs = parse_unary();
    if (!lhs) return nullptr;
    while (peek().kind == Tok::Amp) {
      SourceSpan span = next().span;
      auto rhs = parse_unary();
      if (!rhs) return nullptr;
      auto e = std::make_unique<PExpr>();
      e->kind = PExpr::Kind::And;
      e->span = span;
      e->lhs = std::move(lhs);
      e->rhs = std::move(rhs);
      lhs = std::move(e);
    }
    return lhs;
  }

  std::unique_ptr<PExpr> parse_unary() {
    if (peek().kind == Tok::Bang) {
      SourceSpan span = next().span;
      auto child = parse_unary();
      if (!child) return nullptr;
      auto e = std::make_unique<PExpr>();
      e->kind = PExpr::Kind::Not;
      e->span = span;
      e->lhs = std::move(child);
      return e;
    }
    return parse_primary();
  }

  std::unique_ptr<PExpr> parse_primary() {
    if (peek().kind == Tok::LParen) {
      next();
      auto inner = parse_expr();
      if (!inner) return nullptr;
      if (!expect(Tok::RParen, "')'")) return nullptr;
      return inner;
    }
    if (peek().kind != Tok::Ident) {
      error(peek().span, "expected an atom, 'true', 'false' or '('");
      return nullptr;
    }
    Token t = next();
    auto e = std::make_unique<PExpr>();
    e->span = t.span;
    if (t.text == "true" || t.text == "false") {
      e->kind = PExpr::Kind::Const;
      e->value = t.text == "true";
      return e;
    }
    e->kind = PExpr::Kind::Atom;
    e->var = t.text;
    if (!expect(Tok::Equals, "'=' after the variable of an atom")) {
      return nullptr;
    }
    auto state = expect_name("a state name");
    if (!state) return nullptr;
    e->state = *state;
    return e;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<SpanDiagnostic>& diags_;
};

// --------------------------------------------------------------------------
// Resolution into a validated model.

class Resolver {
 public:
  Resolver(const ParseTree& tree, std::vector<SpanDiagnostic>& diags)
      : tree_(tree), diags_(diags) {}

  std::optional<Model> run() {
    for (const auto& decl : tree_.nodes) {
      if (names_.count(decl.name)) {
        error(decl.span, Code::DuplicateDeclaration,
              "variable '" + decl.name + "' declared more than once");
      } else {
        names_[decl.name] = static_cast<VariableIndex>(index_.size());
        index_.push_back(&decl);
        spans_[decl.name] = decl.span;
      }
    }
    if (index_.empty()) {
      error({1, 1}, Code::EmptyModel, "no variables declared");
      return std::nullopt;
    }

    ModelBuilder builder;
    for (const auto* decl : index_) {
      Label label;
      if (decl->label) label = resolve_expr(*decl->label);
      builder.add_node(decl->name, decl->kind, decl->states, label);
    }
    for (const auto& arc : tree_.arcs) {
      auto src = lookup(arc.src, arc.span);
      auto dst = lookup(arc.dst, arc.span);
      std::optional<ArcKind> kind;
      if (arc.kind == "dependency") kind = ArcKind::Dependency;
      else if (arc.kind == "informational") kind = ArcKind::Informational;
      else if (arc.kind == "restriction") kind = ArcKind::Restriction;
      else if (arc.kind == "test") kind = ArcKind::Test;
      else if (arc.kind == "functional") kind = ArcKind::Functional;
      else error(arc.span, Code::BadArcKind, "unknown arc kind '" + arc.kind + "'");
      if (!src || !dst || !kind) continue;
      Label label;
      if (arc.label) label = resolve_expr(*arc.label);
      builder.add_arc(*src, *dst, *kind, label);
    }
    for (const auto& table : tree_.tables) {
      resolve_table(table, builder);
    }
    for (const auto& restrict_decl : tree_.restricts) {
      resolve_restrict(restrict_decl, builder);
    }
    if (failed_) return std::nullopt;

    BuildResult built = builder.build();
    for (const auto& d : built.diagnostics) {
      SourceSpan span{0, 0};
      auto it = spans_.find(d.subject);
      if (it != spans_.end()) span = it->second;
      diags_.push_back({d.code, d.severity, span,
                        d.subject.empty() ? d.message
                                          : d.subject + ": " + d.message});
    }
    if (!built.ok()) return std::nullopt;
    return std::move(built.model);
  }

 private:
  void error(SourceSpan span, Code code, const std::string& message) {
    diags_.push_back({code, Severity::Error, span, message});
    failed_ = true;
  }

  std::optional<VariableIndex> lookup(const std::string& name,
                                      SourceSpan span) {
    auto it = names_.find(name);
    if (it == names_.end()) {
      error(span, Code::UnknownReference, "unknown variable '" + name + "'");
      return std::nullopt;
    }
    return it->second;
  }

  std::optional<StateIndex> lookup_state(VariableIndex v,
                                         const std::string& state,
                                         SourceSpan span) {
    const auto& states = index_[v]->states;
    for (StateIndex s = 0; s < states.size(); ++s) {
      if (states[s] == state) return s;
    }
    error(span, Code::UnknownState,
          "'" + state + "' is not a state of " + index_[v]->name);
    return std::nullopt;
  }

  Label resolve_expr(const PExpr& e) {
    switch (e.kind) {
      case PExpr::Kind::Const:
        return Label::constant(e.value);
      case PExpr::Kind::Atom: {
        auto v = lookup(e.var, e.span);
        if (!v) return Label::constant(true);
        auto s = lookup_state(*v, e.state, e.span);
        if (!s) return Label::constant(true);
        return Label::atom(*v, *s);
      }
      case PExpr::Kind::Not:
        return Label::negation(resolve_expr(*e.lhs));
      case PExpr::Kind::And:
        return Label::conjunction(resolve_expr(*e.lhs), resolve_expr(*e.rhs));
      case PExpr::Kind::Or:
        return Label::disjunction(resolve_expr(*e.lhs), resolve_expr(*e.rhs));
      case PExpr::Kind::Implies:
        return Label::implication(resolve_expr(*e.lhs), resolve_expr(*e.rhs));
      case PExpr::Kind::Iff:
        return Label::equivalence(resolve_expr(*e.lhs), resolve_expr(*e.rhs));
    }
    return Label::constant(true);
  }

  void resolve_table(const PTableDecl& decl, ModelBuilder& builder) {
    auto var = lookup(decl.var, decl.span);
    if (!var) return;
    spans_[decl.var] = spans_.count(decl.var) ? spans_[decl.var] : decl.span;

    // Configuration variables: explicit parent list for cpt (plus the
    // variable itself on the value axis), declared parents for utility.
    std::vector<VariableIndex> config_vars;
    if (decl.probability) {
      for (const auto& p : decl.parents) {
        auto pv = lookup(p, decl.span);
        if (!pv) return;
        config_vars.push_back(*pv);
      }
    } else {
      // Utility rows are keyed by the value node's parents in declaration
      // order; they are recovered from the arcs.
      for (const auto& arc : tree_.arcs) {
        if (arc.dst != decl.var) continue;
        auto pv = names_.find(arc.src);
        if (pv != names_.end()) config_vars.push_back(pv->second);
      }
      std::sort(config_vars.begin(), config_vars.end());
      config_vars.erase(std::unique(config_vars.begin(), config_vars.end()),
                        config_vars.end());
    }

    std::vector<VariableIndex> domain = config_vars;
    if (decl.probability) domain.push_back(*var);
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    std::vector<std::uint32_t> card;
    for (VariableIndex v : domain) {
      card.push_back(static_cast<std::uint32_t>(index_[v]->states.size()));
    }
    PartialTable table(
        decl.probability ? TableKind::Probability : TableKind::Utility,
        domain, card);
    // Everything starts ⊥.
    for (std::size_t i = 0; i < table.size(); ++i) table.set_undefined(i);

    std::vector<char> row_seen;
    if (decl.probability) {
      std::size_t rows = 1;
      for (VariableIndex v : config_vars) {
        rows *= index_[v]->states.size();
      }
      row_seen.assign(rows, 0);
    }

    for (const auto& row : decl.rows) {
      if (row.config.size() != config_vars.size()) {
        error(row.span, Code::Arity,
              "row configuration names " + std::to_string(row.config.size()) +
                  " states but the table conditions on " +
                  std::to_string(config_vars.size()) + " variables");
        continue;
      }
      Assignment a;
      bool bad = false;
      for (std::size_t i = 0; i < config_vars.size(); ++i) {
        auto s = lookup_state(config_vars[i], row.config[i], row.span);
        if (!s) {
          bad = true;
          break;
        }
        a.set(config_vars[i], *s);
      }
      if (bad) continue;
      if (decl.probability) {
        std::size_t flat = 0;
        for (VariableIndex v : config_vars) {
          flat = flat * index_[v]->states.size() + *a.get(v);
        }
        if (!row_seen.empty()) {
          if (row_seen[flat]) {
            error(row.span, Code::DuplicateDeclaration,
                  "duplicate row configuration");
            continue;
          }
          row_seen[flat] = 1;
        }
        std::size_t want = index_[*var]->states.size();
        if (row.values.size() != want) {
          error(row.span, Code::Arity,
                "row lists " + std::to_string(row.values.size()) +
                    " entries but " + decl.var + " has " +
                    std::to_string(want) + " states");
          continue;
        }
        for (StateIndex s = 0; s < want; ++s) {
          Assignment cell = a;
          cell.set(*var, s);
          std::vector<StateIndex> config;
          for (VariableIndex v : domain) config.push_back(*cell.get(v));
          if (row.values[s].value) {
            table.set(config, *row.values[s].value);
          } else {
            table.set_undefined(config);
          }
        }
      } else {
        if (row.values.size() != 1) {
          error(row.span, Code::Arity,
                "utility rows carry exactly one value");
          continue;
        }
        std::vector<StateIndex> config;
        for (VariableIndex v : domain) config.push_back(*a.get(v));
        if (row.values[0].value) {
          table.set(config, *row.values[0].value);
        } else {
          table.set_undefined(config);
        }
      }
    }
    if (decl.probability) {
      builder.add_probability(*var, std::move(table));
    } else {
      builder.add_utility(*var, std::move(table));
    }
  }

  void resolve_restrict(const PRestrictDecl& decl, ModelBuilder& builder) {
    auto dec = lookup(decl.decision, decl.span);
    if (!dec) return;
    RestrictiveFunction rf;
    rf.decision = *dec;
    for (const auto& g : decl.given) {
      auto v = lookup(g, decl.span);
      if (!v) return;
      rf.domain.push_back(*v);
    }
    // Canonical domain order; remember the user order for row decoding.
    std::vector<VariableIndex> user_order = rf.domain;
    std::sort(rf.domain.begin(), rf.domain.end());
    for (VariableIndex v : rf.domain) {
      rf.cardinalities.push_back(
          static_cast<std::uint32_t>(index_[v]->states.size()));
    }
    std::size_t rows = 1;
    for (auto c : rf.cardinalities) rows *= c;
    std::size_t dstates = index_[*dec]->states.size();
    rf.options.assign(rows, std::vector<char>(dstates, 0));
    std::vector<char> seen(rows, 0);
    for (const auto& row : decl.rows) {
      if (row.config.size() != user_order.size()) {
        error(row.span, Code::Arity, "row configuration arity mismatch");
        continue;
      }
      Assignment a;
      bool bad = false;
      for (std::size_t i = 0; i < user_order.size(); ++i) {
        auto s = lookup_state(user_order[i], row.config[i], row.span);
        if (!s) {
          bad = true;
          break;
        }
        a.set(user_order[i], *s);
      }
      if (bad) continue;
      std::size_t flat = 0;
      for (std::size_t i = 0; i < rf.domain.size(); ++i) {
        flat = flat * rf.cardinalities[i] + *a.get(rf.domain[i]);
      }
      if (seen[flat]) {
        error(row.span, Code::DuplicateDeclaration,
              "duplicate restrictive row");
        continue;
      }
      seen[flat] = 1;
      for (const auto& opt : row.options) {
        auto s = lookup_state(*dec, opt, row.span);
        if (s) rf.options[flat][*s] = 1;
      }
    }
    for (std::size_t r = 0; r < rows; ++r) {
      if (!seen[r]) {
        error(decl.span, Code::RestrictiveIncomplete,
              "restrictive function for " + decl.decision +
                  " misses a configuration");
        return;
      }
    }
    builder.add_restrictive(std::move(rf));
  }

  const ParseTree& tree_;
  std::vector<SpanDiagnostic>& diags_;
  std::map<std::string, VariableIndex> names_;
  std::vector<const PNodeDecl*> index_;
  std::map<std::string, SourceSpan> spans_;
  bool failed_ = false;
};

}  // namespace

ParseResult parse(std::string_view text) {
  ParseResult result;
  Lexer lexer(text);
  auto tokens = lexer.run(result.diagnostics);
  if (!result.diagnostics.empty()) return result;
  Parser parser(std::move(tokens), result.diagnostics);
  auto tree = parser.run();
  if (!tree || !result.diagnostics.empty()) return result;
  Resolver resolver(*tree, result.diagnostics);
  result.model = resolver.run();
  if (!result.model) return result;
  // Keep warnings; only errors invalidate.
  bool errors = std::any_of(
      result.diagnostics.begin(), result.diagnostics.end(),
      [](const auto& d) { return d.severity == Severity::Error; });
  if (errors) result.model.reset();
  return result;
}

}  // namespace aid
