#include "explaineo/dsl.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "explaineo/errors.hpp"

namespace explaineo {

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream out;
  out << d.line << ':' << d.column << ": " << to_string(d.severity) << ": " << d.message;
  if (!d.element.empty()) out << " [" << d.element << ']';
  return out.str();
}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident,
  Keyword,
  String,
  Number,
  DateLit,
  Symbol,
  End,
};

struct Token {
  Tok type = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "model", "version", "object", "relates_to", "as",  "rule",    "source", "if",
    "then",  "service", "in",     "out",        "unit", "and",    "or",     "not",
    "true",  "false",   "boolean", "number",    "money", "date",  "text",   "enum",
};

struct LexError {
  std::string message;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run(std::vector<LexError>& errors) {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (at_end()) break;
      const int line = line_, column = col_;
      const char c = peek();
      if (is_ident_start(c)) {
        std::string word;
        while (!at_end() && is_ident_char(peek())) word += take();
        out.push_back({kKeywords.count(word) ? Tok::Keyword : Tok::Ident, word, line, column});
      } else if (is_digit(c)) {
        out.push_back(lex_number(line, column));
      } else if (c == '"') {
        take();
        std::string s;
        bool closed = false;
        while (!at_end()) {
          const char d = take();
          if (d == '"') {
            closed = true;
            break;
          }
          if (d == '\n') break;
          if (d == '\\' && !at_end()) {
            s += take();
            continue;
          }
          s += d;
        }
        if (!closed) errors.push_back({"unterminated string literal", line, column});
        out.push_back({Tok::String, s, line, column});
      } else if (auto sym = lex_symbol()) {
        out.push_back({Tok::Symbol, *sym, line, column});
      } else {
        errors.push_back({std::string("unexpected character '") + c + "'", line, column});
        take();
      }
    }
    out.push_back({Tok::End, "", line_, col_});
    return out;
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char take() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else if (c == '-' && peek(1) == '-') {
        while (!at_end() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }

  Token lex_number(int line, int column) {
    // ISO-8601 date: dddd-dd-dd
    const bool date = src_.size() - pos_ >= 10 && is_digit(peek(0)) && is_digit(peek(1)) &&
                      is_digit(peek(2)) && is_digit(peek(3)) && peek(4) == '-' &&
                      is_digit(peek(5)) && is_digit(peek(6)) && peek(7) == '-' &&
                      is_digit(peek(8)) && is_digit(peek(9)) && !is_ident_char(peek(10));
    std::string text;
    if (date) {
      for (int i = 0; i < 10; ++i) text += take();
      return {Tok::DateLit, text, line, column};
    }
    while (!at_end() && is_digit(peek())) text += take();
    if (peek() == '.' && is_digit(peek(1))) {
      text += take();
      while (!at_end() && is_digit(peek())) text += take();
    }
    return {Tok::Number, text, line, column};
  }

  std::optional<std::string> lex_symbol() {
    const char c = peek();
    const auto two = std::string{c, peek(1)};
    if (two == "!=" || two == "<=" || two == ">=") {
      take();
      take();
      return two;
    }
    // UTF-8 comparators: U+2260, U+2264, U+2265
    if (static_cast<unsigned char>(c) == 0xE2 && static_cast<unsigned char>(peek(1)) == 0x89) {
      const auto third = static_cast<unsigned char>(peek(2));
      const char* mapped = third == 0xA0 ? "!=" : third == 0xA4 ? "<=" : third == 0xA5 ? ">=" : nullptr;
      if (mapped) {
        take();
        take();
        take();
        return std::string(mapped);
      }
    }
    static constexpr std::string_view kSingles = "{}()[],:=<>+-*/";
    if (kSingles.find(c) != std::string_view::npos) {
      take();
      return std::string(1, c);
    }
    return std::nullopt;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct SyntaxError {
  std::string message;
  int line;
  int column;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::optional<DecisionModel> run(std::vector<Diagnostic>& errors) {
    DecisionModel model;
    try {
      const Token& head = expect_keyword("model");
      model.pos = pos_of(head);
      model.name = expect_ident("model name").text;
      if (accept_keyword("version")) {
        model.version = expect(Tok::String, "version string").text;
      } else if (peek().type == Tok::String) {
        model.version = take().text;
      }
    } catch (const SyntaxError& e) {
      errors.push_back({Severity::Error, "model", e.message, e.line, e.column});
      return std::nullopt;
    }

    while (peek().type != Tok::End) {
      try {
        if (is_keyword("object")) {
          model.object_model.push_back(parse_object());
        } else if (is_keyword("rule")) {
          model.rule_model.push_back(parse_rule());
        } else if (is_keyword("service")) {
          model.service_model.push_back(parse_service());
        } else {
          fail("expected 'object', 'rule' or 'service', found " + describe(peek()));
        }
      } catch (const SyntaxError& e) {
        errors.push_back({Severity::Error, "model", e.message, e.line, e.column});
        recover();
      }
    }
    if (!errors.empty()) return std::nullopt;
    return model;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(idx_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[idx_];
    if (idx_ + 1 < toks_.size()) ++idx_;
    return t;
  }

  static SourcePos pos_of(const Token& t) { return {t.line, t.column}; }

  static std::string describe(const Token& t) {
    switch (t.type) {
      case Tok::End: return "end of input";
      case Tok::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw SyntaxError{message, peek().line, peek().column};
  }

  bool is_keyword(std::string_view kw) const {
    return peek().type == Tok::Keyword && peek().text == kw;
  }
  bool is_symbol(std::string_view s) const {
    return peek().type == Tok::Symbol && peek().text == s;
  }
  bool accept_keyword(std::string_view kw) {
    if (!is_keyword(kw)) return false;
    take();
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    take();
    return true;
  }
  const Token& expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail("expected '" + std::string(kw) + "', found " + describe(peek()));
    return take();
  }
  const Token& expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail("expected '" + std::string(s) + "', found " + describe(peek()));
    return take();
  }
  const Token& expect(Tok type, std::string_view what) {
    if (peek().type != type) fail("expected " + std::string(what) + ", found " + describe(peek()));
    return take();
  }
  const Token& expect_ident(std::string_view what) {
    if (peek().type == Tok::Keyword) {
      fail("expected " + std::string(what) + ", found reserved keyword '" + peek().text + "'");
    }
    return expect(Tok::Ident, what);
  }

  void recover() {
    if (peek().type != Tok::End) take();
    while (peek().type != Tok::End && !is_keyword("object") && !is_keyword("rule") &&
           !is_keyword("service")) {
      take();
    }
  }

  ObjectType parse_object() {
    ObjectType obj;
    obj.pos = pos_of(expect_keyword("object"));
    obj.name = expect_ident("object type name").text;
    expect_symbol("{");
    while (!is_symbol("}")) {
      if (peek().type == Tok::End) fail("unterminated object '" + obj.name + "'");
      if (is_keyword("relates_to")) {
        Relation rel;
        rel.pos = pos_of(take());
        rel.target = expect_ident("related object type").text;
        expect_keyword("as");
        rel.name = expect_ident("relation name").text;
        obj.relations.push_back(std::move(rel));
      } else {
        obj.variables.push_back(parse_vardecl());
      }
    }
    take();
    return obj;
  }

  VariableDecl parse_vardecl() {
    VariableDecl var;
    const Token& name = expect_ident("variable name");
    var.name = name.text;
    var.pos = pos_of(name);
    expect_symbol(":");
    const Token& kind = peek();
    auto parsed = kind.type == Tok::Keyword ? parse_kind(kind.text) : std::nullopt;
    if (!parsed) {
      fail("expected a kind (boolean, number, money, date, text, enum), found " + describe(kind));
    }
    take();
    var.kind = *parsed;
    if (accept_keyword("in")) {
      expect_symbol("[");
      if (!is_symbol("]")) {
        do {
          const Token& at = peek();
          Literal lit = parse_literal();
          auto value = Value::parse(var.kind, lit.text);
          if (!value || !literal_fits(lit.type, var.kind)) {
            throw SyntaxError{"domain value " + print_literal(lit) + " is not a " +
                                  std::string(to_string(var.kind)),
                              at.line, at.column};
          }
          var.domain.push_back(*value);
        } while (accept_symbol(","));
      }
      expect_symbol("]");
    }
    if (accept_keyword("unit")) var.unit = expect(Tok::String, "unit string").text;
    return var;
  }

  static bool literal_fits(Literal::Type type, Kind kind) {
    switch (type) {
      case Literal::Type::Number: return kind == Kind::Number || kind == Kind::Money;
      case Literal::Type::Date: return kind == Kind::Date;
      case Literal::Type::String: return kind == Kind::Text || kind == Kind::Enum;
      case Literal::Type::Boolean: return kind == Kind::Boolean;
    }
    return false;
  }

  bool at_literal() const {
    const Token& t = peek();
    return t.type == Tok::Number || t.type == Tok::String || t.type == Tok::DateLit ||
           (t.type == Tok::Keyword && (t.text == "true" || t.text == "false")) ||
           (t.type == Tok::Symbol && t.text == "-" && peek(1).type == Tok::Number);
  }

  Literal parse_literal() {
    const Token& t = peek();
    if (t.type == Tok::Symbol && t.text == "-") {
      take();
      return {Literal::Type::Number, "-" + expect(Tok::Number, "number").text};
    }
    switch (t.type) {
      case Tok::Number: return {Literal::Type::Number, take().text};
      case Tok::String: return {Literal::Type::String, take().text};
      case Tok::DateLit: return {Literal::Type::Date, take().text};
      case Tok::Keyword:
        if (t.text == "true" || t.text == "false") return {Literal::Type::Boolean, take().text};
        break;
      default: break;
    }
    fail("expected a literal, found " + describe(t));
  }

  Rule parse_rule() {
    Rule rule;
    rule.pos = pos_of(expect_keyword("rule"));
    rule.name = expect_ident("rule name").text;
    if (accept_keyword("source")) {
      SourceRef src;
      src.label = expect(Tok::String, "source label").text;
      src.uri = expect(Tok::String, "source uri").text;
      rule.source = std::move(src);
    }
    if (accept_keyword("if")) rule.condition = parse_disjunction();
    expect_keyword("then");
    const Token& target = expect_ident("target variable");
    rule.action.target = target.text;
    rule.action.pos = pos_of(target);
    expect_symbol("=");
    rule.action.value = parse_expr();
    return rule;
  }

  Condition parse_disjunction() {
    std::vector<Condition> parts{parse_conjunction()};
    while (accept_keyword("or")) parts.push_back(parse_conjunction());
    if (parts.size() == 1) return std::move(parts.front());
    return Condition::make(Condition::Op::Or, std::move(parts));
  }

  Condition parse_conjunction() {
    std::vector<Condition> parts{parse_unary()};
    while (accept_keyword("and")) parts.push_back(parse_unary());
    if (parts.size() == 1) return std::move(parts.front());
    return Condition::make(Condition::Op::And, std::move(parts));
  }

  Condition parse_unary() {
    if (is_keyword("not")) {
      const SourcePos pos = pos_of(take());
      Condition c = Condition::make(Condition::Op::Not, {parse_unary()});
      c.pos = pos;
      return c;
    }
    if (accept_symbol("(")) {
      Condition inner = parse_disjunction();
      expect_symbol(")");
      return inner;
    }
    return Condition::make_atom(parse_atom());
  }

  static std::optional<Comparator> comparator_of(const Token& t) {
    if (t.type != Tok::Symbol) return std::nullopt;
    if (t.text == "=") return Comparator::Eq;
    if (t.text == "!=") return Comparator::Ne;
    if (t.text == "<") return Comparator::Lt;
    if (t.text == "<=") return Comparator::Le;
    if (t.text == ">") return Comparator::Gt;
    if (t.text == ">=") return Comparator::Ge;
    return std::nullopt;
  }

  Atom parse_atom() {
    Atom atom;
    const Token& var = expect_ident("variable in condition");
    atom.variable = var.text;
    atom.pos = pos_of(var);
    auto cmp = comparator_of(peek());
    if (!cmp) {
      // A bare variable reads as "variable = true".
      atom.comparator = Comparator::Eq;
      atom.operand = Literal{Literal::Type::Boolean, "true"};
      return atom;
    }
    take();
    atom.comparator = *cmp;
    if (at_literal()) {
      atom.operand = parse_literal();
    } else {
      const Token& rhs = expect_ident("literal or variable");
      atom.operand = VarRef{rhs.text, pos_of(rhs)};
    }
    return atom;
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (is_symbol("+") || is_symbol("-")) {
      const Token& op = take();
      Expr node;
      node.op = op.text == "+" ? Expr::Op::Add : Expr::Op::Sub;
      node.pos = lhs.pos;
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_term());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    while (is_symbol("*") || is_symbol("/")) {
      const Token& op = take();
      Expr node;
      node.op = op.text == "*" ? Expr::Op::Mul : Expr::Op::Div;
      node.pos = lhs.pos;
      node.args.push_back(std::move(lhs));
      node.args.push_back(parse_factor());
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_factor() {
    const Token& t = peek();
    Expr e;
    e.pos = pos_of(t);
    if (t.type == Tok::Symbol && t.text == "-") {
      take();
      e.op = Expr::Op::Neg;
      e.args.push_back(parse_factor());
      return e;
    }
    if (accept_symbol("(")) {
      Expr inner = parse_expr();
      expect_symbol(")");
      return inner;
    }
    if (t.type == Tok::Ident) {
      e.op = Expr::Op::Var;
      e.variable = take().text;
      return e;
    }
    if (at_literal()) {
      e.op = Expr::Op::Literal;
      e.literal = parse_literal();
      return e;
    }
    fail("expected an expression, found " + describe(t));
  }

  Message parse_message() {
    Message msg;
    const Token& name = expect_ident("message name");
    msg.name = name.text;
    msg.pos = pos_of(name);
    expect_symbol("(");
    do {
      const Token& var = expect_ident("variable name");
      msg.variables.push_back({var.text, pos_of(var)});
    } while (accept_symbol(","));
    expect_symbol(")");
    return msg;
  }

  Service parse_service() {
    Service svc;
    svc.pos = pos_of(expect_keyword("service"));
    svc.name = expect_ident("service name").text;
    expect_symbol("{");
    while (!is_symbol("}")) {
      if (accept_keyword("in")) {
        svc.inputs.push_back(parse_message());
      } else if (accept_keyword("out")) {
        svc.outputs.push_back(parse_message());
      } else {
        fail("expected 'in', 'out' or '}', found " + describe(peek()));
      }
    }
    take();
    return svc;
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

class Validator {
 public:
  explicit Validator(const DecisionModel& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    check_declarations();
    for (const auto& rule : m_.rule_model) check_rule(rule);
    check_services();
    return std::move(out_);
  }

 private:
  void error(std::string element, std::string message, SourcePos pos) {
    out_.push_back({Severity::Error, std::move(element), std::move(message), pos.line, pos.column});
  }

  void check_declarations() {
    std::set<std::string> objects;
    for (const auto& obj : m_.object_model) {
      if (!objects.insert(obj.name).second) {
        error(ids::object(obj.name), "duplicate object type '" + obj.name + "'", obj.pos);
      }
    }
    std::set<std::string> vars;
    for (const auto& obj : m_.object_model) {
      for (const auto& var : obj.variables) {
        const std::string id = ids::variable(var.name);
        if (!vars.insert(var.name).second) {
          error(id, "duplicate variable '" + var.name + "'", var.pos);
        }
        if (var.kind == Kind::Enum && var.domain.empty()) {
          error(id, "enum variable '" + var.name + "' needs a non-empty domain", var.pos);
        }
        std::set<std::string> seen;
        for (const auto& v : var.domain) {
          if (v.kind() != var.kind) {
            error(id, "domain value " + v.to_string() + " of '" + var.name + "' is not a " +
                          std::string(to_string(var.kind)),
                  var.pos);
          } else if (!seen.insert(v.to_string()).second) {
            error(id, "duplicate domain value " + v.to_string() + " in '" + var.name + "'",
                  var.pos);
          }
        }
      }
      std::set<std::pair<std::string, std::string>> rels;
      for (const auto& rel : obj.relations) {
        if (!objects.count(rel.target)) {
          error(ids::object(obj.name),
                "relation '" + rel.name + "' targets undeclared object type '" + rel.target + "'",
                rel.pos);
        }
        if (!rels.insert({rel.target, rel.name}).second) {
          error(ids::object(obj.name), "duplicate relation '" + rel.name + "'", rel.pos);
        }
      }
    }
    std::set<std::string> rules;
    for (const auto& rule : m_.rule_model) {
      if (!rules.insert(rule.name).second) {
        error(ids::rule(rule.name), "duplicate rule '" + rule.name + "'", rule.pos);
      }
    }
    std::set<std::string> services;
    std::set<std::string> messages;
    for (const auto& svc : m_.service_model) {
      if (!services.insert(svc.name).second) {
        error(ids::service(svc.name), "duplicate service '" + svc.name + "'", svc.pos);
      }
      for (const auto* group : {&svc.inputs, &svc.outputs}) {
        for (const auto& msg : *group) {
          if (!messages.insert(msg.name).second) {
            error(ids::message(msg.name), "duplicate message '" + msg.name + "'", msg.pos);
          }
        }
      }
    }
  }

  const VariableDecl* lookup(const std::string& name, const std::string& element, SourcePos pos) {
    const VariableDecl* decl = m_.find_variable(name);
    if (!decl) error(element, "undeclared variable '" + name + "'", pos);
    return decl;
  }

  static bool literal_fits(const Literal& lit, const VariableDecl& decl) {
    auto value = Value::parse(decl.kind, lit.text);
    if (!value) return false;
    switch (lit.type) {
      case Literal::Type::Number: return decl.kind == Kind::Number || decl.kind == Kind::Money;
      case Literal::Type::Date: return decl.kind == Kind::Date;
      case Literal::Type::Boolean: return decl.kind == Kind::Boolean;
      case Literal::Type::String:
        if (decl.kind == Kind::Text) return true;
        if (decl.kind != Kind::Enum) return false;
        return std::find(decl.domain.begin(), decl.domain.end(), *value) != decl.domain.end();
    }
    return false;
  }

  void check_condition(const Condition& cond, const std::string& element) {
    for (const Atom* atom : atoms_of(cond)) {
      const VariableDecl* lhs = lookup(atom->variable, element, atom->pos);
      const bool ordered = atom->comparator != Comparator::Eq && atom->comparator != Comparator::Ne;
      if (lhs && ordered && !is_ordered(lhs->kind)) {
        error(element,
              "comparator '" + std::string(to_string(atom->comparator)) +
                  "' needs a number, money or date; '" + lhs->name + "' is " +
                  std::string(to_string(lhs->kind)),
              atom->pos);
      }
      if (const auto* lit = std::get_if<Literal>(&atom->operand)) {
        if (lhs && !literal_fits(*lit, *lhs)) {
          error(element,
                "literal " + print_literal(*lit) + " is not a valid " +
                    std::string(to_string(lhs->kind)) + " value for '" + lhs->name + "'",
                atom->pos);
        }
      } else {
        const auto& ref = std::get<VarRef>(atom->operand);
        const VariableDecl* rhs = lookup(ref.name, element, ref.pos);
        if (lhs && rhs && !comparable(lhs->kind, rhs->kind)) {
          error(element,
                "cannot compare '" + lhs->name + "' (" + std::string(to_string(lhs->kind)) +
                    ") with '" + rhs->name + "' (" + std::string(to_string(rhs->kind)) + ")",
                ref.pos);
        }
      }
    }
  }

  // Kind of an arithmetic expression, or nullopt after reporting an error.
  // String literals report as Text.
  std::optional<Kind> expr_kind(const Expr& e, const std::string& element) {
    switch (e.op) {
      case Expr::Op::Literal:
        switch (e.literal.type) {
          case Literal::Type::Number: return Kind::Number;
          case Literal::Type::Date: return Kind::Date;
          case Literal::Type::String: return Kind::Text;
          case Literal::Type::Boolean: return Kind::Boolean;
        }
        return std::nullopt;
      case Expr::Op::Var: {
        const VariableDecl* decl = lookup(e.variable, element, e.pos);
        if (!decl) return std::nullopt;
        return decl->kind;
      }
      case Expr::Op::Neg: {
        auto k = expr_kind(e.args[0], element);
        if (!k) return std::nullopt;
        if (*k == Kind::Number || *k == Kind::Money) return k;
        error(element, "cannot negate a " + std::string(to_string(*k)) + " value", e.pos);
        return std::nullopt;
      }
      default: {
        auto a = expr_kind(e.args[0], element);
        auto b = expr_kind(e.args[1], element);
        if (!a || !b) return std::nullopt;
        if (auto k = arithmetic_kind(e.op, *a, *b)) return k;
        const char* op = e.op == Expr::Op::Add   ? "+"
                         : e.op == Expr::Op::Sub ? "-"
                         : e.op == Expr::Op::Mul ? "*"
                                                 : "/";
        error(element,
              std::string("operator '") + op + "' is not defined for " +
                  std::string(to_string(*a)) + " and " + std::string(to_string(*b)),
              e.pos);
        return std::nullopt;
      }
    }
  }

 private:
  void check_rule(const Rule& rule) {
    const std::string element = ids::rule(rule.name);
    if (rule.source && !is_valid_uri(rule.source->uri)) {
      error(element, "source uri '" + rule.source->uri + "' is not a valid URI", rule.pos);
    }
    if (rule.condition) check_condition(*rule.condition, element);
    const VariableDecl* target = lookup(rule.action.target, element, rule.action.pos);
    const Expr& value = rule.action.value;
    if (value.op == Expr::Op::Literal) {
      if (target && !literal_fits(value.literal, *target)) {
        error(element,
              "cannot assign " + print_literal(value.literal) + " to " +
                  std::string(to_string(target->kind)) + " variable '" + target->name + "'",
              value.pos);
      }
      return;
    }
    auto kind = expr_kind(value, element);
    if (!target || !kind) return;
    const bool ok = *kind == target->kind || (target->kind == Kind::Money && *kind == Kind::Number);
    if (!ok) {
      error(element,
            "cannot assign a " + std::string(to_string(*kind)) + " expression to " +
                std::string(to_string(target->kind)) + " variable '" + target->name + "'",
            value.pos);
    }
  }

  void check_services() {
    for (const auto& svc : m_.service_model) {
      for (bool input : {true, false}) {
        std::map<std::string, std::string> seen;  // variable -> message
        for (const auto& msg : input ? svc.inputs : svc.outputs) {
          const std::string element = ids::message(msg.name);
          for (const auto& ref : msg.variables) {
            lookup(ref.name, element, ref.pos);
            auto [it, fresh] = seen.emplace(ref.name, msg.name);
            if (!fresh) {
              error(element,
                    "variable '" + ref.name + "' already appears in " +
                        (input ? "input" : "output") + " message '" + it->second + "'",
                    ref.pos);
            }
          }
        }
      }
    }
  }

  const DecisionModel& m_;
  std::vector<Diagnostic> out_;
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string quote(std::string_view s) { return print_literal({Literal::Type::String, std::string(s)}); }

}  // namespace

ParseResult parse_model(std::string_view source) {
  ParseResult result;
  std::vector<LexError> lex_errors;
  auto tokens = Lexer(source).run(lex_errors);
  for (const auto& e : lex_errors) {
    result.errors.push_back({Severity::Error, "model", e.message, e.line, e.column});
  }
  if (tokens.size() == 1 && lex_errors.empty()) {
    result.errors.push_back({Severity::Error, "model", "empty model", 1, 1});
    return result;
  }
  auto model = Parser(std::move(tokens)).run(result.errors);
  if (!result.errors.empty() || !model) return result;
  auto diags = validate_model(*model);
  const bool failed = std::any_of(diags.begin(), diags.end(),
                                  [](const Diagnostic& d) { return d.severity == Severity::Error; });
  result.errors = std::move(diags);
  if (!failed) result.model = std::move(model);
  return result;
}

std::vector<Diagnostic> validate_model(const DecisionModel& model) {
  return Validator(model).run();
}

std::string print_model(const DecisionModel& model) {
  std::ostringstream out;
  out << "model " << model.name;
  if (!model.version.empty()) out << " version " << quote(model.version);
  out << '\n';
  for (const auto& obj : model.object_model) {
    out << "\nobject " << obj.name << " {\n";
    for (const auto& var : obj.variables) {
      out << "  " << var.name << ": " << to_string(var.kind);
      if (!var.domain.empty()) {
        out << " in [";
        for (std::size_t i = 0; i < var.domain.size(); ++i) {
          if (i) out << ", ";
          out << print_literal(literal_of(var.domain[i]));
        }
        out << ']';
      }
      if (var.unit) out << " unit " << quote(*var.unit);
      out << '\n';
    }
    for (const auto& rel : obj.relations) {
      out << "  relates_to " << rel.target << " as " << rel.name << '\n';
    }
    out << "}\n";
  }
  for (const auto& rule : model.rule_model) {
    out << "\nrule " << rule.name << '\n';
    if (rule.source) out << "  source " << quote(rule.source->label) << ' ' << quote(rule.source->uri) << '\n';
    if (rule.condition) out << "  if " << print_condition(*rule.condition) << '\n';
    out << "  then " << rule.action.target << " = " << print_expr(rule.action.value) << '\n';
  }
  for (const auto& svc : model.service_model) {
    out << "\nservice " << svc.name << " {\n";
    for (bool input : {true, false}) {
      for (const auto& msg : input ? svc.inputs : svc.outputs) {
        out << "  " << (input ? "in " : "out ") << msg.name << '(';
        for (std::size_t i = 0; i < msg.variables.size(); ++i) {
          if (i) out << ", ";
          out << msg.variables[i].name;
        }
        out << ")\n";
      }
    }
    out << "}\n";
  }
  return out.str();
}

DecisionModel parse_model_or_throw(std::string_view source) {
  auto result = parse_model(source);
  if (result.ok()) return std::move(*result.model);
  std::string message;
  for (const auto& d : result.errors) {
    if (!message.empty()) message += '\n';
    message += format_diagnostic(d);
  }
  throw Error(ErrorCode::Parse, message);
}

DecisionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_model_or_throw(buf.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, path.string() + ":\n" + e.what());
  }
}

}  // namespace explaineo
