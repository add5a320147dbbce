#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "explaineo/value.hpp"

namespace explaineo {

/// 1-based line/column of an element in DSL source. Positions are metadata:
/// they never take part in equality, so a model re-parsed from differently
/// formatted text compares equal to the original.
struct SourcePos {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

struct VariableDecl {
  std::string name;
  Kind kind = Kind::Boolean;
  std::vector<Value> domain;
  std::optional<std::string> unit;
  SourcePos pos;
  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

struct Relation {
  std::string target;
  std::string name;
  SourcePos pos;
  friend bool operator==(const Relation&, const Relation&) = default;
};

struct ObjectType {
  std::string name;
  std::vector<VariableDecl> variables;
  std::vector<Relation> relations;
  SourcePos pos;
  friend bool operator==(const ObjectType&, const ObjectType&) = default;
};

/// Untyped literal as written in source. Its kind is fixed by the variable
/// it is compared with or assigned to.
struct Literal {
  enum class Type { Number, String, Date, Boolean };
  Type type = Type::Number;
  std::string text;
  friend bool operator==(const Literal&, const Literal&) = default;
};

std::string print_literal(const Literal& lit);

/// Literal form of a typed value (strings quoted on print).
Literal literal_of(const Value& value);

struct VarRef {
  std::string name;
  SourcePos pos;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(Comparator cmp);
Comparator negate(Comparator cmp);
/// a OP b  <=>  b flip(OP) a
Comparator flip(Comparator cmp);

struct Atom {
  std::string variable;
  Comparator comparator = Comparator::Eq;
  std::variant<Literal, VarRef> operand;
  SourcePos pos;
  friend bool operator==(const Atom&, const Atom&) = default;
};

std::string print_atom(const Atom& atom);

struct Condition {
  enum class Op { Atom, And, Or, Not };
  Op op = Op::Atom;
  Atom atom;  // Op::Atom only
  std::vector<Condition> children;
  SourcePos pos;
  friend bool operator==(const Condition&, const Condition&) = default;

  static Condition make_atom(Atom a);
  static Condition make(Op op, std::vector<Condition> children);
};

/// Prints with the minimal parentheses needed to re-parse the same tree.
std::string print_condition(const Condition& cond);

/// Atoms in left-to-right source order.
std::vector<const Atom*> atoms_of(const Condition& cond);

struct Expr {
  enum class Op { Literal, Var, Add, Sub, Mul, Div, Neg };
  Op op = Op::Literal;
  Literal literal;
  std::string variable;
  std::vector<Expr> args;
  SourcePos pos;
  friend bool operator==(const Expr&, const Expr&) = default;
};

std::string print_expr(const Expr& expr);

/// Result kind of a binary arithmetic operator, or nullopt when undefined.
/// number+money is money, date-date is a day count, date+number is a date.
std::optional<Kind> arithmetic_kind(Expr::Op op, Kind a, Kind b);

/// Variables referenced by the expression, in first-occurrence order.
std::vector<std::string> variables_of(const Expr& expr);

struct SourceRef {
  std::string label;
  std::string uri;
  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

bool is_valid_uri(std::string_view uri);

enum class ActionKind { Derivation, Calculation };

struct Action {
  std::string target;
  Expr value;
  SourcePos pos;
  friend bool operator==(const Action&, const Action&) = default;

  /// A derivation assigns a literal; anything referencing variables or
  /// operators is a calculation.
  ActionKind kind() const {
    return value.op == Expr::Op::Literal ? ActionKind::Derivation : ActionKind::Calculation;
  }
};

struct Rule {
  std::string name;
  std::optional<SourceRef> source;
  std::optional<Condition> condition;
  Action action;
  SourcePos pos;
  friend bool operator==(const Rule&, const Rule&) = default;
};

struct Message {
  std::string name;
  std::vector<VarRef> variables;
  SourcePos pos;
  friend bool operator==(const Message&, const Message&) = default;
};

struct Service {
  std::string name;
  std::vector<Message> inputs;
  std::vector<Message> outputs;
  SourcePos pos;
  friend bool operator==(const Service&, const Service&) = default;
};

struct DecisionModel {
  std::string name;
  std::string version;
  std::vector<ObjectType> object_model;
  std::vector<Rule> rule_model;
  std::vector<Service> service_model;
  SourcePos pos;
  friend bool operator==(const DecisionModel&, const DecisionModel&) = default;

  const VariableDecl* find_variable(std::string_view name) const;
  const Rule* find_rule(std::string_view name) const;
  const Service* find_service(std::string_view name) const;

  /// All variable declarations in declaration order.
  std::vector<const VariableDecl*> variables() const;

  /// Variables that callers may bind: members of any input message, or, for
  /// a model without services, every variable no rule derives.
  std::vector<std::string> input_variables() const;
  bool is_input(std::string_view variable) const;

  /// Members of any output message.
  std::vector<std::string> output_variables() const;
};

/// Finite value set for a variable: the declared domain, {false, true} for
/// undomained booleans, nullopt otherwise.
std::optional<std::vector<Value>> finite_domain(const VariableDecl& decl);

/// Stable element ids shared by diagnostics and every graph projection.
namespace ids {
std::string object(std::string_view name);
std::string variable(std::string_view name);
std::string rule(std::string_view name);
std::string service(std::string_view name);
std::string message(std::string_view name);
}  // namespace ids

}  // namespace explaineo
