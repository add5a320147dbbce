#include "explaineo/model.hpp"

#include <algorithm>
#include <cctype>

namespace explaineo {

std::string print_literal(const Literal& lit) {
  if (lit.type != Literal::Type::String) return lit.text;
  std::string out = "\"";
  for (char c : lit.text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

Literal literal_of(const Value& value) {
  switch (value.kind()) {
    case Kind::Boolean: return {Literal::Type::Boolean, value.to_string()};
    case Kind::Number:
    case Kind::Money: return {Literal::Type::Number, value.to_string()};
    case Kind::Date: return {Literal::Type::Date, value.to_string()};
    case Kind::Text:
    case Kind::Enum: return {Literal::Type::String, value.as_string()};
  }
  return {};
}

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Eq: return "=";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "?";
}

Comparator negate(Comparator cmp) {
  switch (cmp) {
    case Comparator::Eq: return Comparator::Ne;
    case Comparator::Ne: return Comparator::Eq;
    case Comparator::Lt: return Comparator::Ge;
    case Comparator::Le: return Comparator::Gt;
    case Comparator::Gt: return Comparator::Le;
    case Comparator::Ge: return Comparator::Lt;
  }
  return cmp;
}

Comparator flip(Comparator cmp) {
  switch (cmp) {
    case Comparator::Lt: return Comparator::Gt;
    case Comparator::Le: return Comparator::Ge;
    case Comparator::Gt: return Comparator::Lt;
    case Comparator::Ge: return Comparator::Le;
    default: return cmp;
  }
}

std::string print_atom(const Atom& atom) {
  std::string out = atom.variable;
  out += ' ';
  out += to_string(atom.comparator);
  out += ' ';
  if (const auto* lit = std::get_if<Literal>(&atom.operand)) {
    out += print_literal(*lit);
  } else {
    out += std::get<VarRef>(atom.operand).name;
  }
  return out;
}

Condition Condition::make_atom(Atom a) {
  Condition c;
  c.op = Op::Atom;
  c.pos = a.pos;
  c.atom = std::move(a);
  return c;
}

Condition Condition::make(Op op, std::vector<Condition> children) {
  Condition c;
  c.op = op;
  if (!children.empty()) c.pos = children.front().pos;
  c.children = std::move(children);
  return c;
}

namespace {

void print_condition_into(const Condition& cond, std::string& out) {
  switch (cond.op) {
    case Condition::Op::Atom: out += print_atom(cond.atom); return;
    case Condition::Op::Not: {
      out += "not ";
      const Condition& child = cond.children.front();
      const bool group = child.op == Condition::Op::And || child.op == Condition::Op::Or;
      if (group) out += '(';
      print_condition_into(child, out);
      if (group) out += ')';
      return;
    }
    case Condition::Op::And:
    case Condition::Op::Or: {
      const bool is_and = cond.op == Condition::Op::And;
      for (std::size_t i = 0; i < cond.children.size(); ++i) {
        if (i) out += is_and ? " and " : " or ";
        const Condition& child = cond.children[i];
        const bool group = child.op == cond.op ||
                           (is_and && child.op == Condition::Op::Or) ||
                           (child.op != Condition::Op::Atom && child.op != Condition::Op::Not &&
                            child.children.size() < 2);
        if (group) out += '(';
        print_condition_into(child, out);
        if (group) out += ')';
      }
      return;
    }
  }
}

void collect_atoms(const Condition& cond, std::vector<const Atom*>& out) {
  if (cond.op == Condition::Op::Atom) {
    out.push_back(&cond.atom);
    return;
  }
  for (const auto& child : cond.children) collect_atoms(child, out);
}

int precedence(const Expr& e) {
  switch (e.op) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    case Expr::Op::Neg: return 3;
    default: return 4;
  }
}

void print_expr_into(const Expr& e, std::string& out) {
  switch (e.op) {
    case Expr::Op::Literal: out += print_literal(e.literal); return;
    case Expr::Op::Var: out += e.variable; return;
    case Expr::Op::Neg: {
      out += '-';
      const bool group = precedence(e.args[0]) < 3;
      if (group) out += '(';
      print_expr_into(e.args[0], out);
      if (group) out += ')';
      return;
    }
    default: {
      const int p = precedence(e);
      const char* op = e.op == Expr::Op::Add   ? " + "
                       : e.op == Expr::Op::Sub ? " - "
                       : e.op == Expr::Op::Mul ? " * "
                                               : " / ";
      const bool left_group = precedence(e.args[0]) < p;
      const bool right_group = precedence(e.args[1]) <= p;
      if (left_group) out += '(';
      print_expr_into(e.args[0], out);
      if (left_group) out += ')';
      out += op;
      if (right_group) out += '(';
      print_expr_into(e.args[1], out);
      if (right_group) out += ')';
    }
  }
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.op == Expr::Op::Var) {
    if (std::find(out.begin(), out.end(), e.variable) == out.end()) out.push_back(e.variable);
    return;
  }
  for (const auto& arg : e.args) collect_vars(arg, out);
}

}  // namespace

std::string print_condition(const Condition& cond) {
  std::string out;
  print_condition_into(cond, out);
  return out;
}

std::vector<const Atom*> atoms_of(const Condition& cond) {
  std::vector<const Atom*> out;
  collect_atoms(cond, out);
  return out;
}

std::string print_expr(const Expr& expr) {
  std::string out;
  print_expr_into(expr, out);
  return out;
}

std::optional<Kind> arithmetic_kind(Expr::Op op, Kind a, Kind b) {
  const auto num = [](Kind k) { return k == Kind::Number; };
  const auto money = [](Kind k) { return k == Kind::Money; };
  const auto date = [](Kind k) { return k == Kind::Date; };
  switch (op) {
    case Expr::Op::Add:
      if (num(a) && num(b)) return Kind::Number;
      if ((money(a) || num(a)) && (money(b) || num(b))) return Kind::Money;
      if ((date(a) && num(b)) || (num(a) && date(b))) return Kind::Date;
      return std::nullopt;
    case Expr::Op::Sub:
      if (num(a) && num(b)) return Kind::Number;
      if ((money(a) || num(a)) && (money(b) || num(b))) return Kind::Money;
      if (date(a) && date(b)) return Kind::Number;
      if (date(a) && num(b)) return Kind::Date;
      return std::nullopt;
    case Expr::Op::Mul:
      if (num(a) && num(b)) return Kind::Number;
      if ((money(a) && num(b)) || (num(a) && money(b))) return Kind::Money;
      return std::nullopt;
    case Expr::Op::Div:
      if (num(a) && num(b)) return Kind::Number;
      if (money(a) && num(b)) return Kind::Money;
      if (money(a) && money(b)) return Kind::Number;
      return std::nullopt;
    default: return std::nullopt;
  }
}

std::vector<std::string> variables_of(const Expr& expr) {
  std::vector<std::string> out;
  collect_vars(expr, out);
  return out;
}

bool is_valid_uri(std::string_view uri) {
  const auto colon = uri.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == uri.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(uri[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const char c = uri[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;
    }
  }
  for (std::size_t i = colon + 1; i < uri.size(); ++i) {
    const auto c = static_cast<unsigned char>(uri[i]);
    if (c <= 0x20 || c == 0x7f || c == '"' || c == '<' || c == '>' || c == '\\') return false;
  }
  return true;
}

const VariableDecl* DecisionModel::find_variable(std::string_view name) const {
  for (const auto& obj : object_model) {
    for (const auto& var : obj.variables) {
      if (var.name == name) return &var;
    }
  }
  return nullptr;
}

const Rule* DecisionModel::find_rule(std::string_view name) const {
  for (const auto& rule : rule_model) {
    if (rule.name == name) return &rule;
  }
  return nullptr;
}

const Service* DecisionModel::find_service(std::string_view name) const {
  for (const auto& svc : service_model) {
    if (svc.name == name) return &svc;
  }
  return nullptr;
}

std::vector<const VariableDecl*> DecisionModel::variables() const {
  std::vector<const VariableDecl*> out;
  for (const auto& obj : object_model) {
    for (const auto& var : obj.variables) out.push_back(&var);
  }
  return out;
}

std::vector<std::string> DecisionModel::input_variables() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  if (service_model.empty()) {
    for (const auto* var : variables()) {
      const bool derived = std::any_of(rule_model.begin(), rule_model.end(), [&](const Rule& r) {
        return r.action.target == var->name;
      });
      if (!derived) add(var->name);
    }
    return out;
  }
  for (const auto& svc : service_model) {
    for (const auto& msg : svc.inputs) {
      for (const auto& ref : msg.variables) add(ref.name);
    }
  }
  return out;
}

bool DecisionModel::is_input(std::string_view variable) const {
  const auto inputs = input_variables();
  return std::find(inputs.begin(), inputs.end(), variable) != inputs.end();
}

std::vector<std::string> DecisionModel::output_variables() const {
  std::vector<std::string> out;
  for (const auto& svc : service_model) {
    for (const auto& msg : svc.outputs) {
      for (const auto& ref : msg.variables) {
        if (std::find(out.begin(), out.end(), ref.name) == out.end()) out.push_back(ref.name);
      }
    }
  }
  return out;
}

std::optional<std::vector<Value>> finite_domain(const VariableDecl& decl) {
  if (!decl.domain.empty()) return decl.domain;
  if (decl.kind == Kind::Boolean) return std::vector<Value>{Value::boolean(false), Value::boolean(true)};
  return std::nullopt;
}

namespace ids {
std::string object(std::string_view name) { return "obj:" + std::string(name); }
std::string variable(std::string_view name) { return "var:" + std::string(name); }
std::string rule(std::string_view name) { return "rule:" + std::string(name); }
std::string service(std::string_view name) { return "svc:" + std::string(name); }
std::string message(std::string_view name) { return "msg:" + std::string(name); }
}  // namespace ids

}  // namespace explaineo
