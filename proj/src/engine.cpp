#include "explaineo/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "explaineo/errors.hpp"

namespace explaineo {

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::Input: return "input";
    case Origin::Derived: return "derived";
    case Origin::Unset: return "unset";
  }
  return "?";
}

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::False: return "false";
    case Truth::True: return "true";
    case Truth::Unknown: return "unknown";
  }
  return "?";
}

std::string_view to_string(InstanceStatus status) {
  return status == InstanceStatus::Complete ? "complete" : "partial";
}

DecisionInstance::DecisionInstance(std::shared_ptr<const DecisionModel> model, Inputs inputs,
                                   std::map<std::string, Binding> bindings,
                                   std::vector<TraceStep> trace, InstanceStatus status)
    : model_(std::move(model)),
      inputs_(std::move(inputs)),
      bindings_(std::move(bindings)),
      trace_(std::move(trace)),
      status_(status) {}

const Binding& DecisionInstance::binding(const std::string& variable) const {
  auto it = bindings_.find(variable);
  if (it == bindings_.end()) {
    throw Error(ErrorCode::UnknownElement, "unknown variable '" + variable + "'");
  }
  return it->second;
}

std::optional<Value> DecisionInstance::value(const std::string& variable) const {
  auto it = bindings_.find(variable);
  if (it == bindings_.end()) return std::nullopt;
  return it->second.value;
}

std::map<std::string, Value> DecisionInstance::derived() const {
  std::map<std::string, Value> out;
  for (const auto& [name, b] : bindings_) {
    if (b.origin == Origin::Derived) out.emplace(name, *b.value);
  }
  return out;
}

const TraceStep* DecisionInstance::step_for(const std::string& variable) const {
  for (const auto& step : trace_) {
    if (step.target == variable) return &step;
  }
  return nullptr;
}

bool DecisionInstance::fired(const std::string& rule) const {
  return std::any_of(trace_.begin(), trace_.end(),
                     [&](const TraceStep& s) { return s.rule == rule; });
}

bool operator==(const DecisionInstance& a, const DecisionInstance& b) {
  const bool same_model = a.model_ == b.model_ || *a.model_ == *b.model_;
  return same_model && a.inputs_ == b.inputs_ && a.bindings_ == b.bindings_ &&
         a.trace_ == b.trace_ && a.status_ == b.status_;
}

namespace {

std::optional<Value> operand_value(const Atom& atom, const VariableDecl& lhs,
                                   const Lookup& values) {
  if (const auto* lit = std::get_if<Literal>(&atom.operand)) {
    return Value::parse(lhs.kind, lit->text);
  }
  auto it = values.find(std::get<VarRef>(atom.operand).name);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

bool holds(Comparator cmp, const Value& a, const Value& b) {
  const auto ord = compare(a, b);
  switch (cmp) {
    case Comparator::Eq: return ord == std::partial_ordering::equivalent;
    case Comparator::Ne: return ord != std::partial_ordering::equivalent;
    case Comparator::Lt: return ord == std::partial_ordering::less;
    case Comparator::Le:
      return ord == std::partial_ordering::less || ord == std::partial_ordering::equivalent;
    case Comparator::Gt: return ord == std::partial_ordering::greater;
    case Comparator::Ge:
      return ord == std::partial_ordering::greater || ord == std::partial_ordering::equivalent;
  }
  return false;
}

struct Numeric {
  Kind kind;
  long double value;
};

Numeric eval_numeric(const Expr& e, const DecisionModel& model, const Lookup& values,
                     const std::string& rule) {
  switch (e.op) {
    case Expr::Op::Literal:
      if (e.literal.type == Literal::Type::Date) {
        return {Kind::Date, static_cast<long double>(parse_iso_date(e.literal.text)->days)};
      }
      return {Kind::Number, static_cast<long double>(*parse_number(e.literal.text))};
    case Expr::Op::Var: {
      const Value& v = values.at(e.variable);
      return {v.kind(), v.numeric()};
    }
    case Expr::Op::Neg: {
      Numeric inner = eval_numeric(e.args[0], model, values, rule);
      return {inner.kind, -inner.value};
    }
    default: {
      const Numeric a = eval_numeric(e.args[0], model, values, rule);
      const Numeric b = eval_numeric(e.args[1], model, values, rule);
      const Kind kind = arithmetic_kind(e.op, a.kind, b.kind).value_or(Kind::Number);
      switch (e.op) {
        case Expr::Op::Add: return {kind, a.value + b.value};
        case Expr::Op::Sub: return {kind, a.value - b.value};
        case Expr::Op::Mul: return {kind, a.value * b.value};
        case Expr::Op::Div:
          if (b.value == 0) {
            throw Error(ErrorCode::Evaluation, "division by zero in rule '" + rule + "'");
          }
          return {kind, a.value / b.value};
        default: return {kind, 0};
      }
    }
  }
}

void collect_consumed(const Rule& rule, const Lookup& values,
                      std::vector<std::pair<std::string, Value>>& out) {
  auto add = [&](const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) return;
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const auto& p) { return p.first == name; });
    if (!seen) out.emplace_back(name, it->second);
  };
  if (rule.condition) {
    for (const Atom* atom : atoms_of(*rule.condition)) {
      add(atom->variable);
      if (const auto* ref = std::get_if<VarRef>(&atom->operand)) add(ref->name);
    }
  }
  for (const auto& name : variables_of(rule.action.value)) add(name);
}

}  // namespace

Truth evaluate_atom(const Atom& atom, const DecisionModel& model, const Lookup& values) {
  const VariableDecl* lhs = model.find_variable(atom.variable);
  if (!lhs) return Truth::Unknown;
  auto left = values.find(atom.variable);
  if (left == values.end()) return Truth::Unknown;
  auto right = operand_value(atom, *lhs, values);
  if (!right) return Truth::Unknown;
  return holds(atom.comparator, left->second, *right) ? Truth::True : Truth::False;
}

Truth evaluate_condition(const Condition& cond, const DecisionModel& model, const Lookup& values) {
  switch (cond.op) {
    case Condition::Op::Atom: return evaluate_atom(cond.atom, model, values);
    case Condition::Op::Not: {
      const Truth t = evaluate_condition(cond.children.front(), model, values);
      if (t == Truth::Unknown) return t;
      return t == Truth::True ? Truth::False : Truth::True;
    }
    case Condition::Op::And: {
      Truth acc = Truth::True;
      for (const auto& child : cond.children) {
        const Truth t = evaluate_condition(child, model, values);
        if (t == Truth::False) return Truth::False;
        if (t == Truth::Unknown) acc = Truth::Unknown;
      }
      return acc;
    }
    case Condition::Op::Or: {
      Truth acc = Truth::False;
      for (const auto& child : cond.children) {
        const Truth t = evaluate_condition(child, model, values);
        if (t == Truth::True) return Truth::True;
        if (t == Truth::Unknown) acc = Truth::Unknown;
      }
      return acc;
    }
  }
  return Truth::Unknown;
}

std::optional<Value> evaluate_action(const Rule& rule, const DecisionModel& model,
                                     const Lookup& values) {
  const VariableDecl* target = model.find_variable(rule.action.target);
  if (!target) return std::nullopt;
  const Expr& expr = rule.action.value;
  if (expr.op == Expr::Op::Literal) return Value::parse(target->kind, expr.literal.text);
  for (const auto& name : variables_of(expr)) {
    if (!values.count(name)) return std::nullopt;
  }
  if (expr.op == Expr::Op::Var && !is_ordered(target->kind)) {
    const Value& v = values.at(expr.variable);
    if (target->kind == Kind::Enum) return Value::enumeration(v.as_string());
    return v;
  }
  const Numeric n = eval_numeric(expr, model, values, rule.name);
  switch (target->kind) {
    case Kind::Money: return Value::money(round_money(n.value));
    case Kind::Number: return Value::number(static_cast<double>(n.value));
    case Kind::Date:
      return Value::date(Date{static_cast<std::int32_t>(std::llround(n.value))});
    default: return std::nullopt;
  }
}

void check_input(const DecisionModel& model, const std::string& variable, const Value& value) {
  const VariableDecl* decl = model.find_variable(variable);
  if (!decl) throw Error(ErrorCode::UnknownElement, "unknown variable '" + variable + "'");
  if (!model.is_input(variable)) {
    throw Error(ErrorCode::NotInput, "'" + variable + "' is not an input variable");
  }
  if (value.kind() != decl->kind) {
    throw Error(ErrorCode::TypeError, "'" + variable + "' expects a " +
                                          std::string(to_string(decl->kind)) + " value, got " +
                                          std::string(to_string(value.kind())));
  }
  if (!decl->domain.empty() &&
      std::find(decl->domain.begin(), decl->domain.end(), value) == decl->domain.end()) {
    throw Error(ErrorCode::TypeError,
                "value " + value.to_string() + " is outside the domain of '" + variable + "'");
  }
}

Value coerce_input(const DecisionModel& model, const std::string& variable, const std::string& text) {
  const VariableDecl* decl = model.find_variable(variable);
  if (!decl) throw Error(ErrorCode::UnknownElement, "unknown variable '" + variable + "'");
  auto value = Value::parse(decl->kind, text);
  if (!value) {
    throw Error(ErrorCode::TypeError, "'" + text + "' is not a valid " +
                                          std::string(to_string(decl->kind)) + " value for '" +
                                          variable + "'");
  }
  return *value;
}

DecisionInstance evaluate(std::shared_ptr<const DecisionModel> model, const Inputs& inputs) {
  const DecisionModel& m = *model;
  for (const auto& [name, value] : inputs) check_input(m, name, value);

  Lookup values(inputs.begin(), inputs.end());
  std::map<std::string, Binding> bindings;
  for (const auto* decl : m.variables()) {
    Binding b{decl->name, std::nullopt, Origin::Unset, {}};
    if (auto it = inputs.find(decl->name); it != inputs.end()) {
      b.value = it->second;
      b.origin = Origin::Input;
    }
    bindings.emplace(decl->name, std::move(b));
  }

  std::vector<TraceStep> trace;
  while (true) {
    std::vector<TraceStep> round;
    for (const auto& rule : m.rule_model) {
      if (values.count(rule.action.target)) continue;
      std::vector<AtomEvaluation> atoms;
      if (rule.condition) {
        if (evaluate_condition(*rule.condition, m, values) != Truth::True) continue;
        for (const Atom* atom : atoms_of(*rule.condition)) {
          atoms.push_back({print_atom(*atom), evaluate_atom(*atom, m, values)});
        }
      }
      auto produced = evaluate_action(rule, m, values);
      if (!produced) continue;
      auto same_target = std::find_if(round.begin(), round.end(), [&](const TraceStep& s) {
        return s.target == rule.action.target;
      });
      if (same_target != round.end()) {
        if (!(same_target->value == *produced)) {
          throw ModelConflict(same_target->rule, rule.name, rule.action.target);
        }
        continue;
      }
      TraceStep step;
      step.rule = rule.name;
      step.conditions = std::move(atoms);
      collect_consumed(rule, values, step.consumed);
      step.target = rule.action.target;
      step.value = *produced;
      round.push_back(std::move(step));
    }
    if (round.empty()) break;
    for (auto& step : round) {
      values.emplace(step.target, step.value);
      Binding& b = bindings.at(step.target);
      b.value = step.value;
      b.origin = Origin::Derived;
      b.rule = step.rule;
      trace.push_back(std::move(step));
    }
  }

  InstanceStatus status = InstanceStatus::Complete;
  for (const auto& out : m.output_variables()) {
    if (!values.count(out)) status = InstanceStatus::Partial;
  }
  return DecisionInstance(std::move(model), inputs, std::move(bindings), std::move(trace), status);
}

DecisionInstance evaluate_counterfactual(const DecisionInstance& instance, const Inputs& overrides) {
  const DecisionModel& m = instance.model();
  for (const auto& [name, value] : overrides) {
    if (!m.find_variable(name)) throw Error(ErrorCode::UnknownElement, "unknown variable '" + name + "'");
    if (!m.is_input(name)) {
      throw Error(ErrorCode::NotInput,
                  "cannot override '" + name + "': only input variables can change");
    }
  }
  Inputs patched = instance.inputs();
  for (const auto& [name, value] : overrides) patched.insert_or_assign(name, value);
  return evaluate(instance.model_ptr(), patched);
}

bool assignment_less(const DecisionModel& model, const Inputs& a, const Inputs& b) {
  auto key = [&](const Inputs& in) {
    std::vector<std::pair<std::string, std::size_t>> k;
    for (const auto& [name, value] : in) {
      std::size_t index = std::numeric_limits<std::size_t>::max();
      if (const auto* decl = model.find_variable(name)) {
        if (auto dom = finite_domain(*decl)) {
          auto it = std::find(dom->begin(), dom->end(), value);
          index = static_cast<std::size_t>(it - dom->begin());
        }
      }
      k.emplace_back(name, index);
    }
    return k;
  };
  return key(a) < key(b);
}

HowToResult search_how_to(std::shared_ptr<const DecisionModel> model, const Inputs& fixed,
                          const Goal& goal, std::size_t cap) {
  const DecisionModel& m = *model;
  const VariableDecl* goal_decl = m.find_variable(goal.variable);
  if (!goal_decl) {
    throw Error(ErrorCode::UnknownElement, "unknown goal variable '" + goal.variable + "'");
  }
  const bool derivable = std::any_of(m.rule_model.begin(), m.rule_model.end(), [&](const Rule& r) {
    return r.action.target == goal.variable;
  });
  if (!derivable) {
    throw Error(ErrorCode::NotDerivable, "no rule derives '" + goal.variable + "'");
  }
  if (goal.value.kind() != goal_decl->kind) {
    throw Error(ErrorCode::TypeError, "goal value for '" + goal.variable + "' must be a " +
                                          std::string(to_string(goal_decl->kind)));
  }
  for (const auto& [name, value] : fixed) check_input(m, name, value);

  std::vector<std::string> unset;
  for (const auto& name : m.input_variables()) {
    if (!fixed.count(name)) unset.push_back(name);
  }
  std::sort(unset.begin(), unset.end());

  std::vector<std::vector<Value>> domains;
  std::string unbounded;
  for (const auto& name : unset) {
    auto dom = finite_domain(*m.find_variable(name));
    if (!dom) {
      unbounded += (unbounded.empty() ? "" : ", ") + name;
      continue;
    }
    domains.push_back(std::move(*dom));
  }
  if (!unbounded.empty()) {
    throw Error(ErrorCode::UnboundedSearch,
                "cannot search over inputs without a finite domain: " + unbounded);
  }

  HowToResult result;
  result.space = 1;
  for (const auto& dom : domains) {
    if (result.space > cap / (dom.size() + 1) + 1) {
      result.space = cap + 1;
      break;
    }
    result.space *= dom.size() + 1;
  }
  if (result.space > cap) {
    throw Error(ErrorCode::SearchTooLarge, "how-to search space exceeds the cap of " +
                                               std::to_string(cap) + " combinations");
  }

  auto achieves = [&](const Inputs& assignment) {
    Inputs in = fixed;
    in.insert(assignment.begin(), assignment.end());
    try {
      auto value = evaluate(model, in).value(goal.variable);
      return value && *value == goal.value;
    } catch (const ModelConflict&) {
      return false;
    }
  };
  auto contains = [](const Inputs& outer, const Inputs& inner) {
    return std::all_of(inner.begin(), inner.end(), [&](const auto& kv) {
      auto it = outer.find(kv.first);
      return it != outer.end() && it->second == kv.second;
    });
  };

  // Grow assignments by size; anything containing a smaller hit is not
  // minimal, so every hit found at its size is minimal.
  const std::size_t n = unset.size();
  for (std::size_t size = 0; size <= n; ++size) {
    std::vector<std::size_t> chosen(size);
    for (std::size_t i = 0; i < size; ++i) chosen[i] = i;
    while (true) {
      std::vector<std::size_t> digits(size, 0);
      while (true) {
        Inputs assignment;
        for (std::size_t i = 0; i < size; ++i) {
          assignment.emplace(unset[chosen[i]], domains[chosen[i]][digits[i]]);
        }
        const bool dominated = std::any_of(result.assignments.begin(), result.assignments.end(),
                                           [&](const Inputs& hit) { return contains(assignment, hit); });
        if (!dominated) {
          ++result.searched;
          if (achieves(assignment)) result.assignments.push_back(std::move(assignment));
        }
        std::size_t d = 0;
        while (d < size && ++digits[d] == domains[chosen[d]].size()) digits[d++] = 0;
        if (d == size) break;
      }
      // next combination of `size` indices out of n
      std::size_t i = size;
      while (i > 0 && chosen[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++chosen[i - 1];
      for (std::size_t j = i; j < size; ++j) chosen[j] = chosen[j - 1] + 1;
    }
  }
  std::sort(result.assignments.begin(), result.assignments.end(),
            [&](const Inputs& a, const Inputs& b) { return assignment_less(m, a, b); });
  return result;
}

}  // namespace explaineo
