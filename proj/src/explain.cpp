#include "explaineo/explain.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

#include "explaineo/builder.hpp"
#include "explaineo/errors.hpp"

namespace explaineo {

namespace {

constexpr std::pair<QType, std::string_view> kQTypeNames[] = {
    {QType::What, "what"},       {QType::WhatIf, "what_if"},
    {QType::Why, "why"},         {QType::WhyNot, "why_not"},
    {QType::HowTo, "how_to"},    {QType::Input, "input"},
    {QType::Output, "output"},   {QType::How, "how"},
    {QType::Visualisation, "visualisation"}, {QType::Whether, "whether"},
};

}  // namespace

std::string_view to_string(QType qtype) {
  for (const auto& [q, name] : kQTypeNames) {
    if (q == qtype) return name;
  }
  return "?";
}

std::optional<QType> parse_qtype(std::string_view text) {
  for (const auto& [q, name] : kQTypeNames) {
    if (name == text) return q;
  }
  return std::nullopt;
}

const std::vector<QType>& all_qtypes() {
  static const std::vector<QType> all = [] {
    std::vector<QType> out;
    for (const auto& [q, name] : kQTypeNames) out.push_back(q);
    return out;
  }();
  return all;
}

bool requires_instance(QType qtype) {
  switch (qtype) {
    case QType::What:
    case QType::WhatIf:
    case QType::Why:
    case QType::WhyNot:
    case QType::HowTo: return true;
    default: return false;
  }
}

bool AudienceProfile::allows(QType qtype) const {
  return std::find(allowed.begin(), allowed.end(), qtype) != allowed.end();
}

const std::vector<AudienceProfile>& builtin_profiles() {
  static const std::vector<AudienceProfile> profiles = {
      {"model_expert",
       {QType::Input, QType::Output, QType::How, QType::Visualisation, QType::Whether},
       std::nullopt,
       Vocabulary::Technical},
      {"legal_support",
       {QType::What, QType::WhatIf, QType::Why, QType::WhyNot, QType::HowTo, QType::Input,
        QType::Output},
       2,
       Vocabulary::Plain},
  };
  return profiles;
}

const AudienceProfile& find_profile(const std::string& name) {
  for (const auto& p : builtin_profiles()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorCode::NotFound, "unknown profile '" + name + "'");
}

const AudienceProfile& default_profile(QType qtype) {
  for (const auto& p : builtin_profiles()) {
    if (p.allows(qtype)) return p;
  }
  return builtin_profiles().front();
}

const std::vector<QuestionSpec>& question_catalogue() {
  static const std::vector<QuestionSpec> catalogue = {
      {QType::What, "decision", "Describes what decision(s) it made and what input it used.",
       false, "", {}},
      {QType::WhatIf, "decision", "Describes the system's decision when an input value changes.",
       false, "",
       {{"<input variable>", "value", true, "one or more input overrides, variable=value"}}},
      {QType::Why, "decision",
       "Clarifies the reasoning behind the system's decision, given the input values.", true,
       "derived variable",
       {{"mode", "step|trace", false, "trace explains every step from the inputs"}}},
      {QType::WhyNot, "decision",
       "Clarifies why an alternative decision was not generated, given the input values.", true,
       "variable", {{"value", "value", true, "the alternative value"}}},
      {QType::HowTo, "decision",
       "Clarifies how to achieve a desired decision, given some (but not all necessary) input "
       "values.",
       true, "variable",
       {{"value", "value", true, "the desired value"},
        {"free", "variable list", false, "comma-separated inputs the search may change"},
        {"cap", "integer", false, "maximum number of partial assignments to search"}}},
      {QType::Input, "system", "Describes which input the system could use.", false, "service",
       {}},
      {QType::Output, "system", "Describes which decisions the system could make.", false,
       "service", {}},
      {QType::How, "system", "Clarifies how the system generally makes a certain decision.", true,
       "derived variable", {}},
      {QType::Visualisation, "system",
       "Describes a simplified view of the system's conceptual model.", false, "",
       {{"view", "object|rule|service|full", true, "which part of the model to show"},
        {"focus", "element id", false, "centre of a neighbourhood view"},
        {"radius", "integer", false, "neighbourhood radius around focus, default 1"}}},
      {QType::Whether, "system", "Clarifies whether the system meets a certain requirement.",
       false, "service",
       {{"check", "messages_used|io_paths|variables_used|variables_assigned|logical", true,
         "verification check to run"}}},
  };
  return catalogue;
}

Context Context::of(std::shared_ptr<const DecisionModel> model,
                    std::shared_ptr<const DecisionInstance> instance) {
  Context ctx;
  ctx.graph = model_graph(*model);
  ctx.model = std::move(model);
  ctx.instance = std::move(instance);
  return ctx;
}

namespace {

struct Namer {
  Vocabulary vocab;

  std::string var(const std::string& name) const {
    return vocab == Vocabulary::Plain ? name : ids::variable(name);
  }
  std::string rule(const std::string& name) const {
    return vocab == Vocabulary::Plain ? name : ids::rule(name);
  }
  std::string service(const std::string& name) const {
    return vocab == Vocabulary::Plain ? name : ids::service(name);
  }
};

const DecisionInstance& need_instance(const Context& ctx) {
  if (!ctx.instance) throw Error(ErrorCode::InvalidQuestion, "this question needs an instance");
  return *ctx.instance;
}

const VariableDecl& need_variable(const DecisionModel& model, const std::string& name) {
  const VariableDecl* decl = model.find_variable(name);
  if (!decl) throw Error(ErrorCode::UnknownElement, "unknown variable '" + name + "'");
  return *decl;
}

std::string with_unit(const DecisionModel& model, const std::string& var, const Value& value) {
  std::string out = value.to_string();
  if (const VariableDecl* decl = model.find_variable(var); decl && decl->unit) {
    out += " " + *decl->unit;
  }
  return out;
}

std::string value_or_unset(const DecisionInstance& inst, const std::string& var) {
  auto v = inst.value(var);
  return v ? v->to_string() : "";
}

Lookup lookup_of(const DecisionInstance& inst) {
  Lookup values;
  for (const auto& [name, b] : inst.bindings()) {
    if (b.value) values.emplace(name, *b.value);
  }
  return values;
}

// "a > b" rendered with the instance values: "2023-06-15 > 2023-05-01".
std::string atom_values(const Atom& atom, const Lookup& values) {
  auto side = [&](const std::string& var) {
    auto it = values.find(var);
    return it == values.end() ? std::string("unknown") : it->second.to_string();
  };
  std::string rhs;
  if (const auto* ref = std::get_if<VarRef>(&atom.operand)) {
    rhs = side(ref->name);
  } else {
    rhs = print_literal(std::get<Literal>(atom.operand));
  }
  return side(atom.variable) + " " + std::string(to_string(atom.comparator)) + " " + rhs;
}

std::string atom_text(const Atom& atom, const Namer& n) {
  if (n.vocab == Vocabulary::Plain) return print_atom(atom);
  Atom copy = atom;
  copy.variable = n.var(atom.variable);
  if (auto* ref = std::get_if<VarRef>(&copy.operand)) ref->name = n.var(ref->name);
  return print_atom(copy);
}

std::string condition_text(Condition c, const Namer& n) {
  if (n.vocab == Vocabulary::Plain) return print_condition(c);
  std::function<void(Condition&)> rename = [&](Condition& x) {
    if (x.op == Condition::Op::Atom) {
      x.atom.variable = n.var(x.atom.variable);
      if (auto* ref = std::get_if<VarRef>(&x.atom.operand)) ref->name = n.var(ref->name);
    }
    for (auto& child : x.children) rename(child);
  };
  rename(c);
  return print_condition(c);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string source_text(const SourceRef& src) { return src.label + " <" + src.uri + ">"; }

void cite(std::vector<SourceRef>& citations, const Rule& rule) {
  if (rule.source &&
      std::find(citations.begin(), citations.end(), *rule.source) == citations.end()) {
    citations.push_back(*rule.source);
  }
}

std::vector<std::string> edges_into(const PropertyGraph& g, const std::string& node,
                                    EdgeLabel label) {
  std::vector<std::string> out;
  for (const auto& eid : g.in_edges(node)) {
    if (g.find_edge(eid)->label == label) out.push_back(eid);
  }
  return out;
}

// Rule node, DERIVES edge, condition and calculation inputs, source.
void add_rule_step(ViewBuilder& view, const PropertyGraph& g, const std::string& rule,
                   const std::string& target) {
  const std::string rid = ids::rule(rule);
  view.node(rid, "focus");
  view.edge(edge_id(EdgeLabel::DERIVES, rid, ids::variable(target)), "focus");
  for (const auto& eid : edges_into(g, rid, EdgeLabel::CONDITION)) {
    view.edge(eid, g.find_edge(eid)->flag("satisfied").value_or(false) ? "satisfied" : "");
  }
  for (const auto& eid : edges_into(g, rid, EdgeLabel::CALC_INPUT)) view.edge(eid);
  for (const auto& eid : edges_into(g, rid, EdgeLabel::SOURCE_OF)) view.edge(eid);
}

struct MessageVar {
  std::string message;
  std::string variable;
};

std::vector<MessageVar> message_vars(const DecisionModel& model, bool input,
                                     const std::optional<std::string>& service) {
  std::vector<MessageVar> out;
  for (const auto& svc : model.service_model) {
    if (service && svc.name != *service) continue;
    for (const auto& msg : input ? svc.inputs : svc.outputs) {
      for (const auto& v : msg.variables) out.push_back({msg.name, v.name});
    }
  }
  return out;
}

std::vector<std::string> decision_variables(const DecisionModel& model) {
  auto out = model.output_variables();
  if (!out.empty() || !model.service_model.empty()) return out;
  for (const VariableDecl* v : model.variables()) {
    if (!model.is_input(v->name)) out.push_back(v->name);
  }
  return out;
}

}  // namespace

Answer answer_what(const Context& ctx, Vocabulary vocab) {
  const DecisionInstance& inst = need_instance(ctx);
  const DecisionModel& m = *ctx.model;
  const Namer n{vocab};
  Answer a;
  a.question.qtype = QType::What;

  Table decisions{"Decisions", {"message", "variable", "value", "status"}, {}};
  Table inputs{"Inputs", {"message", "variable", "value"}, {}};
  Table rules{"Rules used", {"rule", "derives", "value", "source"}, {}};

  auto outputs = message_vars(m, false, std::nullopt);
  if (m.service_model.empty()) {
    for (const auto& v : decision_variables(m)) outputs.push_back({"", v});
  }
  std::vector<std::string> decided, undecided;
  for (const auto& [msg, var] : outputs) {
    const Binding& b = inst.binding(var);
    decisions.rows.push_back({msg, var, value_or_unset(inst, var), std::string(to_string(b.origin))});
    if (b.value) {
      decided.push_back(n.var(var) + " = " + with_unit(m, var, *b.value));
    } else {
      undecided.push_back(n.var(var));
    }
  }
  auto ins = message_vars(m, true, std::nullopt);
  if (m.service_model.empty()) {
    for (const auto& v : m.input_variables()) ins.push_back({"", v});
  }
  std::size_t given = 0;
  for (const auto& [msg, var] : ins) {
    inputs.rows.push_back({msg, var, value_or_unset(inst, var)});
    if (inst.inputs().count(var)) ++given;
  }
  const PropertyGraph g = instantiate(ctx.graph, inst);
  ViewBuilder view(g);
  for (const auto& step : inst.trace()) {
    const Rule* rule = m.find_rule(step.rule);
    rules.rows.push_back({step.rule, step.target, step.value.to_string(),
                          rule->source ? source_text(*rule->source) : ""});
    cite(a.citations, *rule);
    view.node(ids::rule(step.rule));
  }
  for (const auto& [name, b] : inst.bindings()) {
    if (b.origin != Origin::Unset) view.node(ids::variable(name));
  }
  for (const auto& [msg, var] : outputs) {
    if (inst.binding(var).value) view.node(ids::variable(var), "focus");
  }
  for (const auto& [id, e] : g.edges()) {
    if ((e.label == EdgeLabel::DERIVES || e.label == EdgeLabel::CONDITION ||
         e.label == EdgeLabel::CALC_INPUT) &&
        view.has_node(e.from) && view.has_node(e.to)) {
      view.edge(id);
    }
  }
  a.graph_view = std::move(view).freeze();

  if (decided.empty()) {
    a.text = "The system made no decision.";
  } else {
    a.text = "The system decided " + join(decided, ", ") + ".";
  }
  if (!undecided.empty()) a.text += " It could not decide " + join(undecided, ", ") + ".";
  a.text += " It used " + std::to_string(given) + " input value(s) and " +
            std::to_string(inst.trace().size()) + " rule(s).";
  a.tables = {std::move(decisions), std::move(inputs), std::move(rules)};
  return a;
}

namespace {

const TraceStep& derived_step(const DecisionInstance& inst, const std::string& target) {
  need_variable(inst.model(), target);
  const Binding& b = inst.binding(target);
  if (b.origin == Origin::Input) {
    throw Error(ErrorCode::NotDerived, "'" + target + "' is an input: it was given, not derived");
  }
  const TraceStep* step = inst.step_for(target);
  if (b.origin != Origin::Derived || !step) {
    throw Error(ErrorCode::NotDerived,
                "'" + target + "' was not derived; ask why_not to see what is missing");
  }
  return *step;
}

// One sentence explaining a single derivation step.
std::string step_sentence(const DecisionModel& m, const TraceStep& step, const Lookup& values,
                          const Namer& n, Table* conditions, Table* calc) {
  const Rule& rule = *m.find_rule(step.rule);
  std::string out = n.var(step.target) + " = " + with_unit(m, step.target, step.value) +
                    " because rule " + n.rule(rule.name) + " applied";
  if (rule.source) out += " (" + source_text(*rule.source) + ")";
  out += ".";
  if (rule.condition) {
    std::vector<std::string> parts;
    for (const Atom* atom : atoms_of(*rule.condition)) {
      const Truth t = evaluate_atom(*atom, m, values);
      const std::string vals = atom_values(*atom, values);
      parts.push_back(atom_text(*atom, n) + " (" + vals + ")");
      if (conditions) {
        conditions->rows.push_back({rule.name, print_atom(*atom), vals, std::string(to_string(t))});
      }
    }
    if (atoms_of(*rule.condition).size() == 1) {
      out += " Its condition was satisfied: " + parts.front() + ".";
    } else {
      out += " Its conditions were satisfied: " + join(parts, "; ") + ".";
    }
  }
  if (rule.action.kind() == ActionKind::Calculation) {
    std::vector<std::string> parts;
    for (const auto& var : variables_of(rule.action.value)) {
      auto it = values.find(var);
      const std::string v = it == values.end() ? "unknown" : with_unit(m, var, it->second);
      parts.push_back(n.var(var) + " = " + v);
      if (calc) calc->rows.push_back({rule.name, var, it == values.end() ? "" : it->second.to_string()});
    }
    out += " It was calculated as " + print_expr(rule.action.value);
    if (!parts.empty()) out += " with " + join(parts, ", ");
    out += ".";
  }
  return out;
}

}  // namespace

Answer answer_why(const Context& ctx, const std::string& target, Vocabulary vocab) {
  const DecisionInstance& inst = need_instance(ctx);
  const DecisionModel& m = *ctx.model;
  const TraceStep& step = derived_step(inst, target);
  const Lookup values = lookup_of(inst);
  Answer a;
  a.question.qtype = QType::Why;
  a.question.target = target;
  Table conditions{"Conditions", {"rule", "condition", "values", "satisfied"}, {}};
  Table calc{"Calculation inputs", {"rule", "variable", "value"}, {}};
  a.text = step_sentence(m, step, values, Namer{vocab}, &conditions, &calc);
  if (m.find_rule(step.rule)->condition) a.tables.push_back(std::move(conditions));
  if (!calc.rows.empty()) a.tables.push_back(std::move(calc));
  cite(a.citations, *m.find_rule(step.rule));

  const PropertyGraph g = instantiate(ctx.graph, inst);
  ViewBuilder view(g);
  view.node(ids::variable(target), "focus");
  add_rule_step(view, g, step.rule, target);
  a.graph_view = std::move(view).freeze();
  return a;
}

Answer answer_why_trace(const Context& ctx, const std::string& target, Vocabulary vocab) {
  const DecisionInstance& inst = need_instance(ctx);
  const DecisionModel& m = *ctx.model;
  derived_step(inst, target);
  const Lookup values = lookup_of(inst);
  const Namer n{vocab};

  // Steps that contributed to the target, and the inputs they read.
  std::set<std::string> rules;
  std::set<std::string> used_inputs;
  std::vector<std::string> pending{target};
  std::set<std::string> seen;
  while (!pending.empty()) {
    const std::string var = pending.back();
    pending.pop_back();
    if (!seen.insert(var).second) continue;
    const Binding& b = inst.binding(var);
    if (b.origin == Origin::Input) {
      used_inputs.insert(var);
      continue;
    }
    const TraceStep* step = inst.step_for(var);
    if (!step) continue;
    rules.insert(step->rule);
    for (const auto& [name, value] : step->consumed) pending.push_back(name);
  }

  Answer a;
  a.question.qtype = QType::Why;
  a.question.target = target;
  a.question.parameters["mode"] = "trace";
  Table trace{"Trace", {"step", "rule", "derives", "value", "conditions"}, {}};
  Table conditions{"Conditions", {"rule", "condition", "values", "satisfied"}, {}};
  const PropertyGraph g = instantiate(ctx.graph, inst);
  ViewBuilder view(g);
  std::vector<std::string> sentences;
  for (const auto& step : inst.trace()) {
    if (!rules.count(step.rule)) continue;
    const std::size_t number = sentences.size() + 1;
    sentences.push_back(std::to_string(number) + ". " +
                        step_sentence(m, step, values, n, &conditions, nullptr));
    std::vector<std::string> conds;
    for (const auto& c : step.conditions) conds.push_back(c.atom);
    trace.rows.push_back({std::to_string(number), step.rule, step.target, step.value.to_string(),
                          join(conds, "; ")});
    cite(a.citations, *m.find_rule(step.rule));
    add_rule_step(view, g, step.rule, step.target);
  }
  std::vector<std::string> input_names;
  for (const auto& var : used_inputs) {
    input_names.push_back(n.var(var));
    view.node(ids::variable(var));
    for (const auto& eid : edges_into(g, ids::variable(var), EdgeLabel::INPUT)) view.edge(eid);
  }
  view.node(ids::variable(target), "focus");
  a.graph_view = std::move(view).freeze();
  const TraceStep& last = *inst.step_for(target);
  a.text = n.var(target) + " = " + with_unit(m, target, last.value) + " was derived in " +
           std::to_string(sentences.size()) + " step(s) from the input(s) " +
           join(input_names, ", ") + ":\n" + join(sentences, "\n");
  a.tables = {std::move(trace), std::move(conditions)};
  return a;
}

Answer answer_what_if(const Context& ctx, const std::map<std::string, std::string>& overrides,
                      Vocabulary vocab) {
  const DecisionInstance& inst = need_instance(ctx);
  const DecisionModel& m = *ctx.model;
  if (overrides.empty()) {
    throw Error(ErrorCode::InvalidQuestion, "what_if needs at least one input override");
  }
  const Namer n{vocab};
  Inputs patch;
  std::vector<std::string> changes;
  for (const auto& [var, text] : overrides) {
    need_variable(m, var);
    if (!m.is_input(var)) throw Error(ErrorCode::NotInput, "'" + var + "' is not an input");
    Value v = coerce_input(m, var, text);
    auto old = inst.value(var);
    changes.push_back(n.var(var) + " = " + with_unit(m, var, v) +
                      (old ? " instead of " + with_unit(m, var, *old) : " (was not given)"));
    patch.insert_or_assign(var, std::move(v));
  }
  const DecisionInstance after = evaluate_counterfactual(inst, patch);

  Answer a;
  a.question.qtype = QType::WhatIf;
  a.question.parameters = overrides;
  Table table{"Comparison", {"variable", "old value", "new value", "changed"}, {}};
  std::vector<std::string> changed_decisions;
  const auto decisions = decision_variables(m);
  const PropertyGraph g = instantiate(ctx.graph, after);
  ViewBuilder view(g);
  for (const VariableDecl* decl : m.variables()) {
    const auto before = inst.value(decl->name), now = after.value(decl->name);
    const bool changed = before != now;
    table.rows.push_back({decl->name, before ? before->to_string() : "",
                          now ? now->to_string() : "", changed ? "yes" : "no"});
    if (!changed) continue;
    view.node(ids::variable(decl->name), "changed");
    if (std::find(decisions.begin(), decisions.end(), decl->name) != decisions.end()) {
      changed_decisions.push_back(n.var(decl->name) + " from " +
                                  (before ? with_unit(m, decl->name, *before) : "undecided") +
                                  " to " + (now ? with_unit(m, decl->name, *now) : "undecided"));
    }
  }
  for (const auto& step : after.trace()) {
    const std::string var = ids::variable(step.target);
    if (!view.has_node(var)) continue;
    view.edge(edge_id(EdgeLabel::DERIVES, ids::rule(step.rule), var));
  }
  a.graph_view = std::move(view).freeze();
  a.text = "With " + join(changes, ", ");
  if (changed_decisions.empty()) {
    a.text += ", no decision changes.";
  } else {
    a.text += ", these decisions change: " + join(changed_decisions, "; ") + ".";
  }
  a.tables.push_back(std::move(table));
  return a;
}

Answer answer_why_not(const Context& ctx, const std::string& target,
                      const std::string& alternative, Vocabulary vocab) {
  const DecisionInstance& inst = need_instance(ctx);
  const DecisionModel& m = *ctx.model;
  const VariableDecl& decl = need_variable(m, target);
  const Namer n{vocab};
  Answer a;
  a.question.qtype = QType::WhyNot;
  a.question.target = target;
  a.question.parameters["value"] = alternative;
  Table table{"Unsatisfied conditions", {"rule", "condition", "values", "status"}, {}};

  auto alt = Value::parse(decl.kind, alternative);
  const auto actual = inst.value(target);
  if (alt && actual && *alt == *actual) {
    throw Error(ErrorCode::InvalidQuestion,
                "'" + target + "' already is " + actual->to_string() + "; ask why instead");
  }
  const bool in_domain =
      alt && (decl.domain.empty() ||
              std::find(decl.domain.begin(), decl.domain.end(), *alt) != decl.domain.end());
  std::vector<const Rule*> candidates;
  if (in_domain) {
    for (const auto& rule : m.rule_model) {
      if (rule.action.target != target) continue;
      if (rule.action.kind() == ActionKind::Calculation ||
          Value::parse(decl.kind, rule.action.value.literal.text) == alt) {
        candidates.push_back(&rule);
      }
    }
  }
  const std::string wanted = n.var(target) + " = " + alternative;
  if (candidates.empty()) {
    a.text = "The model cannot produce " + wanted + ": no rule derives that value.";
    a.tables.push_back(std::move(table));
    ViewBuilder view(ctx.graph);
    view.node(ids::variable(target), "focus");
    a.graph_view = std::move(view).freeze();
    return a;
  }

  const Lookup values = lookup_of(inst);
  const PropertyGraph g = instantiate(ctx.graph, inst);
  ViewBuilder view(g);
  view.node(ids::variable(target), "focus");
  std::vector<std::string> reasons;
  for (const Rule* rule : candidates) {
    const std::string rid = ids::rule(rule->name);
    view.node(rid);
    view.edge(edge_id(EdgeLabel::DERIVES, rid, ids::variable(target)));
    cite(a.citations, *rule);
    std::vector<std::string> failed;
    std::set<std::string> failed_vars;
    if (rule->condition) {
      for (const Atom* atom : atoms_of(*rule->condition)) {
        const Truth t = evaluate_atom(*atom, m, values);
        if (t == Truth::True) continue;
        const std::string vals = atom_values(*atom, values);
        table.rows.push_back({rule->name, print_atom(*atom), vals,
                              t == Truth::False ? "not satisfied" : "unknown"});
        failed.push_back(atom_text(*atom, n) + " (" + vals + " is " +
                         (t == Truth::False ? "false" : "unknown") + ")");
        failed_vars.insert(atom->variable);
        if (const auto* ref = std::get_if<VarRef>(&atom->operand)) failed_vars.insert(ref->name);
      }
    }
    for (const auto& eid : edges_into(g, rid, EdgeLabel::CONDITION)) {
      const bool blocking = failed_vars.count(g.node(g.find_edge(eid)->from).name()) > 0;
      view.edge(eid, blocking ? "fail" : "");
    }
    std::string reason = "rule " + n.rule(rule->name);
    if (rule->source) reason += " (" + source_text(*rule->source) + ")";
    if (!failed.empty()) {
      reason += " requires " + join(failed, " and ");
    } else if (rule->action.kind() == ActionKind::Calculation) {
      auto produced = evaluate_action(*rule, m, values);
      reason += produced ? " calculates " + produced->to_string() + " for these inputs"
                         : " lacks values for its calculation";
    } else {
      reason += " applies but another rule decided first";
    }
    reasons.push_back(reason);
  }
  a.text = n.var(target) + " is not " + alternative + " because " + join(reasons, "; ") + ".";
  a.tables.push_back(std::move(table));
  a.graph_view = std::move(view).freeze();
  return a;
}

Answer answer_how_to(const Context& ctx, const std::string& target, const std::string& value,
                     const std::vector<std::string>& free, std::size_t cap, Vocabulary vocab) {
  const DecisionInstance& inst = need_instance(ctx);
  const DecisionModel& m = *ctx.model;
  const VariableDecl& decl = need_variable(m, target);
  auto goal = Value::parse(decl.kind, value);
  if (!goal) {
    throw Error(ErrorCode::InvalidQuestion,
                "'" + value + "' is not a " + std::string(to_string(decl.kind)) + " value");
  }
  Inputs fixed = inst.inputs();
  for (const auto& var : free) {
    need_variable(m, var);
    if (!m.is_input(var)) throw Error(ErrorCode::NotInput, "'" + var + "' is not an input");
    fixed.erase(var);
  }
  HowToResult result;
  try {
    result = search_how_to(ctx.model, fixed, Goal{target, *goal}, cap);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnboundedSearch) {
      throw Error(ErrorCode::UnboundedSearch,
                  std::string(e.what()) +
                      "; declare a finite domain for it or give it a value before asking how_to");
    }
    throw;
  }
  const Namer n{vocab};
  Answer a;
  a.question.qtype = QType::HowTo;
  a.question.target = target;
  a.question.parameters["value"] = value;
  Table table{"Assignments", {"option", "variable", "value"}, {}};
  std::vector<std::string> options;
  std::set<std::string> assigned;
  for (std::size_t i = 0; i < result.assignments.size(); ++i) {
    std::vector<std::string> parts;
    for (const auto& [var, v] : result.assignments[i]) {
      table.rows.push_back({std::to_string(i + 1), var, v.to_string()});
      parts.push_back(n.var(var) + " = " + with_unit(m, var, v));
      assigned.insert(var);
    }
    options.push_back("(" + std::to_string(i + 1) + ") " +
                      (parts.empty() ? "the given input as it is" : join(parts, ", ")));
  }
  const std::string wanted = n.var(target) + " = " + with_unit(m, target, *goal);
  if (!result.reachable()) {
    a.text = wanted + " cannot be achieved by choosing the open inputs (" +
             std::to_string(result.searched) + " combinations searched).";
  } else {
    a.text = wanted + " is achieved by " + join(options, "; ") + ".";
  }
  a.tables.push_back(std::move(table));

  const auto slice = closure(ctx.graph, {ids::variable(target)},
                             {EdgeLabel::DERIVES, EdgeLabel::CONDITION, EdgeLabel::CALC_INPUT},
                             Direction::Backward);
  ViewBuilder view(ctx.graph);
  for (const auto& id : slice) view.node(id);
  for (const auto& [id, e] : ctx.graph.edges()) {
    if ((e.label == EdgeLabel::DERIVES || e.label == EdgeLabel::CONDITION ||
         e.label == EdgeLabel::CALC_INPUT) &&
        slice.count(e.from) && slice.count(e.to)) {
      view.edge(id);
    }
  }
  for (const auto& var : assigned) view.node(ids::variable(var), "assigned");
  view.node(ids::variable(target), "focus");
  a.graph_view = std::move(view).freeze();
  return a;
}

namespace {

Answer answer_messages(const Context& ctx, const std::optional<std::string>& service,
                       Vocabulary vocab, bool input) {
  const DecisionModel& m = *ctx.model;
  if (service && !m.find_service(*service)) {
    throw Error(ErrorCode::UnknownElement, "unknown service '" + *service + "'");
  }
  const Namer n{vocab};
  Answer a;
  a.question.qtype = input ? QType::Input : QType::Output;
  a.question.target = service;
  Table table{input ? "Input" : "Output", {"message", "variable", "kind", "domain", "unit"}, {}};
  ViewBuilder view(ctx.graph);
  std::vector<std::string> sentences;
  for (const auto& svc : m.service_model) {
    if (service && svc.name != *service) continue;
    view.node(ids::service(svc.name));
    std::vector<std::string> parts;
    std::size_t count = 0;
    for (const auto& msg : input ? svc.inputs : svc.outputs) {
      const std::string mid = ids::message(msg.name);
      view.edge(edge_id(EdgeLabel::HAS_MESSAGE, ids::service(svc.name), mid));
      std::vector<std::string> names;
      for (const auto& ref : msg.variables) {
        const VariableDecl& decl = *m.find_variable(ref.name);
        std::vector<std::string> domain;
        for (const auto& v : decl.domain) domain.push_back(v.to_string());
        table.rows.push_back({msg.name, decl.name, std::string(to_string(decl.kind)),
                              join(domain, ", "), decl.unit.value_or("")});
        names.push_back(n.var(decl.name));
        const std::string vid = ids::variable(decl.name);
        view.edge(input ? edge_id(EdgeLabel::INPUT, mid, vid) : edge_id(EdgeLabel::OUTPUT, vid, mid));
        ++count;
      }
      parts.push_back(msg.name + " (" + join(names, ", ") + ")");
    }
    if (parts.empty()) {
      sentences.push_back(n.service(svc.name) +
                          (input ? " takes no input." : " produces no output."));
    } else {
      sentences.push_back(n.service(svc.name) + (input ? " can use " : " can decide ") +
                          std::to_string(count) + " value(s) in " + std::to_string(parts.size()) +
                          " message(s): " + join(parts, "; ") + ".");
    }
  }
  a.text = sentences.empty() ? "The model defines no services." : join(sentences, " ");
  a.tables.push_back(std::move(table));
  a.graph_view = std::move(view).freeze();
  return a;
}

}  // namespace

Answer answer_input(const Context& ctx, const std::optional<std::string>& service,
                    Vocabulary vocab) {
  return answer_messages(ctx, service, vocab, true);
}

Answer answer_output(const Context& ctx, const std::optional<std::string>& service,
                     Vocabulary vocab) {
  return answer_messages(ctx, service, vocab, false);
}

Answer answer_how(const Context& ctx, const std::string& target, Vocabulary vocab) {
  const DecisionModel& m = *ctx.model;
  need_variable(m, target);
  const Namer n{vocab};
  std::vector<const Rule*> rules;
  for (const auto& rule : m.rule_model) {
    if (rule.action.target == target) rules.push_back(&rule);
  }
  if (rules.empty()) {
    throw Error(ErrorCode::NotDerivable, "no rule derives '" + target +
                                             "'; the variables_assigned check lists such "
                                             "variables");
  }
  Answer a;
  a.question.qtype = QType::How;
  a.question.target = target;
  Table table{"Rules", {"rule", "condition", "action", "source"}, {}};
  std::vector<std::string> parts;
  for (const Rule* rule : rules) {
    const std::string cond = rule->condition ? print_condition(*rule->condition) : "";
    const std::string action = rule->action.target + " = " + print_expr(rule->action.value);
    table.rows.push_back({rule->name, cond, action, rule->source ? source_text(*rule->source) : ""});
    std::string part = n.rule(rule->name) + ": ";
    if (rule->condition) part += "if " + condition_text(*rule->condition, n) + " then ";
    part += n.var(target) + " = " + print_expr(rule->action.value);
    if (rule->source) part += " (" + source_text(*rule->source) + ")";
    parts.push_back(part);
    cite(a.citations, *rule);
  }
  a.text = n.var(target) + " is decided by " + std::to_string(rules.size()) + " rule(s): " +
           join(parts, "; ") + ".";
  a.tables.push_back(std::move(table));

  static const std::set<EdgeLabel> kSlice = {EdgeLabel::DERIVES, EdgeLabel::CONDITION,
                                             EdgeLabel::CALC_INPUT, EdgeLabel::INPUT};
  const auto slice = closure(ctx.graph, {ids::variable(target)}, kSlice, Direction::Backward);
  a.graph_view = induced(ctx.graph, slice, kSlice);
  ViewBuilder view(a.graph_view);
  for (const auto& id : slice) view.node(id);
  for (const auto& [id, e] : a.graph_view.edges()) view.edge(id);
  view.node(ids::variable(target), "focus");
  a.graph_view = std::move(view).freeze();
  return a;
}

Answer answer_visualisation(const Context& ctx, const std::string& view_name,
                            const std::optional<std::string>& focus, std::size_t radius) {
  std::set<NodeLabel> nodes;
  std::set<EdgeLabel> edges;
  if (view_name == "object") {
    nodes = {NodeLabel::ObjectType, NodeLabel::Variable};
    edges = {EdgeLabel::RELATES_TO, EdgeLabel::HAS_VARIABLE};
  } else if (view_name == "rule") {
    nodes = {NodeLabel::ObjectType, NodeLabel::Variable, NodeLabel::Rule};
    edges = {EdgeLabel::RELATES_TO, EdgeLabel::HAS_VARIABLE, EdgeLabel::CONDITION,
             EdgeLabel::DERIVES, EdgeLabel::CALC_INPUT};
  } else if (view_name == "service") {
    nodes = {NodeLabel::Service, NodeLabel::InputMessage, NodeLabel::OutputMessage,
             NodeLabel::Variable};
    edges = {EdgeLabel::HAS_MESSAGE, EdgeLabel::INPUT, EdgeLabel::OUTPUT};
  } else if (view_name != "full") {
    throw Error(ErrorCode::InvalidQuestion,
                "unknown view '" + view_name + "' (expected object, rule, service or full)");
  }
  Answer a;
  a.question.qtype = QType::Visualisation;
  a.question.parameters["view"] = view_name;
  if (view_name == "full") {
    a.graph_view = ctx.graph;
  } else {
    a.graph_view = filter(
        ctx.graph, [&](const Node& node) { return nodes.count(node.label) > 0; },
        [&](const Edge& edge) { return edges.count(edge.label) > 0; });
  }
  if (focus) {
    a.question.parameters["focus"] = *focus;
    a.question.parameters["radius"] = std::to_string(radius);
    a.graph_view = neighbourhood(a.graph_view, *focus, radius, all_edge_labels());
  }
  return a;
}

Answer answer_whether(const Context& ctx, const std::string& check,
                      const std::optional<std::string>& service) {
  const CheckReport report = run_check(*ctx.model, check, service);
  Answer a;
  a.question.qtype = QType::Whether;
  a.question.target = service;
  a.question.parameters["check"] = check;
  a.text = report.text;
  Table table{check, {"element", "kind", "status", "detail"}, {}};
  for (const auto& row : report.table) {
    table.rows.push_back({row.element, row.kind, std::string(to_string(row.status)), row.detail});
  }
  a.tables.push_back(std::move(table));
  a.graph_view = report.graph_view;
  return a;
}

namespace {

const std::string& need_target(const Question& q) {
  if (!q.target || q.target->empty()) {
    throw Error(ErrorCode::InvalidQuestion,
                std::string(to_string(q.qtype)) + " needs a target variable");
  }
  return *q.target;
}

const std::string& need_param(const Question& q, const std::string& key) {
  auto it = q.parameters.find(key);
  if (it == q.parameters.end() || it->second.empty()) {
    throw Error(ErrorCode::InvalidQuestion,
                std::string(to_string(q.qtype)) + " needs the parameter '" + key + "'");
  }
  return it->second;
}

std::optional<std::string> param(const Question& q, const std::string& key) {
  auto it = q.parameters.find(key);
  if (it == q.parameters.end()) return std::nullopt;
  return it->second;
}

std::size_t size_param(const Question& q, const std::string& key, std::size_t fallback) {
  auto text = param(q, key);
  if (!text) return fallback;
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), out);
  if (ec != std::errc() || ptr != text->data() + text->size()) {
    throw Error(ErrorCode::InvalidQuestion, "parameter '" + key + "' must be a whole number");
  }
  return out;
}

void reject_unknown(const Question& q, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : q.parameters) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::InvalidQuestion,
                  "unknown parameter '" + key + "' for " + std::string(to_string(q.qtype)));
    }
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    std::string item = text.substr(start, end - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

}  // namespace

Answer ask(const AudienceProfile& profile, const Question& q, const Context& ctx) {
  if (!profile.allows(q.qtype)) {
    throw Error(ErrorCode::QTypeNotAllowed, "profile '" + profile.name + "' cannot ask " +
                                                std::string(to_string(q.qtype)) + " questions");
  }
  if (requires_instance(q.qtype) && !ctx.instance) {
    throw Error(ErrorCode::InvalidQuestion,
                std::string(to_string(q.qtype)) + " is about a decision and needs an instance");
  }
  const Vocabulary vocab = profile.vocabulary;
  bool trace = false;
  Answer a;
  switch (q.qtype) {
    case QType::What:
      reject_unknown(q, {});
      a = answer_what(ctx, vocab);
      break;
    case QType::WhatIf:
      a = answer_what_if(ctx, q.parameters, vocab);
      break;
    case QType::Why: {
      reject_unknown(q, {"mode"});
      const auto mode = param(q, "mode").value_or("step");
      if (mode != "step" && mode != "trace") {
        throw Error(ErrorCode::InvalidQuestion, "mode must be step or trace");
      }
      trace = mode == "trace";
      a = trace ? answer_why_trace(ctx, need_target(q), vocab)
                : answer_why(ctx, need_target(q), vocab);
      break;
    }
    case QType::WhyNot:
      reject_unknown(q, {"value"});
      a = answer_why_not(ctx, need_target(q), need_param(q, "value"), vocab);
      break;
    case QType::HowTo:
      reject_unknown(q, {"value", "free", "cap"});
      a = answer_how_to(ctx, need_target(q), need_param(q, "value"),
                        split_list(param(q, "free").value_or("")),
                        size_param(q, "cap", kDefaultSearchCap), vocab);
      break;
    case QType::Input:
      reject_unknown(q, {});
      a = answer_input(ctx, q.target, vocab);
      break;
    case QType::Output:
      reject_unknown(q, {});
      a = answer_output(ctx, q.target, vocab);
      break;
    case QType::How:
      reject_unknown(q, {});
      a = answer_how(ctx, need_target(q), vocab);
      break;
    case QType::Visualisation:
      reject_unknown(q, {"view", "focus", "radius"});
      a = answer_visualisation(ctx, need_param(q, "view"), param(q, "focus"),
                               size_param(q, "radius", 1));
      break;
    case QType::Whether:
      reject_unknown(q, {"check"});
      a = answer_whether(ctx, need_param(q, "check"), q.target);
      break;
  }
  a.question = q;
  if (profile.radius && !trace && q.target && q.qtype != QType::Visualisation) {
    const std::string centre = ids::variable(*q.target);
    if (a.graph_view.find_node(centre)) {
      a.graph_view = neighbourhood(a.graph_view, centre, *profile.radius, all_edge_labels());
    }
  }
  return a;
}

}  // namespace explaineo
