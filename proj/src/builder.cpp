#include "explaineo/builder.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "explaineo/errors.hpp"

namespace explaineo {

std::string edge_id(EdgeLabel label, const std::string& from, const std::string& to) {
  return std::string(to_string(label)) + ":" + from + "->" + to;
}

bool schema_allows(EdgeLabel label, NodeLabel from, NodeLabel to) {
  switch (label) {
    case EdgeLabel::RELATES_TO: return from == NodeLabel::ObjectType && to == NodeLabel::ObjectType;
    case EdgeLabel::HAS_VARIABLE: return from == NodeLabel::ObjectType && to == NodeLabel::Variable;
    case EdgeLabel::CONDITION: return from == NodeLabel::Variable && to == NodeLabel::Rule;
    case EdgeLabel::DERIVES: return from == NodeLabel::Rule && to == NodeLabel::Variable;
    case EdgeLabel::CALC_INPUT: return from == NodeLabel::Variable && to == NodeLabel::Rule;
    case EdgeLabel::INPUT: return from == NodeLabel::InputMessage && to == NodeLabel::Variable;
    case EdgeLabel::OUTPUT: return from == NodeLabel::Variable && to == NodeLabel::OutputMessage;
    case EdgeLabel::SOURCE_OF: return from == NodeLabel::Source && to == NodeLabel::Rule;
    case EdgeLabel::HAS_MESSAGE:
      return from == NodeLabel::Service &&
             (to == NodeLabel::InputMessage || to == NodeLabel::OutputMessage);
    default: return false;
  }
}

namespace {

std::string_view literal_type_name(Literal::Type t) {
  switch (t) {
    case Literal::Type::Number: return "number";
    case Literal::Type::String: return "string";
    case Literal::Type::Date: return "date";
    case Literal::Type::Boolean: return "boolean";
  }
  return "?";
}

Literal::Type literal_type_of(const std::string& name) {
  if (name == "string") return Literal::Type::String;
  if (name == "date") return Literal::Type::Date;
  if (name == "boolean") return Literal::Type::Boolean;
  return Literal::Type::Number;
}

std::string_view expr_op_name(Expr::Op op) {
  switch (op) {
    case Expr::Op::Literal: return "literal";
    case Expr::Op::Var: return "var";
    case Expr::Op::Add: return "add";
    case Expr::Op::Sub: return "sub";
    case Expr::Op::Mul: return "mul";
    case Expr::Op::Div: return "div";
    case Expr::Op::Neg: return "neg";
  }
  return "?";
}

Expr::Op expr_op_of(const std::string& name) {
  if (name == "var") return Expr::Op::Var;
  if (name == "add") return Expr::Op::Add;
  if (name == "sub") return Expr::Op::Sub;
  if (name == "mul") return Expr::Op::Mul;
  if (name == "div") return Expr::Op::Div;
  if (name == "neg") return Expr::Op::Neg;
  return Expr::Op::Literal;
}

std::string_view cond_op_name(Condition::Op op) {
  switch (op) {
    case Condition::Op::And: return "and";
    case Condition::Op::Or: return "or";
    case Condition::Op::Not: return "not";
    default: return "atom";
  }
}

std::optional<Comparator> comparator_of(std::string_view text) {
  for (auto c : {Comparator::Eq, Comparator::Ne, Comparator::Lt, Comparator::Le, Comparator::Gt,
                 Comparator::Ge}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string print_domain(const std::vector<Value>& domain) {
  std::string out;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (i) out += ", ";
    out += print_literal(literal_of(domain[i]));
  }
  return out;
}

std::vector<std::string> split_domain(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '\\' && i + 1 < text.size()) {
        cur += text[++i];
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
      was_quoted = false;
    } else if (c != ' ' || was_quoted) {
      if (c != ' ') cur += c;
    }
  }
  if (!text.empty()) out.push_back(cur);
  return out;
}

class AsgWriter {
 public:
  explicit AsgWriter(const DecisionModel& m) : m_(m) {}

  PropertyGraph run() {
    const std::string root = "model:" + m_.name;
    b_.add_node(root, NodeLabel::Model, {{"name", m_.name}, {"version", m_.version}});
    for (std::size_t i = 0; i < m_.object_model.size(); ++i) {
      const auto& obj = m_.object_model[i];
      const std::string id = ids::object(obj.name);
      b_.add_node(id, NodeLabel::ObjectType, {{"name", obj.name}, {"order", std::int64_t(i)}});
      contain(root, id);
      for (std::size_t j = 0; j < obj.variables.size(); ++j) {
        const auto& var = obj.variables[j];
        Properties props{{"name", var.name},
                         {"kind", std::string(to_string(var.kind))},
                         {"order", std::int64_t(j)}};
        if (!var.domain.empty()) props["domain"] = print_domain(var.domain);
        if (var.unit) props["unit"] = *var.unit;
        const std::string vid = ids::variable(var.name);
        b_.add_node(vid, NodeLabel::Variable, std::move(props));
        b_.add_edge(edge_id(EdgeLabel::HAS_VARIABLE, id, vid), id, vid, EdgeLabel::HAS_VARIABLE);
      }
    }
    for (const auto& obj : m_.object_model) {
      for (std::size_t j = 0; j < obj.relations.size(); ++j) {
        const auto& rel = obj.relations[j];
        const std::string from = ids::object(obj.name), to = ids::object(rel.target);
        b_.add_edge(edge_id(EdgeLabel::RELATES_TO, from, to) + "#" + rel.name, from, to,
                    EdgeLabel::RELATES_TO, {{"name", rel.name}, {"order", std::int64_t(j)}});
      }
    }
    std::map<std::pair<std::string, std::string>, std::string> sources;
    for (std::size_t i = 0; i < m_.rule_model.size(); ++i) {
      const auto& rule = m_.rule_model[i];
      const std::string id = ids::rule(rule.name);
      Properties props{{"name", rule.name},
                       {"order", std::int64_t(i)},
                       {"target", rule.action.target},
                       {"action", rule.action.target + " = " + print_expr(rule.action.value)},
                       {"action_kind", rule.action.kind() == ActionKind::Derivation
                                           ? std::string("derivation")
                                           : std::string("calculation")}};
      if (rule.condition) props["condition"] = print_condition(*rule.condition);
      b_.add_node(id, NodeLabel::Rule, std::move(props));
      contain(root, id);
      if (rule.source) {
        auto key = std::make_pair(rule.source->label, rule.source->uri);
        auto it = sources.find(key);
        if (it == sources.end()) {
          const std::string sid = "src:" + std::to_string(sources.size() + 1);
          b_.add_node(sid, NodeLabel::Source,
                      {{"name", rule.source->label}, {"uri", rule.source->uri}});
          it = sources.emplace(key, sid).first;
        }
        b_.add_edge(edge_id(EdgeLabel::SOURCE_OF, it->second, id), it->second, id,
                    EdgeLabel::SOURCE_OF);
      }
      if (rule.condition) {
        const std::string cid = "cond:" + rule.name;
        write_condition(*rule.condition, cid);
        b_.add_edge(edge_id(EdgeLabel::HAS_CONDITION, id, cid), id, cid, EdgeLabel::HAS_CONDITION);
      }
      const std::string aid = "action:" + rule.name;
      b_.add_node(aid, NodeLabel::Action,
                  {{"name", rule.action.target + " = " + print_expr(rule.action.value)},
                   {"target", rule.action.target}});
      b_.add_edge(edge_id(EdgeLabel::HAS_ACTION, id, aid), id, aid, EdgeLabel::HAS_ACTION);
      const std::string target = ids::variable(rule.action.target);
      b_.add_edge(edge_id(EdgeLabel::ASSIGNS, aid, target), aid, target, EdgeLabel::ASSIGNS);
      const std::string eid = "expr:" + rule.name;
      write_expr(rule.action.value, eid);
      b_.add_edge(edge_id(EdgeLabel::OPERAND, aid, eid), aid, eid, EdgeLabel::OPERAND,
                  {{"index", std::int64_t(0)}});
    }
    for (std::size_t i = 0; i < m_.service_model.size(); ++i) {
      const auto& svc = m_.service_model[i];
      const std::string id = ids::service(svc.name);
      b_.add_node(id, NodeLabel::Service, {{"name", svc.name}, {"order", std::int64_t(i)}});
      contain(root, id);
      for (bool input : {true, false}) {
        const auto& msgs = input ? svc.inputs : svc.outputs;
        for (std::size_t j = 0; j < msgs.size(); ++j) {
          const auto& msg = msgs[j];
          const std::string mid = ids::message(msg.name);
          b_.add_node(mid, input ? NodeLabel::InputMessage : NodeLabel::OutputMessage,
                      {{"name", msg.name}, {"order", std::int64_t(j)}});
          b_.add_edge(edge_id(EdgeLabel::HAS_MESSAGE, id, mid), id, mid, EdgeLabel::HAS_MESSAGE);
          for (std::size_t k = 0; k < msg.variables.size(); ++k) {
            const std::string vid = ids::variable(msg.variables[k].name);
            if (input) {
              b_.add_edge(edge_id(EdgeLabel::INPUT, mid, vid), mid, vid, EdgeLabel::INPUT,
                          {{"position", std::int64_t(k)}});
            } else {
              b_.add_edge(edge_id(EdgeLabel::OUTPUT, vid, mid), vid, mid, EdgeLabel::OUTPUT,
                          {{"position", std::int64_t(k)}});
            }
          }
        }
      }
    }
    return std::move(b_).freeze();
  }

 private:
  void contain(const std::string& parent, const std::string& child) {
    b_.add_edge(edge_id(EdgeLabel::CONTAINS, parent, child), parent, child, EdgeLabel::CONTAINS);
  }

  void write_condition(const Condition& c, const std::string& id) {
    if (c.op == Condition::Op::Atom) {
      const Atom& a = c.atom;
      Properties props{{"name", print_atom(a)},
                       {"comparator", std::string(to_string(a.comparator))}};
      if (const auto* lit = std::get_if<Literal>(&a.operand)) {
        props["literal"] = lit->text;
        props["literal_type"] = std::string(literal_type_name(lit->type));
      }
      b_.add_node(id, NodeLabel::Atom, std::move(props));
      const std::string subject = ids::variable(a.variable);
      b_.add_edge(edge_id(EdgeLabel::REFERS_TO, id, subject) + "#subject", id, subject,
                  EdgeLabel::REFERS_TO, {{"role", std::string("subject")}});
      if (const auto* ref = std::get_if<VarRef>(&a.operand)) {
        const std::string operand = ids::variable(ref->name);
        b_.add_edge(edge_id(EdgeLabel::REFERS_TO, id, operand) + "#operand", id, operand,
                    EdgeLabel::REFERS_TO, {{"role", std::string("operand")}});
      }
      return;
    }
    b_.add_node(id, NodeLabel::Condition,
                {{"name", std::string(cond_op_name(c.op))}, {"op", std::string(cond_op_name(c.op))}});
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      const std::string child = id + "/" + std::to_string(i);
      write_condition(c.children[i], child);
      b_.add_edge(edge_id(EdgeLabel::OPERAND, id, child), id, child, EdgeLabel::OPERAND,
                  {{"index", std::int64_t(i)}});
    }
  }

  void write_expr(const Expr& e, const std::string& id) {
    Properties props{{"name", print_expr(e)}, {"op", std::string(expr_op_name(e.op))}};
    if (e.op == Expr::Op::Literal) {
      props["literal"] = e.literal.text;
      props["literal_type"] = std::string(literal_type_name(e.literal.type));
    }
    b_.add_node(id, NodeLabel::Expression, std::move(props));
    if (e.op == Expr::Op::Var) {
      const std::string var = ids::variable(e.variable);
      b_.add_edge(edge_id(EdgeLabel::REFERS_TO, id, var), id, var, EdgeLabel::REFERS_TO);
    }
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      const std::string child = id + "/" + std::to_string(i);
      write_expr(e.args[i], child);
      b_.add_edge(edge_id(EdgeLabel::OPERAND, id, child), id, child, EdgeLabel::OPERAND,
                  {{"index", std::int64_t(i)}});
    }
  }

  const DecisionModel& m_;
  GraphBuilder b_;
};

// --- reconstruction -------------------------------------------------------

class AsgReader {
 public:
  explicit AsgReader(const PropertyGraph& g) : g_(g) {}

  DecisionModel run() {
    auto roots = g_.nodes_with(NodeLabel::Model);
    if (roots.size() != 1) bad("expected exactly one Model node");
    const Node& root = *roots.front();
    DecisionModel m;
    m.name = root.name();
    m.version = root.text("version");
    for (const Node* obj : ordered(children(root.id, EdgeLabel::CONTAINS, NodeLabel::ObjectType))) {
      ObjectType o;
      o.name = obj->name();
      for (const Node* var : ordered(children(obj->id, EdgeLabel::HAS_VARIABLE, NodeLabel::Variable))) {
        VariableDecl v;
        v.name = var->name();
        auto kind = parse_kind(var->text("kind"));
        if (!kind) bad("variable '" + v.name + "' has no kind");
        v.kind = *kind;
        if (var->properties.count("domain")) {
          for (const auto& item : split_domain(var->text("domain"))) {
            auto value = Value::parse(v.kind, item);
            if (!value) bad("bad domain value '" + item + "'");
            v.domain.push_back(*value);
          }
        }
        if (var->properties.count("unit")) v.unit = var->text("unit");
        o.variables.push_back(std::move(v));
      }
      std::vector<std::pair<std::int64_t, Relation>> rels;
      for (const auto& eid : g_.out_edges(obj->id)) {
        const Edge& e = *g_.find_edge(eid);
        if (e.label != EdgeLabel::RELATES_TO) continue;
        rels.emplace_back(order_of(e.properties), Relation{g_.node(e.to).name(), e.text("name"), {}});
      }
      std::stable_sort(rels.begin(), rels.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [order, rel] : rels) o.relations.push_back(std::move(rel));
      m.object_model.push_back(std::move(o));
    }
    for (const Node* rn : ordered(children(root.id, EdgeLabel::CONTAINS, NodeLabel::Rule))) {
      Rule r;
      r.name = rn->name();
      for (const auto& eid : g_.in_edges(rn->id)) {
        const Edge& e = *g_.find_edge(eid);
        if (e.label != EdgeLabel::SOURCE_OF) continue;
        const Node& src = g_.node(e.from);
        r.source = SourceRef{src.name(), src.text("uri")};
      }
      auto conds = children(rn->id, EdgeLabel::HAS_CONDITION, std::nullopt);
      if (!conds.empty()) r.condition = read_condition(*conds.front());
      auto actions = children(rn->id, EdgeLabel::HAS_ACTION, NodeLabel::Action);
      if (actions.size() != 1) bad("rule '" + r.name + "' needs exactly one action");
      auto targets = children(actions.front()->id, EdgeLabel::ASSIGNS, NodeLabel::Variable);
      auto exprs = children(actions.front()->id, EdgeLabel::OPERAND, NodeLabel::Expression);
      if (targets.size() != 1 || exprs.size() != 1) bad("malformed action of '" + r.name + "'");
      r.action.target = targets.front()->name();
      r.action.value = read_expr(*exprs.front());
      m.rule_model.push_back(std::move(r));
    }
    for (const Node* sn : ordered(children(root.id, EdgeLabel::CONTAINS, NodeLabel::Service))) {
      Service s;
      s.name = sn->name();
      for (bool input : {true, false}) {
        auto msgs = ordered(children(sn->id, EdgeLabel::HAS_MESSAGE,
                                     input ? NodeLabel::InputMessage : NodeLabel::OutputMessage));
        for (const Node* mn : msgs) {
          Message msg;
          msg.name = mn->name();
          std::vector<std::pair<std::int64_t, std::string>> vars;
          const auto& eids = input ? g_.out_edges(mn->id) : g_.in_edges(mn->id);
          for (const auto& eid : eids) {
            const Edge& e = *g_.find_edge(eid);
            if (e.label != (input ? EdgeLabel::INPUT : EdgeLabel::OUTPUT)) continue;
            auto it = e.properties.find("position");
            const std::int64_t pos = it != e.properties.end() ? std::get<std::int64_t>(it->second) : 0;
            vars.emplace_back(pos, g_.node(input ? e.to : e.from).name());
          }
          std::stable_sort(vars.begin(), vars.end(),
                           [](const auto& a, const auto& b) { return a.first < b.first; });
          for (auto& [pos, name] : vars) msg.variables.push_back({name, {}});
          (input ? s.inputs : s.outputs).push_back(std::move(msg));
        }
      }
      m.service_model.push_back(std::move(s));
    }
    return m;
  }

 private:
  [[noreturn]] static void bad(const std::string& why) {
    throw Error(ErrorCode::Validation, "not an abstract syntax graph: " + why);
  }

  static std::int64_t order_of(const Properties& props) {
    auto it = props.find("order");
    if (it == props.end()) return 0;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
    return 0;
  }

  std::vector<const Node*> children(const std::string& parent, EdgeLabel label,
                                    std::optional<NodeLabel> node_label) const {
    std::vector<std::pair<std::int64_t, const Node*>> out;
    for (const auto& eid : g_.out_edges(parent)) {
      const Edge& e = *g_.find_edge(eid);
      if (e.label != label) continue;
      const Node& n = g_.node(e.to);
      if (node_label && n.label != *node_label) continue;
      auto it = e.properties.find("index");
      const std::int64_t idx = it != e.properties.end() ? std::get<std::int64_t>(it->second) : 0;
      out.emplace_back(idx, &n);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<const Node*> nodes;
    for (auto& [i, n] : out) nodes.push_back(n);
    return nodes;
  }

  static std::vector<const Node*> ordered(std::vector<const Node*> nodes) {
    std::stable_sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) {
      return order_of(a->properties) < order_of(b->properties);
    });
    return nodes;
  }

  std::string referenced(const Node& n, std::string_view role) const {
    for (const auto& eid : g_.out_edges(n.id)) {
      const Edge& e = *g_.find_edge(eid);
      if (e.label == EdgeLabel::REFERS_TO && (role.empty() || e.text("role") == role)) {
        return g_.node(e.to).name();
      }
    }
    return {};
  }

  Condition read_condition(const Node& n) const {
    if (n.label == NodeLabel::Atom) {
      Atom a;
      a.variable = referenced(n, "subject");
      auto cmp = comparator_of(n.text("comparator"));
      if (!cmp) bad("atom '" + n.id + "' has no comparator");
      a.comparator = *cmp;
      if (n.properties.count("literal")) {
        a.operand = Literal{literal_type_of(n.text("literal_type")), n.text("literal")};
      } else {
        a.operand = VarRef{referenced(n, "operand"), {}};
      }
      return Condition::make_atom(std::move(a));
    }
    const std::string op = n.text("op");
    const Condition::Op cop = op == "and" ? Condition::Op::And
                              : op == "or" ? Condition::Op::Or
                                           : Condition::Op::Not;
    std::vector<Condition> kids;
    for (const Node* child : children(n.id, EdgeLabel::OPERAND, std::nullopt)) {
      kids.push_back(read_condition(*child));
    }
    return Condition::make(cop, std::move(kids));
  }

  Expr read_expr(const Node& n) const {
    Expr e;
    e.op = expr_op_of(n.text("op"));
    if (e.op == Expr::Op::Literal) {
      e.literal = Literal{literal_type_of(n.text("literal_type")), n.text("literal")};
    } else if (e.op == Expr::Op::Var) {
      e.variable = referenced(n, "");
    }
    for (const Node* child : children(n.id, EdgeLabel::OPERAND, NodeLabel::Expression)) {
      e.args.push_back(read_expr(*child));
    }
    return e;
  }

  const PropertyGraph& g_;
};

void collect_subtree(const PropertyGraph& g, const std::string& root, std::set<std::string>& out) {
  if (!out.insert(root).second) return;
  for (const auto& eid : g.out_edges(root)) {
    const Edge& e = *g.find_edge(eid);
    if (e.label == EdgeLabel::OPERAND) collect_subtree(g, e.to, out);
  }
}

}  // namespace

PropertyGraph build_asg(const DecisionModel& model) { return AsgWriter(model).run(); }

DecisionModel model_from_asg(const PropertyGraph& asg) { return AsgReader(asg).run(); }

PropertyGraph simplify(const PropertyGraph& asg) {
  static const std::set<NodeLabel> kKept = {
      NodeLabel::ObjectType, NodeLabel::Variable,     NodeLabel::Rule,         NodeLabel::Service,
      NodeLabel::InputMessage, NodeLabel::OutputMessage, NodeLabel::Source,
  };
  static const std::set<EdgeLabel> kCopied = {
      EdgeLabel::RELATES_TO, EdgeLabel::HAS_VARIABLE, EdgeLabel::INPUT,
      EdgeLabel::OUTPUT,     EdgeLabel::SOURCE_OF,    EdgeLabel::HAS_MESSAGE,
  };
  GraphBuilder b;
  for (const auto& [id, n] : asg.nodes()) {
    if (kKept.count(n.label)) b.add_node(n.id, n.label, n.properties);
  }
  for (const auto& [id, e] : asg.edges()) {
    if (kCopied.count(e.label)) b.add_edge(e.id, e.from, e.to, e.label, e.properties);
  }
  for (const Node* rule : asg.nodes_with(NodeLabel::Rule)) {
    std::vector<std::string> cond_vars;
    std::vector<std::string> calc_vars;
    auto add = [](std::vector<std::string>& list, const std::string& v) {
      if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    };
    for (const auto& eid : asg.out_edges(rule->id)) {
      const Edge& e = *asg.find_edge(eid);
      if (e.label == EdgeLabel::HAS_CONDITION) {
        std::set<std::string> tree;
        collect_subtree(asg, e.to, tree);
        for (const auto& node : tree) {
          for (const auto& ref : asg.out_edges(node)) {
            const Edge& r = *asg.find_edge(ref);
            if (r.label == EdgeLabel::REFERS_TO) add(cond_vars, r.to);
          }
        }
      } else if (e.label == EdgeLabel::HAS_ACTION) {
        for (const auto& aeid : asg.out_edges(e.to)) {
          const Edge& a = *asg.find_edge(aeid);
          if (a.label == EdgeLabel::ASSIGNS) {
            b.add_edge(edge_id(EdgeLabel::DERIVES, rule->id, a.to), rule->id, a.to,
                       EdgeLabel::DERIVES);
          } else if (a.label == EdgeLabel::OPERAND) {
            std::set<std::string> tree;
            collect_subtree(asg, a.to, tree);
            for (const auto& node : tree) {
              for (const auto& ref : asg.out_edges(node)) {
                const Edge& r = *asg.find_edge(ref);
                if (r.label == EdgeLabel::REFERS_TO) add(calc_vars, r.to);
              }
            }
          }
        }
      }
    }
    std::sort(cond_vars.begin(), cond_vars.end());
    std::sort(calc_vars.begin(), calc_vars.end());
    for (const auto& v : cond_vars) {
      b.add_edge(edge_id(EdgeLabel::CONDITION, v, rule->id), v, rule->id, EdgeLabel::CONDITION);
    }
    for (const auto& v : calc_vars) {
      b.add_edge(edge_id(EdgeLabel::CALC_INPUT, v, rule->id), v, rule->id, EdgeLabel::CALC_INPUT);
    }
  }
  return std::move(b).freeze();
}

PropertyGraph model_graph(const DecisionModel& model) { return simplify(build_asg(model)); }

PropertyGraph instantiate(const PropertyGraph& simplified, const DecisionInstance& instance) {
  const DecisionModel& m = instance.model();
  std::size_t variables = 0, rules = 0;
  for (const auto& [id, n] : simplified.nodes()) {
    if (n.label == NodeLabel::Variable) {
      ++variables;
      if (!m.find_variable(n.name())) {
        throw Error(ErrorCode::Mismatch, "variable '" + n.name() + "' is not part of model '" +
                                             m.name + "'");
      }
    } else if (n.label == NodeLabel::Rule) {
      ++rules;
      if (!m.find_rule(n.name())) {
        throw Error(ErrorCode::Mismatch,
                    "rule '" + n.name() + "' is not part of model '" + m.name + "'");
      }
    }
  }
  if (variables != m.variables().size() || rules != m.rule_model.size()) {
    throw Error(ErrorCode::Mismatch, "graph and instance describe different models");
  }

  Lookup values;
  for (const auto& [name, b] : instance.bindings()) {
    if (b.value) values.emplace(name, *b.value);
  }

  GraphBuilder b(simplified);
  for (const auto& [id, n] : simplified.nodes()) {
    if (n.label == NodeLabel::Variable) {
      const Binding& binding = instance.binding(n.name());
      b.set_node_property(id, "origin", std::string(to_string(binding.origin)));
      if (binding.value) b.set_node_property(id, "value", binding.value->to_string());
      if (binding.origin == Origin::Derived) b.set_node_property(id, "derived_by", binding.rule);
    } else if (n.label == NodeLabel::Rule) {
      b.set_node_property(id, "fired", instance.fired(n.name()));
    }
  }
  for (const auto& [id, e] : simplified.edges()) {
    if (e.label == EdgeLabel::DERIVES) {
      b.set_edge_property(id, "active", instance.fired(simplified.node(e.from).name()));
    } else if (e.label == EdgeLabel::CONDITION) {
      const Rule* rule = m.find_rule(simplified.node(e.to).name());
      const std::string var = simplified.node(e.from).name();
      bool satisfied = rule->condition.has_value();
      if (rule->condition) {
        for (const Atom* atom : atoms_of(*rule->condition)) {
          const auto* ref = std::get_if<VarRef>(&atom->operand);
          if (atom->variable != var && !(ref && ref->name == var)) continue;
          satisfied = satisfied && evaluate_atom(*atom, m, values) == Truth::True;
        }
      }
      b.set_edge_property(id, "satisfied", satisfied);
    }
  }
  return std::move(b).freeze();
}

}  // namespace explaineo
