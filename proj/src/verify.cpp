#include "explaineo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "explaineo/builder.hpp"
#include "explaineo/errors.hpp"

namespace explaineo {

std::string_view to_string(RowStatus status) {
  switch (status) {
    case RowStatus::Pass: return "pass";
    case RowStatus::Fail: return "fail";
    case RowStatus::Warn: return "warn";
    case RowStatus::Unchecked: return "unchecked";
  }
  return "?";
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = {"messages_used", "io_paths", "variables_used",
                                               "variables_assigned", "logical"};
  return ids;
}

// --- condition satisfiability ---------------------------------------------

namespace {

struct Lit {
  const Atom* atom;
  Comparator cmp;
};
using Branch = std::vector<Lit>;

constexpr std::size_t kMaxBranches = 4096;
constexpr std::size_t kMaxEnumeration = 100'000;

std::string print_lit(const Lit& lit) {
  Atom copy = *lit.atom;
  copy.comparator = lit.cmp;
  return print_atom(copy);
}

// Disjunctive normal form with negations pushed into comparators. nullopt
// when the expansion exceeds kMaxBranches.
std::optional<std::vector<Branch>> dnf(const Condition& c, bool negated) {
  switch (c.op) {
    case Condition::Op::Atom:
      return std::vector<Branch>{{Lit{&c.atom, negated ? negate(c.atom.comparator)
                                                       : c.atom.comparator}}};
    case Condition::Op::Not:
      return dnf(c.children.front(), !negated);
    default: break;
  }
  const bool conjunction = (c.op == Condition::Op::And) != negated;
  std::vector<Branch> out;
  if (conjunction) out.push_back({});
  for (const auto& child : c.children) {
    auto sub = dnf(child, negated);
    if (!sub) return std::nullopt;
    if (conjunction) {
      std::vector<Branch> next;
      for (const auto& a : out) {
        for (const auto& b : *sub) {
          Branch joined = a;
          joined.insert(joined.end(), b.begin(), b.end());
          next.push_back(std::move(joined));
          if (next.size() > kMaxBranches) return std::nullopt;
        }
      }
      out = std::move(next);
    } else {
      out.insert(out.end(), sub->begin(), sub->end());
      if (out.size() > kMaxBranches) return std::nullopt;
    }
  }
  return out;
}

bool holds(Comparator cmp, std::partial_ordering ord) {
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

// One constraint over variables without a finite domain.
struct Term {
  std::string x;
  Comparator cmp;
  std::optional<std::string> y;  // variable operand
  std::optional<Value> c;        // constant operand
};

long double grid_step(Kind kind) {
  switch (kind) {
    case Kind::Date: return 1;
    case Kind::Money: return 0.01L;
    default: return 0;
  }
}

// Difference-constraint weight: u - v <= value (or < when strict).
struct Weight {
  long double value = std::numeric_limits<long double>::infinity();
  bool strict = false;
};

constexpr long double kEps = 1e-9L;

bool less(const Weight& a, const Weight& b) {
  if (std::isinf(a.value) || std::isinf(b.value)) {
    return !std::isinf(a.value) && std::isinf(b.value);
  }
  if (a.value < b.value - kEps) return true;
  if (a.value > b.value + kEps) return false;
  return a.strict && !b.strict;
}

Weight plus(const Weight& a, const Weight& b) {
  if (std::isinf(a.value) || std::isinf(b.value)) return {};
  return {a.value + b.value, a.strict || b.strict};
}

bool exactly(const Weight& w, long double v) {
  return !std::isinf(w.value) && !w.strict && std::fabs(w.value - v) <= kEps;
}

Satisfiability solve_ordered(const DecisionModel& model, const std::vector<Term>& terms) {
  std::map<std::string, std::size_t> index;
  std::vector<long double> step{0};
  for (const auto& t : terms) {
    for (const std::string* v : {&t.x, t.y ? &*t.y : nullptr}) {
      if (v && !index.count(*v)) {
        index.emplace(*v, step.size());
        step.push_back(grid_step(model.find_variable(*v)->kind));
      }
    }
  }
  const std::size_t n = step.size();
  std::vector<std::vector<Weight>> d(n, std::vector<Weight>(n));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = {0, false};
  // u - v <= w  is the edge v -> u
  auto bound = [&](std::size_t u, std::size_t v, Weight w) {
    if (less(w, d[v][u])) d[v][u] = w;
  };
  auto floor_grid = [](long double c, long double s) { return std::floor(c / s + kEps) * s; };
  auto ceil_grid = [](long double c, long double s) { return std::ceil(c / s - kEps) * s; };
  auto upper = [&](std::size_t x, long double c, bool strict) {
    const long double s = step[x];
    if (s > 0) {
      bound(x, 0, {strict ? ceil_grid(c, s) - s : floor_grid(c, s), false});
    } else {
      bound(x, 0, {c, strict});
    }
  };
  auto lower = [&](std::size_t x, long double c, bool strict) {
    const long double s = step[x];
    if (s > 0) {
      bound(0, x, {-(strict ? floor_grid(c, s) + s : ceil_grid(c, s)), false});
    } else {
      bound(0, x, {-c, strict});
    }
  };
  auto below = [&](std::size_t x, std::size_t y, bool strict) {  // x < y or x <= y
    const long double s = step[x];
    if (strict && s > 0 && s == step[y]) {
      bound(x, y, {-s, false});
    } else {
      bound(x, y, {0, strict});
    }
  };

  std::vector<std::pair<std::size_t, long double>> ne_const;
  std::vector<std::pair<std::size_t, std::size_t>> ne_var;
  for (const auto& t : terms) {
    const std::size_t x = index.at(t.x);
    if (t.c) {
      const long double c = t.c->numeric();
      switch (t.cmp) {
        case Comparator::Lt: upper(x, c, true); break;
        case Comparator::Le: upper(x, c, false); break;
        case Comparator::Gt: lower(x, c, true); break;
        case Comparator::Ge: lower(x, c, false); break;
        case Comparator::Eq: upper(x, c, false); lower(x, c, false); break;
        case Comparator::Ne: ne_const.emplace_back(x, c); break;
      }
    } else {
      const std::size_t y = index.at(*t.y);
      switch (t.cmp) {
        case Comparator::Lt: below(x, y, true); break;
        case Comparator::Le: below(x, y, false); break;
        case Comparator::Gt: below(y, x, true); break;
        case Comparator::Ge: below(y, x, false); break;
        case Comparator::Eq: below(x, y, false); below(y, x, false); break;
        case Comparator::Ne: ne_var.emplace_back(x, y); break;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::isinf(d[i][k].value)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const Weight w = plus(d[i][k], d[k][j]);
        if (less(w, d[i][j])) d[i][j] = w;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (less(d[i][i], Weight{0, false})) return Satisfiability::Unsatisfiable;
  }
  // Excluding points only matters when the rest pins the variable down.
  for (const auto& [x, c] : ne_const) {
    if (exactly(d[0][x], c) && exactly(d[x][0], -c)) return Satisfiability::Unsatisfiable;
  }
  for (const auto& [x, y] : ne_var) {
    if (exactly(d[y][x], 0) && exactly(d[x][y], 0)) return Satisfiability::Unsatisfiable;
  }
  // On a discrete grid several exclusions can exhaust a bounded range.
  std::map<std::size_t, std::size_t> exclusions;
  for (const auto& [x, c] : ne_const) ++exclusions[x];
  for (const auto& [x, y] : ne_var) {
    ++exclusions[x];
    ++exclusions[y];
  }
  for (const auto& [x, count] : exclusions) {
    if (step[x] == 0 || count < 2) continue;
    const Weight hi = d[0][x], lo = d[x][0];
    if (std::isinf(hi.value) || std::isinf(lo.value)) continue;
    const long double points = std::floor((hi.value + lo.value) / step[x] + kEps) + 1;
    if (points <= static_cast<long double>(count)) return Satisfiability::Unknown;
  }
  return Satisfiability::Satisfiable;
}

// Equality classes over text variables and constants.
Satisfiability solve_text(const std::vector<Term>& terms) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& k) {
    auto it = parent.find(k);
    if (it == parent.end() || it->second == k) return k;
    return it->second = find(it->second);
  };
  auto key = [](const Term& t) {
    return t.c ? "\x01" + t.c->as_string() : "\x02" + *t.y;
  };
  auto unite = [&](const std::string& a, const std::string& b) {
    const std::string ra = find(a), rb = find(b);
    if (ra != rb) parent[ra] = rb;
  };
  for (const auto& t : terms) {
    if (t.cmp == Comparator::Eq) unite("\x02" + t.x, key(t));
  }
  std::map<std::string, std::string> constant_of;
  for (const auto& t : terms) {
    if (!t.c) continue;
    const std::string k = key(t);
    const std::string root = find(k);
    auto [it, inserted] = constant_of.emplace(root, k);
    if (!inserted && it->second != k && t.cmp == Comparator::Eq) {
      return Satisfiability::Unsatisfiable;
    }
  }
  for (const auto& t : terms) {
    if (t.cmp == Comparator::Ne && find("\x02" + t.x) == find(key(t))) {
      return Satisfiability::Unsatisfiable;
    }
  }
  return Satisfiability::Satisfiable;
}

Satisfiability solve_branch(const DecisionModel& model, const Branch& branch) {
  std::map<std::string, std::vector<Value>> candidates;
  auto decl_of = [&](const std::string& name) { return model.find_variable(name); };
  for (const auto& lit : branch) {
    for (const std::string* v :
         {&lit.atom->variable, std::get_if<VarRef>(&lit.atom->operand)
                                   ? &std::get<VarRef>(lit.atom->operand).name
                                   : nullptr}) {
      if (!v || candidates.count(*v)) continue;
      const VariableDecl* decl = decl_of(*v);
      if (!decl) return Satisfiability::Unknown;
      if (auto fd = finite_domain(*decl)) candidates.emplace(*v, std::move(*fd));
    }
  }
  auto literal_value = [&](const Lit& lit) -> std::optional<Value> {
    return Value::parse(decl_of(lit.atom->variable)->kind,
                        std::get<Literal>(lit.atom->operand).text);
  };
  std::set<std::string> coupled;
  for (const auto& lit : branch) {
    const auto* ref = std::get_if<VarRef>(&lit.atom->operand);
    if (!ref) {
      auto it = candidates.find(lit.atom->variable);
      if (it == candidates.end()) continue;
      auto c = literal_value(lit);
      if (!c) return Satisfiability::Unknown;
      std::erase_if(it->second,
                    [&](const Value& v) { return !holds(lit.cmp, compare(v, *c)); });
      continue;
    }
    for (const std::string* v : {&lit.atom->variable, &ref->name}) {
      if (candidates.count(*v)) coupled.insert(*v);
    }
  }
  for (const auto& [name, values] : candidates) {
    if (values.empty()) return Satisfiability::Unsatisfiable;
  }
  std::vector<std::string> enumerated(coupled.begin(), coupled.end());
  std::size_t product = 1;
  for (const auto& v : enumerated) {
    product *= candidates[v].size();
    if (product > kMaxEnumeration) return Satisfiability::Unknown;
  }

  std::map<std::string, Value> assignment;
  bool unknown = false;
  auto check = [&]() -> Satisfiability {
    std::vector<Term> ordered, text;
    for (const auto& lit : branch) {
      const std::string& x = lit.atom->variable;
      const auto* ref = std::get_if<VarRef>(&lit.atom->operand);
      const bool x_finite = candidates.count(x) > 0;
      if (!ref) {
        if (x_finite) continue;
        auto c = literal_value(lit);
        if (!c) return Satisfiability::Unknown;
        Term t{x, lit.cmp, std::nullopt, *c};
        (is_ordered(decl_of(x)->kind) ? ordered : text).push_back(std::move(t));
        continue;
      }
      const bool y_finite = candidates.count(ref->name) > 0;
      if (x_finite && y_finite) {
        if (!holds(lit.cmp, compare(assignment.at(x), assignment.at(ref->name)))) {
          return Satisfiability::Unsatisfiable;
        }
        continue;
      }
      Term t = x_finite ? Term{ref->name, flip(lit.cmp), std::nullopt, assignment.at(x)}
               : y_finite ? Term{x, lit.cmp, std::nullopt, assignment.at(ref->name)}
                          : Term{x, lit.cmp, ref->name, std::nullopt};
      (is_ordered(decl_of(t.x)->kind) ? ordered : text).push_back(std::move(t));
    }
    const auto a = solve_ordered(model, ordered);
    if (a == Satisfiability::Unsatisfiable) return a;
    const auto b = solve_text(text);
    if (b == Satisfiability::Unsatisfiable) return b;
    return a == Satisfiability::Unknown ? a : b;
  };
  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i == enumerated.size()) {
      const auto r = check();
      if (r == Satisfiability::Unknown) unknown = true;
      return r == Satisfiability::Satisfiable;
    }
    for (const auto& v : candidates[enumerated[i]]) {
      assignment.insert_or_assign(enumerated[i], v);
      if (search(i + 1)) return true;
    }
    return false;
  };
  if (search(0)) return Satisfiability::Satisfiable;
  return unknown ? Satisfiability::Unknown : Satisfiability::Unsatisfiable;
}

std::vector<std::string> minimal_conflict(const DecisionModel& model, const Branch& branch) {
  for (std::size_t size = 1; size <= 2; ++size) {
    for (std::size_t i = 0; i < branch.size(); ++i) {
      if (size == 1) {
        if (solve_branch(model, {branch[i]}) == Satisfiability::Unsatisfiable) {
          return {print_lit(branch[i])};
        }
        continue;
      }
      for (std::size_t j = i + 1; j < branch.size(); ++j) {
        if (solve_branch(model, {branch[i], branch[j]}) == Satisfiability::Unsatisfiable) {
          return {print_lit(branch[i]), print_lit(branch[j])};
        }
      }
    }
  }
  std::vector<std::string> all;
  for (const auto& lit : branch) all.push_back(print_lit(lit));
  return all;
}

}  // namespace

SatResult satisfiable(const DecisionModel& model, const Condition& condition) {
  auto branches = dnf(condition, false);
  if (!branches) return {Satisfiability::Unknown, {}};
  bool unknown = false;
  std::vector<const Branch*> failed;
  for (const auto& branch : *branches) {
    const auto r = solve_branch(model, branch);
    if (r == Satisfiability::Satisfiable) return {Satisfiability::Satisfiable, {}};
    if (r == Satisfiability::Unknown) {
      unknown = true;
    } else {
      failed.push_back(&branch);
    }
  }
  if (unknown) return {Satisfiability::Unknown, {}};
  SatResult result{Satisfiability::Unsatisfiable, {}};
  for (const Branch* branch : failed) {
    for (auto& atom : minimal_conflict(model, *branch)) {
      if (std::find(result.conflict.begin(), result.conflict.end(), atom) ==
          result.conflict.end()) {
        result.conflict.push_back(std::move(atom));
      }
    }
  }
  return result;
}

// --- graph checks ---------------------------------------------------------

namespace {

std::int64_t int_property(const Properties& props, const std::string& key) {
  auto it = props.find(key);
  if (it == props.end()) return 0;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  return 0;
}

std::vector<std::string> services_in_scope(const PropertyGraph& g,
                                           const std::optional<std::string>& service) {
  if (service) {
    const std::string id = ids::service(*service);
    const Node* n = g.find_node(id);
    if (!n || n->label != NodeLabel::Service) {
      throw Error(ErrorCode::UnknownElement, "unknown service '" + *service + "'");
    }
    return {id};
  }
  std::vector<std::string> out;
  for (const Node* n : g.nodes_with(NodeLabel::Service)) out.push_back(n->id);
  return out;
}

// Messages of a service, inputs first, each in declaration order.
std::vector<const Node*> messages_of(const PropertyGraph& g, const std::string& service) {
  std::vector<const Node*> out;
  for (const auto& eid : g.out_edges(service)) {
    const Edge& e = *g.find_edge(eid);
    if (e.label == EdgeLabel::HAS_MESSAGE) out.push_back(&g.node(e.to));
  }
  std::stable_sort(out.begin(), out.end(), [](const Node* a, const Node* b) {
    const bool ai = a->label == NodeLabel::InputMessage, bi = b->label == NodeLabel::InputMessage;
    if (ai != bi) return ai;
    return int_property(a->properties, "order") < int_property(b->properties, "order");
  });
  return out;
}

// Member variable ids of a message in position order, with the edges.
std::vector<std::pair<std::string, std::string>> members_of(const PropertyGraph& g,
                                                            const Node& message) {
  const bool input = message.label == NodeLabel::InputMessage;
  std::vector<std::pair<std::int64_t, std::pair<std::string, std::string>>> out;
  for (const auto& eid : input ? g.out_edges(message.id) : g.in_edges(message.id)) {
    const Edge& e = *g.find_edge(eid);
    if (e.label != (input ? EdgeLabel::INPUT : EdgeLabel::OUTPUT)) continue;
    out.push_back({int_property(e.properties, "position"), {input ? e.to : e.from, e.id}});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::string, std::string>> vars;
  for (auto& [pos, v] : out) vars.push_back(std::move(v));
  return vars;
}

const std::set<EdgeLabel> kFlowLabels = {EdgeLabel::CONDITION, EdgeLabel::CALC_INPUT,
                                         EdgeLabel::DERIVES};

bool touches_rule(const PropertyGraph& g, const std::string& var) {
  for (const auto* list : {&g.out_edges(var), &g.in_edges(var)}) {
    for (const auto& eid : *list) {
      if (kFlowLabels.count(g.find_edge(eid)->label)) return true;
    }
  }
  return false;
}

std::string name_list(const PropertyGraph& g, const std::vector<std::string>& node_ids) {
  std::string out;
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    if (i) out += ", ";
    out += g.node(node_ids[i]).name();
  }
  return out;
}

std::string path_text(const PropertyGraph& g, const Path& p) {
  std::string out;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) out += " -> ";
    out += g.node(p.nodes[i]).name();
  }
  return out;
}

std::string scope_name(const PropertyGraph& g, const std::vector<std::string>& services) {
  if (services.size() == 1) return g.node(services.front()).name();
  return "every service";
}

void finish(CheckReport& r) {
  r.passed = std::none_of(r.table.begin(), r.table.end(),
                          [](const CheckRow& row) { return row.status == RowStatus::Fail; });
}

std::vector<std::string> failing(const CheckReport& r) {
  std::vector<std::string> out;
  for (const auto& row : r.table) {
    if (row.status == RowStatus::Fail) out.push_back(row.element);
  }
  return out;
}

}  // namespace

CheckReport check_messages_used(const PropertyGraph& g, const std::optional<std::string>& service) {
  const auto services = services_in_scope(g, service);
  CheckReport r;
  r.check = "messages_used";
  ViewBuilder view(g);
  for (const auto& svc : services) {
    view.node(svc);
    std::set<std::string> service_inputs;
    const auto messages = messages_of(g, svc);
    for (const Node* msg : messages) {
      if (msg->label != NodeLabel::InputMessage) continue;
      for (const auto& [var, eid] : members_of(g, *msg)) service_inputs.insert(var);
    }
    for (const Node* msg : messages) {
      const bool input = msg->label == NodeLabel::InputMessage;
      for (const auto& eid : g.in_edges(msg->id)) {
        if (g.find_edge(eid)->label == EdgeLabel::HAS_MESSAGE) view.edge(eid);
      }
      const auto members = members_of(g, *msg);
      std::vector<std::string> connected;
      for (const auto& [var, eid] : members) {
        view.edge(eid);
        if (touches_rule(g, var) || (!input && service_inputs.count(var))) {
          connected.push_back(var);
        }
      }
      CheckRow row{msg->id, input ? "input message" : "output message", RowStatus::Pass, ""};
      if (members.empty()) {
        row.status = RowStatus::Fail;
        row.detail = "message has no variables";
      } else if (connected.empty()) {
        row.status = RowStatus::Fail;
        row.detail = input ? "no variable of this message is read by a rule"
                           : "no variable of this message is produced by a rule";
      } else {
        row.detail = "used through " + name_list(g, connected);
      }
      if (row.status == RowStatus::Fail) view.node(msg->id, "fail");
      r.table.push_back(std::move(row));
    }
  }
  finish(r);
  const auto bad = failing(r);
  r.text = bad.empty() ? "Yes, every input and output message of " + scope_name(g, services) +
                             " is used."
                       : "No, " + std::to_string(bad.size()) + " message(s) of " +
                             scope_name(g, services) + " are not used: " + name_list(g, bad) + ".";
  r.graph_view = std::move(view).freeze();
  return r;
}

CheckReport check_io_paths(const PropertyGraph& g, const std::optional<std::string>& service) {
  const auto services = services_in_scope(g, service);
  std::vector<std::string> inputs, outputs;
  auto add = [](std::vector<std::string>& list, const std::string& v) {
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  };
  for (const auto& svc : services) {
    for (const Node* msg : messages_of(g, svc)) {
      for (const auto& [var, eid] : members_of(g, *msg)) {
        add(msg->label == NodeLabel::InputMessage ? inputs : outputs, var);
      }
    }
  }
  const std::set<std::string> input_set(inputs.begin(), inputs.end());
  const std::set<std::string> output_set(outputs.begin(), outputs.end());

  CheckReport r;
  r.check = "io_paths";
  ViewBuilder view(g);
  std::vector<std::string> unused, underivable;
  for (const auto& var : inputs) {
    const auto reach = reachable(g, {var}, output_set, kFlowLabels);
    CheckRow row{var, "input", RowStatus::Pass, ""};
    if (reach.found) {
      row.detail = "contributes to " + g.node(reach.witness.nodes.back()).name() + " via " +
                   path_text(g, reach.witness);
      view.path(reach.witness, "witness");
    } else {
      row.status = RowStatus::Fail;
      row.detail = "does not contribute to any output";
      view.node(var, "fail");
      unused.push_back(var);
    }
    r.table.push_back(std::move(row));
  }
  for (const auto& var : outputs) {
    const auto reach = reachable(g, input_set, {var}, kFlowLabels);
    CheckRow row{var, "output", RowStatus::Pass, ""};
    if (reach.found) {
      row.detail = "derived from " + g.node(reach.witness.nodes.front()).name() + " via " +
                   path_text(g, reach.witness);
      view.path(reach.witness, "witness");
    } else {
      row.status = RowStatus::Fail;
      row.detail = "cannot be derived from the inputs";
      view.node(var, "fail");
      underivable.push_back(var);
    }
    r.table.push_back(std::move(row));
  }
  finish(r);
  const std::string scope = scope_name(g, services);
  if (r.passed) {
    r.text = "Yes, for " + scope +
             " all input is used to create the output and all output can be created from "
             "the input.";
  } else {
    r.text = "No.";
    if (!underivable.empty()) {
      r.text += " These outputs cannot be derived from the input: " + name_list(g, underivable) +
                ".";
    }
    if (!unused.empty()) {
      r.text += " These inputs are not used to create any output: " + name_list(g, unused) + ".";
    }
  }
  r.graph_view = std::move(view).freeze();
  return r;
}

CheckReport check_variables_used(const PropertyGraph& g) {
  static const std::set<EdgeLabel> kUse = {EdgeLabel::CONDITION, EdgeLabel::CALC_INPUT,
                                           EdgeLabel::DERIVES, EdgeLabel::INPUT,
                                           EdgeLabel::OUTPUT};
  CheckReport r;
  r.check = "variables_used";
  ViewBuilder view(g);
  for (const Node* var : g.nodes_with(NodeLabel::Variable)) {
    std::set<std::string> uses;
    for (const auto* list : {&g.out_edges(var->id), &g.in_edges(var->id)}) {
      for (const auto& eid : *list) {
        const Edge& e = *g.find_edge(eid);
        if (kUse.count(e.label)) uses.insert(std::string(to_string(e.label)));
      }
    }
    CheckRow row{var->id, "variable", RowStatus::Pass, ""};
    if (uses.empty()) {
      row.status = RowStatus::Fail;
      row.detail = "not referenced by any rule or message";
      view.node(var->id, "fail");
    } else {
      for (const auto& u : uses) row.detail += (row.detail.empty() ? "" : ", ") + u;
      view.node(var->id);
    }
    r.table.push_back(std::move(row));
  }
  finish(r);
  const auto bad = failing(r);
  r.text = bad.empty() ? "Yes, every variable is used."
                       : "No, " + std::to_string(bad.size()) +
                             " variable(s) are not used: " + name_list(g, bad) + ".";
  r.graph_view = std::move(view).freeze();
  return r;
}

CheckReport check_variables_assigned(const PropertyGraph& g) {
  CheckReport r;
  r.check = "variables_assigned";
  ViewBuilder view(g);
  for (const Node* var : g.nodes_with(NodeLabel::Variable)) {
    std::vector<std::string> by;
    bool input = false;
    for (const auto& eid : g.in_edges(var->id)) {
      const Edge& e = *g.find_edge(eid);
      if (e.label == EdgeLabel::INPUT) input = true;
      if (e.label == EdgeLabel::DERIVES) by.push_back(e.from);
    }
    CheckRow row{var->id, "variable", RowStatus::Pass, ""};
    if (input) {
      row.detail = "given as input";
    } else if (!by.empty()) {
      row.detail = "derived by " + name_list(g, by);
    } else {
      row.status = RowStatus::Fail;
      row.detail = "neither an input nor derived by any rule";
    }
    view.node(var->id, row.status == RowStatus::Fail ? "fail" : "");
    r.table.push_back(std::move(row));
  }
  finish(r);
  const auto bad = failing(r);
  r.text = bad.empty() ? "Yes, every variable is assigned a value."
                       : "No, " + std::to_string(bad.size()) +
                             " variable(s) are never assigned a value: " + name_list(g, bad) + ".";
  r.graph_view = std::move(view).freeze();
  return r;
}

CheckReport check_logical(const DecisionModel& model) {
  const PropertyGraph g = model_graph(model);
  CheckReport r;
  r.check = "logical";
  ViewBuilder view(g);
  std::vector<std::string> contradictory;
  std::size_t unchecked = 0, warnings = 0;
  for (const auto& rule : model.rule_model) {
    const std::string id = ids::rule(rule.name);
    CheckRow row{id, "rule", RowStatus::Pass, ""};
    if (!rule.condition) {
      row.detail = "unconditional";
    } else {
      const auto sat = satisfiable(model, *rule.condition);
      switch (sat.verdict) {
        case Satisfiability::Satisfiable:
          row.detail = "condition is satisfiable";
          break;
        case Satisfiability::Unknown:
          row.status = RowStatus::Unchecked;
          row.detail = "not checked: condition is outside the decidable fragment";
          ++unchecked;
          break;
        case Satisfiability::Unsatisfiable: {
          row.status = RowStatus::Fail;
          row.detail = "contradiction:";
          for (std::size_t i = 0; i < sat.conflict.size(); ++i) {
            row.detail += (i ? " and " : " ") + sat.conflict[i];
          }
          contradictory.push_back(id);
          break;
        }
      }
    }
    const std::string_view mark = row.status == RowStatus::Fail ? "fail" : "";
    view.node(id, mark);
    for (const auto& eid : g.in_edges(id)) {
      if (g.find_edge(eid)->label == EdgeLabel::CONDITION) view.edge(eid, mark);
    }
    r.table.push_back(std::move(row));
  }
  // Rules assigning different literals to one target under jointly
  // satisfiable conditions.
  for (std::size_t i = 0; i < model.rule_model.size(); ++i) {
    const Rule& a = model.rule_model[i];
    if (a.action.kind() != ActionKind::Derivation) continue;
    for (std::size_t j = i + 1; j < model.rule_model.size(); ++j) {
      const Rule& b = model.rule_model[j];
      if (b.action.kind() != ActionKind::Derivation || a.action.target != b.action.target) continue;
      const VariableDecl* target = model.find_variable(a.action.target);
      if (!target) continue;
      auto va = Value::parse(target->kind, a.action.value.literal.text);
      auto vb = Value::parse(target->kind, b.action.value.literal.text);
      if (!va || !vb || *va == *vb) continue;
      std::vector<Condition> both;
      if (a.condition) both.push_back(*a.condition);
      if (b.condition) both.push_back(*b.condition);
      const bool overlap =
          both.empty() ||
          satisfiable(model, Condition::make(Condition::Op::And, std::move(both))).verdict !=
              Satisfiability::Unsatisfiable;
      if (!overlap) continue;
      ++warnings;
      r.table.push_back({ids::rule(a.name) + "+" + ids::rule(b.name), "rule pair", RowStatus::Warn,
                         "both may fire and assign different values to " + a.action.target});
    }
  }
  finish(r);
  if (contradictory.empty()) {
    r.text = "Yes, no rule condition contains a logical contradiction.";
  } else {
    r.text = "No, " + std::to_string(contradictory.size()) +
             " rule condition(s) can never be satisfied: " + name_list(g, contradictory) + ".";
  }
  if (unchecked) r.text += " " + std::to_string(unchecked) + " condition(s) were not checked.";
  if (warnings) {
    r.text += " " + std::to_string(warnings) + " rule pair(s) may assign conflicting values.";
  }
  r.graph_view = std::move(view).freeze();
  return r;
}

CheckReport run_check(const DecisionModel& model, const std::string& check_id,
                      const std::optional<std::string>& service) {
  if (check_id == "logical") return check_logical(model);
  const auto known = check_ids();
  if (std::find(known.begin(), known.end(), check_id) == known.end()) {
    throw Error(ErrorCode::UnknownElement, "unknown check '" + check_id + "'");
  }
  const PropertyGraph g = model_graph(model);
  if (check_id == "messages_used") return check_messages_used(g, service);
  if (check_id == "io_paths") return check_io_paths(g, service);
  if (check_id == "variables_used") return check_variables_used(g);
  return check_variables_assigned(g);
}

std::vector<CheckReport> run_all_checks(const DecisionModel& model,
                                        const std::optional<std::string>& service) {
  const PropertyGraph g = model_graph(model);
  std::vector<CheckReport> out;
  out.push_back(check_messages_used(g, service));
  out.push_back(check_io_paths(g, service));
  out.push_back(check_variables_used(g));
  out.push_back(check_variables_assigned(g));
  out.push_back(check_logical(model));
  return out;
}

}  // namespace explaineo
