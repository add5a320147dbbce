#include "testkit.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/errors.hpp"
#include "explaineo/render.hpp"

namespace explaineo::testkit {

namespace fs = std::filesystem;

fs::path fixture_dir() { return fs::path(EXPLAINEO_TEST_DIR) / "fixtures"; }
fs::path golden_dir() { return fs::path(EXPLAINEO_TEST_DIR) / "golden"; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<const DecisionModel> load_fixture(const std::string& name) {
  return std::make_shared<const DecisionModel>(load_model(fixture_dir() / (name + ".dm")));
}

std::shared_ptr<const DecisionInstance> fixture_instance(const std::string& model_name,
                                                         const std::string& inputs_name) {
  auto model = load_fixture(model_name);
  const Json doc = Json::parse(read_text(fixture_dir() / (inputs_name + ".json")));
  return std::make_shared<const DecisionInstance>(evaluate(model, inputs_from_json(*model, doc)));
}

namespace {

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

int uniform(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

void collect_condition_vars(const Condition& c, std::set<std::string>& out) {
  for (const Atom* a : atoms_of(c)) {
    out.insert(a->variable);
    if (const auto* ref = std::get_if<VarRef>(&a->operand)) out.insert(ref->name);
  }
}

}  // namespace

// ----- reachability ---------------------------------------------------------

std::string random_structure_model(std::mt19937& rng, int max_vars, int max_rules) {
  const int nv = uniform(rng, 2, max_vars);
  const int nr = uniform(rng, 0, max_rules);
  std::vector<bool> numeric(nv);
  std::vector<int> numbers, booleans;
  for (int i = 0; i < nv; ++i) {
    numeric[i] = chance(rng, 0.5);
    (numeric[i] ? numbers : booleans).push_back(i);
  }
  auto name = [](int i) { return "v" + std::to_string(i); };

  std::ostringstream out;
  out << "model random_structure version \"1\"\n";
  const int objects = uniform(rng, 1, 4);
  for (int o = 0; o < objects; ++o) {
    out << "object O" << o << " {\n";
    for (int i = o; i < nv; i += objects) {
      out << "  " << name(i) << ": " << (numeric[i] ? "number" : "boolean") << "\n";
    }
    if (o + 1 < objects && chance(rng, 0.5)) out << "  relates_to O" << o + 1 << " as next\n";
    out << "}\n";
  }

  for (int r = 0; r < nr; ++r) {
    const int target = uniform(rng, 0, nv - 1);
    out << "rule r" << r << "\n";
    const int atoms = uniform(rng, 0, 3);
    for (int a = 0; a < atoms; ++a) {
      out << (a == 0 ? "  if " : " and ");
      const int v = uniform(rng, 0, nv - 1);
      if (numeric[v]) {
        if (numbers.size() > 1 && chance(rng, 0.4)) {
          out << name(v) << " < " << name(pick(rng, numbers));
        } else {
          out << name(v) << " > " << uniform(rng, 0, 9);
        }
      } else if (booleans.size() > 1 && chance(rng, 0.3)) {
        out << name(v) << " = " << name(pick(rng, booleans));
      } else {
        out << name(v) << (chance(rng, 0.5) ? " = true" : " != false");
      }
    }
    if (atoms > 0) out << "\n";
    out << "  then " << name(target) << " = ";
    if (!numeric[target]) {
      out << (chance(rng, 0.5) ? "true" : "false");
    } else if (chance(rng, 0.3)) {
      out << uniform(rng, 0, 99);
    } else {
      const int terms = uniform(rng, 1, 3);
      for (int t = 0; t < terms; ++t) {
        if (t) out << (chance(rng, 0.5) ? " + " : " * ");
        out << name(pick(rng, numbers));
      }
    }
    out << "\n";
  }

  const int services = uniform(rng, 0, 2);
  for (int s = 0; s < services; ++s) {
    out << "service S" << s << " {\n";
    for (const char* dir : {"in", "out"}) {
      // A variable appears at most once per direction within a service.
      std::set<int> taken;
      const int messages = std::min(uniform(rng, 1, 2), nv);
      for (int m = 0; m < messages; ++m) {
        std::set<int> members;
        const int count = uniform(rng, 1, std::min(nv - static_cast<int>(taken.size()) - (messages - m - 1), 4));
        while (static_cast<int>(members.size()) < count) {
          const int v = uniform(rng, 0, nv - 1);
          if (taken.insert(v).second) members.insert(v);
        }
        out << "  " << dir << " S" << s << "_" << dir << m << "(";
        bool first = true;
        for (int v : members) {
          out << (first ? "" : ", ") << name(v);
          first = false;
        }
        out << ")\n";
      }
    }
    out << "}\n";
  }
  return out.str();
}

std::map<std::string, std::map<std::string, RowStatus>> structural_oracle(const DecisionModel& model) {
  std::vector<std::string> vars;
  for (const auto* v : model.variables()) vars.push_back(v->name);
  const std::size_t n = vars.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[vars[i]] = i;

  // reach[i][j]: j depends on i through a chain of rules (reflexive).
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  std::set<std::string> touches_rule, targets;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& rule : model.rule_model) {
    std::set<std::string> sources;
    if (rule.condition) collect_condition_vars(*rule.condition, sources);
    for (const auto& v : variables_of(rule.action.value)) sources.insert(v);
    for (const auto& s : sources) reach[index.at(s)][index.at(rule.action.target)] = true;
    touches_rule.insert(sources.begin(), sources.end());
    touches_rule.insert(rule.action.target);
    targets.insert(rule.action.target);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }

  std::map<std::string, std::map<std::string, RowStatus>> out;
  auto& messages = out["messages_used"];
  auto& io = out["io_paths"];
  auto& used = out["variables_used"];
  auto& assigned = out["variables_assigned"];

  std::set<std::string> all_inputs, all_outputs, in_message;
  for (const auto& svc : model.service_model) {
    std::set<std::string> service_inputs;
    for (const auto& m : svc.inputs) {
      for (const auto& v : m.variables) service_inputs.insert(v.name);
    }
    for (const auto* list : {&svc.inputs, &svc.outputs}) {
      const bool input = list == &svc.inputs;
      for (const auto& m : *list) {
        bool ok = false;
        for (const auto& v : m.variables) {
          in_message.insert(v.name);
          (input ? all_inputs : all_outputs).insert(v.name);
          if (touches_rule.count(v.name) || (!input && service_inputs.count(v.name))) ok = true;
        }
        messages[row_key(input ? "input message" : "output message", ids::message(m.name))] =
            ok ? RowStatus::Pass : RowStatus::Fail;
      }
    }
  }
  for (const auto& i : all_inputs) {
    bool ok = false;
    for (const auto& o : all_outputs) ok = ok || reach[index.at(i)][index.at(o)];
    io[row_key("input", ids::variable(i))] = ok ? RowStatus::Pass : RowStatus::Fail;
  }
  for (const auto& o : all_outputs) {
    bool ok = false;
    for (const auto& i : all_inputs) ok = ok || reach[index.at(i)][index.at(o)];
    io[row_key("output", ids::variable(o))] = ok ? RowStatus::Pass : RowStatus::Fail;
  }
  for (const auto& v : vars) {
    used[row_key("variable", ids::variable(v))] =
        touches_rule.count(v) || in_message.count(v) ? RowStatus::Pass : RowStatus::Fail;
    assigned[row_key("variable", ids::variable(v))] =
        all_inputs.count(v) || targets.count(v) ? RowStatus::Pass : RowStatus::Fail;
  }
  return out;
}

std::string row_key(const std::string& kind, const std::string& element) {
  return kind + " " + element;
}

std::map<std::string, RowStatus> row_statuses(const CheckReport& report) {
  std::map<std::string, RowStatus> out;
  for (const auto& row : report.table) {
    const std::string key = row_key(row.kind, row.element);
    // One row per (kind, element); a duplicate can never match the oracle.
    out[out.count(key) ? key + " #duplicate" : key] = row.status;
  }
  return out;
}

// ----- logic ----------------------------------------------------------------

namespace {

const std::vector<std::string> kBools = {"b0", "b1", "b2", "b3"};
const std::map<std::string, std::vector<std::string>> kEnums = {
    {"e0", {"a", "b"}}, {"e1", {"a", "b", "c"}}, {"e2", {"a", "b", "c"}}};

std::string random_logic_atom(std::mt19937& rng, const std::vector<std::string>& pool) {
  const std::string v = pick(rng, pool);
  if (v[0] == 'b') {
    switch (uniform(rng, 0, 4)) {
      case 0: return v;
      case 1: return v + " = true";
      case 2: return v + " = false";
      case 3: return v + " != true";
      default: {
        std::string w = pick(rng, kBools);
        return v + (chance(rng, 0.5) ? " = " : " != ") + w;
      }
    }
  }
  const auto& dom = kEnums.at(v);
  if (v != "e0" && chance(rng, 0.25)) {
    return v + (chance(rng, 0.5) ? " = " : " != ") + (v == "e1" ? "e2" : "e1");
  }
  return v + (chance(rng, 0.5) ? " = \"" : " != \"") + pick(rng, dom) + "\"";
}

std::string random_logic_condition(std::mt19937& rng, const std::vector<std::string>& pool,
                                   int depth) {
  if (depth == 0 || chance(rng, 0.3)) return random_logic_atom(rng, pool);
  switch (uniform(rng, 0, 2)) {
    case 0: return "not (" + random_logic_condition(rng, pool, depth - 1) + ")";
    default: {
      const char* op = chance(rng, 0.5) ? " and " : " or ";
      const int parts = uniform(rng, 2, 3);
      std::string out = "(";
      for (int i = 0; i < parts; ++i) {
        if (i) out += op;
        out += random_logic_condition(rng, pool, depth - 1);
      }
      return out + ")";
    }
  }
}

}  // namespace

std::string random_logic_model(std::mt19937& rng, int rules) {
  std::ostringstream out;
  out << "model random_logic version \"1\"\n";
  out << "object L {\n";
  for (const auto& b : kBools) out << "  " << b << ": boolean\n";
  for (const auto& [e, dom] : kEnums) {
    out << "  " << e << ": enum in [";
    for (std::size_t i = 0; i < dom.size(); ++i) out << (i ? ", " : "") << "\"" << dom[i] << "\"";
    out << "]\n";
  }
  out << "  result: boolean\n}\n";
  std::vector<std::string> all = kBools;
  for (const auto& [e, dom] : kEnums) all.push_back(e);
  for (int r = 0; r < rules; ++r) {
    // Few variables per rule so contradictions actually occur.
    std::vector<std::string> pool;
    const int size = uniform(rng, 1, 3);
    for (int i = 0; i < size; ++i) pool.push_back(pick(rng, all));
    out << "rule r" << r << "\n  if " << random_logic_condition(rng, pool, uniform(rng, 1, 3))
        << "\n  then result = true\n";
  }
  return out.str();
}

namespace {

bool eval_condition(const Condition& c, const DecisionModel& model,
                    const std::map<std::string, Value>& env) {
  switch (c.op) {
    case Condition::Op::Not: return !eval_condition(c.children.at(0), model, env);
    case Condition::Op::And:
      for (const auto& ch : c.children) {
        if (!eval_condition(ch, model, env)) return false;
      }
      return true;
    case Condition::Op::Or:
      for (const auto& ch : c.children) {
        if (eval_condition(ch, model, env)) return true;
      }
      return false;
    case Condition::Op::Atom: break;
  }
  const Atom& a = c.atom;
  const Value& lhs = env.at(a.variable);
  Value rhs = lhs;
  if (const auto* ref = std::get_if<VarRef>(&a.operand)) {
    rhs = env.at(ref->name);
  } else {
    rhs = *Value::parse(lhs.kind(), std::get<Literal>(a.operand).text);
  }
  switch (a.comparator) {
    case Comparator::Eq: return lhs == rhs;
    case Comparator::Ne: return !(lhs == rhs);
    default: throw std::logic_error("ordered comparator in a finite-domain oracle");
  }
}

}  // namespace

bool truth_table_satisfiable(const DecisionModel& model, const Condition& cond) {
  std::set<std::string> names;
  collect_condition_vars(cond, names);
  std::vector<std::string> vars(names.begin(), names.end());
  std::vector<std::vector<Value>> domains;
  for (const auto& v : vars) {
    const VariableDecl* decl = model.find_variable(v);
    if (decl->kind == Kind::Boolean) {
      domains.push_back({Value::boolean(false), Value::boolean(true)});
    } else {
      domains.push_back(decl->domain);
    }
  }
  std::vector<std::size_t> digit(vars.size(), 0);
  while (true) {
    std::map<std::string, Value> env;
    for (std::size_t i = 0; i < vars.size(); ++i) env.insert_or_assign(vars[i], domains[i][digit[i]]);
    if (eval_condition(cond, model, env)) return true;
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (++digit[i] < domains[i].size()) break;
      digit[i] = 0;
    }
    if (i == vars.size()) return false;
  }
}

// ----- engine ---------------------------------------------------------------

std::string random_engine_model(std::mt19937& rng) {
  std::ostringstream out;
  out << "model random_engine version \"1\"\n"
      << "object In {\n"
      << "  b0: boolean\n  b1: boolean\n  b2: boolean\n"
      << "  e0: enum in [\"low\", \"mid\", \"high\"]\n"
      << "  n0: number in [0, 5, 10]\n  n1: number in [1, 2]\n}\n"
      << "object Out {\n"
      << "  d0: boolean\n  d1: boolean\n  d2: boolean\n"
      << "  m0: number\n  m1: number\n"
      << "  k0: enum in [\"x\", \"y\"]\n}\n";

  // Derived variables in dependency order; each may read inputs and the
  // ones before it.
  const std::vector<std::string> derived = {"d0", "m0", "k0", "d1", "m1", "d2"};
  std::vector<std::string> bool_pool = {"b0", "b1", "b2"};
  std::vector<std::string> num_pool = {"n0", "n1"};
  std::vector<std::string> enum_pool = {"e0"};
  int rule_no = 0;
  auto atom = [&]() -> std::string {
    switch (uniform(rng, 0, 2)) {
      case 0: return pick(rng, bool_pool) + (chance(rng, 0.5) ? " = true" : " = false");
      case 1: {
        const std::string v = pick(rng, num_pool);
        static const std::vector<std::string> cmp = {" > ", " >= ", " < ", " <= ", " = ", " != "};
        return v + pick(rng, cmp) + std::to_string(uniform(rng, 0, 12));
      }
      default: {
        const std::string v = pick(rng, enum_pool);
        if (v == "k0") return v + (chance(rng, 0.5) ? " = \"x\"" : " != \"y\"");
        static const std::vector<std::string> vals = {"low", "mid", "high"};
        return v + (chance(rng, 0.5) ? " = \"" : " != \"") + pick(rng, vals) + "\"";
      }
    }
  };
  auto condition = [&]() {
    std::string c = atom();
    const int more = uniform(rng, 0, 2);
    for (int i = 0; i < more; ++i) c += (chance(rng, 0.6) ? " and " : " or ") + atom();
    return c;
  };
  auto value_for = [&](const std::string& target, int variant) -> std::string {
    if (target[0] == 'd') return variant ? "false" : "true";
    if (target[0] == 'k') return variant ? "\"y\"" : "\"x\"";
    if (chance(rng, 0.3)) return std::to_string(uniform(rng, 0, 20));
    std::string e = pick(rng, num_pool);
    const int terms = uniform(rng, 0, 2);
    for (int i = 0; i < terms; ++i) {
      e += pick(rng, std::vector<std::string>{" + ", " - ", " * "}) + pick(rng, num_pool);
    }
    return e;
  };

  for (const auto& target : derived) {
    const std::string cond = condition();
    out << "rule r" << rule_no++ << "\n  if " << cond << "\n  then " << target << " = "
        << value_for(target, 0) << "\n";
    if (chance(rng, 0.6)) {
      out << "rule r" << rule_no++ << "\n  if not (" << cond << ")\n  then " << target << " = "
          << value_for(target, 1) << "\n";
    }
    switch (target[0]) {
      case 'd': bool_pool.push_back(target); break;
      case 'm': num_pool.push_back(target); break;
      default: enum_pool.push_back(target);
    }
  }
  out << "service Engine {\n"
      << "  in Given(b0, b1, b2, e0, n0, n1)\n"
      << "  out Decided(d0, d1, d2, m0, m1, k0)\n}\n";
  return out.str();
}

Inputs random_inputs(std::mt19937& rng, const DecisionModel& model, double keep) {
  Inputs out;
  for (const auto& name : model.input_variables()) {
    if (!chance(rng, keep)) continue;
    const auto dom = finite_domain(*model.find_variable(name));
    if (!dom) throw std::logic_error("input '" + name + "' has no finite domain");
    out.insert_or_assign(name, pick(rng, *dom));
  }
  return out;
}

std::string replay_trace(const DecisionInstance& instance) {
  const DecisionModel& model = instance.model();
  Lookup current(instance.inputs().begin(), instance.inputs().end());
  std::size_t n = 0;
  for (const auto& step : instance.trace()) {
    const std::string where = "step " + std::to_string(++n) + " (" + step.rule + "): ";
    const Rule* rule = model.find_rule(step.rule);
    if (!rule) return where + "unknown rule";
    if (rule->action.target != step.target) return where + "target differs from the rule";
    if (current.count(step.target)) return where + "target already bound";
    if (rule->condition && evaluate_condition(*rule->condition, model, current) != Truth::True) {
      return where + "condition does not hold at this point";
    }
    for (const auto& [var, value] : step.consumed) {
      auto it = current.find(var);
      if (it == current.end() || !(it->second == value)) {
        return where + "consumed value of " + var + " differs from the replayed binding";
      }
    }
    const auto value = evaluate_action(*rule, model, current);
    if (!value || !(*value == step.value)) return where + "action does not reproduce the value";
    current.insert_or_assign(step.target, *value);
  }
  std::map<std::string, Value> replayed;
  for (const auto& [k, v] : current) {
    if (!instance.inputs().count(k)) replayed.insert_or_assign(k, v);
  }
  if (replayed != instance.derived()) return "replayed bindings differ from the derived ones";
  for (const auto& [name, b] : instance.bindings()) {
    const bool bound = current.count(name) > 0;
    if (bound != b.value.has_value()) return "binding of " + name + " disagrees with the replay";
  }
  return {};
}

std::vector<Inputs> brute_force_how_to(std::shared_ptr<const DecisionModel> model,
                                       const Inputs& fixed, const Goal& goal) {
  std::vector<std::string> unset;
  std::vector<std::vector<Value>> domains;
  for (const auto& name : model->input_variables()) {
    if (fixed.count(name)) continue;
    unset.push_back(name);
    domains.push_back(*finite_domain(*model->find_variable(name)));
  }
  std::vector<Inputs> hits;
  // digit 0 = leave unset, k = domain value k-1
  std::vector<std::size_t> digit(unset.size(), 0);
  while (true) {
    Inputs assignment;
    for (std::size_t i = 0; i < unset.size(); ++i) {
      if (digit[i]) assignment.insert_or_assign(unset[i], domains[i][digit[i] - 1]);
    }
    Inputs all = fixed;
    all.insert(assignment.begin(), assignment.end());
    bool hit = false;
    try {
      const auto v = evaluate(model, all).value(goal.variable);
      hit = v && *v == goal.value;
    } catch (const ModelConflict&) {
    }
    if (hit) hits.push_back(std::move(assignment));
    std::size_t i = 0;
    for (; i < unset.size(); ++i) {
      if (++digit[i] <= domains[i].size()) break;
      digit[i] = 0;
    }
    if (i == unset.size()) break;
  }
  auto within = [](const Inputs& inner, const Inputs& outer) {
    for (const auto& [k, v] : inner) {
      auto it = outer.find(k);
      if (it == outer.end() || !(it->second == v)) return false;
    }
    return true;
  };
  std::vector<Inputs> minimal;
  for (const auto& h : hits) {
    const bool dominated = std::any_of(hits.begin(), hits.end(), [&](const Inputs& g) {
      return g.size() < h.size() && within(g, h);
    });
    if (!dominated) minimal.push_back(h);
  }
  std::sort(minimal.begin(), minimal.end(),
            [&](const Inputs& a, const Inputs& b) { return assignment_less(*model, a, b); });
  return minimal;
}

// ----- graphs ---------------------------------------------------------------

PropertyGraph random_graph(std::mt19937& rng) {
  static const std::vector<std::string> fragments = {
      "a", "Zeta", "x y", "q\"uote", "back\\slash", "new\nline", "tab\there", "é", "{}", ":", "-", "7"};
  static const std::vector<std::string> keys = {"name", "value", "order", "has space", "w2", "ø"};
  auto text = [&]() {
    std::string s;
    const int parts = uniform(rng, 0, 3);
    for (int i = 0; i < parts; ++i) s += pick(rng, fragments);
    return s;
  };
  auto property = [&]() -> PropertyValue {
    switch (uniform(rng, 0, 5)) {
      case 0: return std::monostate{};
      case 1: return chance(rng, 0.5);
      case 2: return static_cast<std::int64_t>(uniform(rng, -1'000'000, 1'000'000)) *
                     (chance(rng, 0.2) ? 1'000'000'000LL : 1LL);
      case 3: {
        static const std::vector<double> specials = {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e300, 6.02e-23, 49.315068493150683};
        return chance(rng, 0.5) ? pick(rng, specials)
                                : std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
      }
      default: return text();
    }
  };
  static const std::vector<NodeLabel> node_labels = {
      NodeLabel::ObjectType, NodeLabel::Variable,      NodeLabel::Rule,   NodeLabel::Service,
      NodeLabel::InputMessage, NodeLabel::OutputMessage, NodeLabel::Source, NodeLabel::Model,
      NodeLabel::Condition,  NodeLabel::Atom,          NodeLabel::Action, NodeLabel::Expression};
  static const std::vector<EdgeLabel> edge_labels = {
      EdgeLabel::RELATES_TO, EdgeLabel::HAS_VARIABLE, EdgeLabel::CONDITION,
      EdgeLabel::DERIVES,    EdgeLabel::CALC_INPUT,   EdgeLabel::INPUT,
      EdgeLabel::OUTPUT,     EdgeLabel::SOURCE_OF,    EdgeLabel::HAS_MESSAGE,
      EdgeLabel::CONTAINS,   EdgeLabel::HAS_CONDITION, EdgeLabel::HAS_ACTION,
      EdgeLabel::OPERAND,    EdgeLabel::REFERS_TO,    EdgeLabel::ASSIGNS};

  GraphBuilder b;
  std::vector<std::string> ids;
  const int nodes = uniform(rng, 0, 25);
  for (int i = 0; i < nodes; ++i) {
    std::string id = "n" + std::to_string(i) + "/" + text();
    Properties props;
    const int np = uniform(rng, 0, 4);
    for (int p = 0; p < np; ++p) props[pick(rng, keys)] = property();
    b.add_node(id, pick(rng, node_labels), std::move(props));
    ids.push_back(id);
  }
  if (!ids.empty()) {
    const int edges = uniform(rng, 0, 40);
    for (int i = 0; i < edges; ++i) {
      Properties props;
      const int np = uniform(rng, 0, 3);
      for (int p = 0; p < np; ++p) props[pick(rng, keys)] = property();
      b.add_edge("e" + std::to_string(i) + "/" + text(), pick(rng, ids), pick(rng, ids),
                 pick(rng, edge_labels), std::move(props));
    }
  }
  return std::move(b).freeze();
}

// ----- answers --------------------------------------------------------------

namespace {

bool is_string_array(const Json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_string(); });
}

bool word_in(const std::string& text, const std::string& word) {
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  for (std::size_t at = text.find(word); at != std::string::npos; at = text.find(word, at + 1)) {
    const bool left = at == 0 || !ident(text[at - 1]);
    const std::size_t end = at + word.size();
    const bool right = end == text.size() || !ident(text[end]);
    if (left && right) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> answer_problems(const Json& a, const PropertyGraph& context_graph,
                                         const DecisionModel& model) {
  std::vector<std::string> p;
  static const std::vector<std::string> keys = {"question", "text", "tables", "graph_view",
                                                "citations"};
  if (!a.is_object()) return {"answer is not an object"};
  for (const auto& k : keys) {
    if (!a.contains(k)) p.push_back("missing '" + k + "'");
  }
  if (!p.empty()) return p;
  if (a.size() != keys.size()) p.push_back("unexpected extra fields");

  const Json& q = a["question"];
  if (!q.is_object() || !q.contains("qtype") || !q["qtype"].is_string() ||
      !parse_qtype(q["qtype"].get<std::string>())) {
    p.push_back("question.qtype invalid");
  }
  if (!q.contains("target") || !(q["target"].is_null() || q["target"].is_string())) {
    p.push_back("question.target must be string or null");
  }
  if (!q.contains("parameters") || !q["parameters"].is_object()) {
    p.push_back("question.parameters must be an object");
  } else {
    for (const auto& [k, v] : q["parameters"].items()) {
      if (!v.is_string()) p.push_back("parameter '" + k + "' is not a string");
    }
  }
  if (!a["text"].is_string()) p.push_back("text is not a string");

  if (!a["tables"].is_array()) {
    p.push_back("tables is not an array");
  } else {
    for (const auto& t : a["tables"]) {
      if (!t.is_object() || !t.contains("title") || !t["title"].is_string() ||
          !t.contains("columns") || !is_string_array(t["columns"]) || !t.contains("rows") ||
          !t["rows"].is_array()) {
        p.push_back("malformed table");
        continue;
      }
      for (const auto& row : t["rows"]) {
        if (!is_string_array(row) || row.size() != t["columns"].size()) {
          p.push_back("row width differs from columns in table '" + t["title"].get<std::string>() + "'");
        }
      }
    }
  }

  if (!a["citations"].is_array()) {
    p.push_back("citations is not an array");
  } else {
    for (const auto& c : a["citations"]) {
      if (!c.is_object() || !c.contains("label") || !c.contains("uri") || !c["uri"].is_string() ||
          !is_valid_uri(c["uri"].get<std::string>())) {
        p.push_back("malformed citation");
      }
    }
  }

  static const std::set<std::string> highlights = {"focus",   "satisfied", "fail",
                                                   "changed", "assigned",  "witness"};
  const Json& g = a["graph_view"];
  std::set<std::string> view_nodes;
  if (!g.is_object() || !g.contains("nodes") || !g.contains("edges") || !g["nodes"].is_array() ||
      !g["edges"].is_array()) {
    p.push_back("malformed graph_view");
    return p;
  }
  auto check_highlight = [&](const Json& element) {
    const Json& props = element["properties"];
    if (!props.is_object()) {
      p.push_back("element without properties object");
      return;
    }
    if (props.contains("highlight") &&
        (!props["highlight"].is_string() || !highlights.count(props["highlight"].get<std::string>()))) {
      p.push_back("unknown highlight " + props["highlight"].dump());
    }
  };
  for (const auto& n : g["nodes"]) {
    if (!n.contains("id") || !n["id"].is_string() || !n.contains("label") ||
        !n["label"].is_string() || !parse_node_label(n["label"].get<std::string>()) ||
        !n.contains("properties")) {
      p.push_back("malformed node");
      continue;
    }
    const std::string id = n["id"];
    view_nodes.insert(id);
    if (!context_graph.find_node(id)) p.push_back("view node " + id + " is not in the model graph");
    check_highlight(n);
  }
  for (const auto& e : g["edges"]) {
    if (!e.contains("id") || !e.contains("from") || !e.contains("to") || !e.contains("label") ||
        !e["label"].is_string() || !parse_edge_label(e["label"].get<std::string>()) ||
        !e.contains("properties")) {
      p.push_back("malformed edge");
      continue;
    }
    const std::string id = e["id"];
    if (!context_graph.find_edge(id)) p.push_back("view edge " + id + " is not in the model graph");
    if (!view_nodes.count(e["from"]) || !view_nodes.count(e["to"])) {
      p.push_back("view edge " + id + " has an endpoint outside the view");
    }
    check_highlight(e);
  }

  if (a["text"].is_string()) {
    const std::string text = a["text"];
    for (const auto& rule : model.rule_model) {
      if (word_in(text, rule.name) && !view_nodes.count(ids::rule(rule.name))) {
        p.push_back("rule " + rule.name + " is named in the text but missing from the view");
      }
    }
  }
  return p;
}

std::vector<ScriptedQuestion> scripted_questions() {
  auto q = [](const char* qtype, Json target, Json params) {
    return Json{{"qtype", qtype}, {"target", std::move(target)}, {"parameters", std::move(params)}};
  };
  const Json none = Json::object();
  return {
      {"tax_interest", "late", q("why", "owes_tax_interest", none), ""},
      {"tax_interest", "late", q("why", "owes_tax_interest", {{"mode", "trace"}}), ""},
      {"tax_interest", "late", q("why", "tax_interest_amount", none), ""},
      {"tax_interest", "on_time", q("why", "owes_tax_interest", none), ""},
      {"tax_interest", "late", q("what", nullptr, none), ""},
      {"tax_interest", "on_time", q("what", nullptr, none), ""},
      {"tax_interest", "late", q("what_if", nullptr, {{"payment_date", "2023-04-20"}}), ""},
      {"tax_interest", "late", q("why_not", "owes_tax_interest", {{"value", "false"}}), ""},
      {"tax_interest", "on_time", q("why_not", "owes_tax_interest", {{"value", "true"}}), ""},
      {"tax_interest_howto", "howto_partial", q("how_to", "owes_tax_interest", {{"value", "true"}}), ""},
      {"tax_interest_howto", "howto_partial",
       q("how_to", "owes_tax_interest", {{"value", "false"}, {"free", "payment_due_date"}}), ""},
      {"tax_interest", "", q("input", "TaxInterest", none), ""},
      {"tax_interest", "", q("output", nullptr, none), "legal_support"},
      {"tax_interest", "", q("how", "tax_interest_amount", none), ""},
      {"tax_interest", "", q("visualisation", nullptr, {{"view", "object"}}), ""},
      {"tax_interest", "",
       q("visualisation", nullptr, {{"view", "rule"}, {"focus", "var:payment_date"}, {"radius", "2"}}), ""},
      {"tax_interest_crippled", "", q("whether", "TaxInterest", {{"check", "io_paths"}}), ""},
      {"tax_interest", "", q("whether", nullptr, {{"check", "logical"}}), ""},
      {"tax_interest_crippled", "crippled_late", q("what", nullptr, none), ""},
      {"tax_interest", "late", q("why", "interest_days", {{"mode", "trace"}}), "legal_support"},
  };
}

std::map<std::string, std::string> golden_outputs() {
  std::map<std::string, std::string> out;
  auto model = load_fixture("tax_interest");
  auto late = fixture_instance("tax_interest", "late");
  const Context ctx = Context::of(model, late);
  const auto& legal = find_profile("legal_support");

  Question why{QType::Why, "owes_tax_interest", {}};
  const Answer a = ask(legal, why, ctx);
  out["why_late.txt"] = render_text(a);
  out["why_late.json"] = to_json(a).dump(2) + "\n";
  out["why_late.csv"] = render_table(a, TableFormat::Csv);

  Question trace{QType::Why, "owes_tax_interest", {{"mode", "trace"}}};
  const Answer t = ask(legal, trace, ctx);
  out["why_trace_late.json"] = to_json(t).dump(2) + "\n";
  out["why_trace_late.dot"] = render_dot(t.graph_view, "why");
  out["why_trace_late.txt"] = render_table(t, TableFormat::Aligned);

  out["what_late.txt"] = render_table(ask(legal, Question{QType::What, std::nullopt, {}}, ctx),
                                      TableFormat::Aligned);

  const auto simplified = model_graph(*model);
  out["model_graph.dot"] = render_dot(simplified, model->name);
  out["model_graph.cypher"] = export_graph_script(simplified);
  out["instance_late.dot"] = render_dot(instantiate(simplified, *late), "late");
  out["instance_late.json"] = to_json(*late).dump(2) + "\n";

  auto crippled = load_fixture("tax_interest_crippled");
  const auto reports = run_all_checks(*crippled, std::string("TaxInterest"));
  out["checks_crippled.json"] = to_json(reports).dump(2) + "\n";
  std::string tables;
  for (const auto& r : reports) tables += render_table(r, TableFormat::Csv) + "\r\n";
  out["checks_crippled.csv"] = tables;
  return out;
}

}  // namespace explaineo::testkit
