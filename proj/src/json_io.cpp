#include "explaineo/json_io.hpp"

#include <cmath>

#include "explaineo/errors.hpp"

namespace explaineo {

namespace {

Json property_json(const PropertyValue& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return x;
        }
      },
      v);
}

PropertyValue property_from(const Json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorCode::Validation, "unsupported property value " + j.dump());
}

Json properties_json(const Properties& props) {
  Json out = Json::object();
  for (const auto& [k, v] : props) out[k] = property_json(v);
  return out;
}

Properties properties_from(const Json& j) {
  Properties out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw Error(ErrorCode::Validation, "properties must be an object");
  for (const auto& [k, v] : j.items()) out[k] = property_from(v);
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::Validation, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string text_field(const Json& j, const char* key) {
  const Json& f = field(j, key);
  if (!f.is_string()) throw Error(ErrorCode::Validation, std::string("'") + key + "' must be a string");
  return f.get<std::string>();
}

// Loose scalar to the text form coerce_input and Value::parse accept.
std::string scalar_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number()) return j.dump();
  throw Error(ErrorCode::TypeError, "expected a scalar value, found " + j.dump());
}

Json table_json(const Table& t) {
  return Json{{"title", t.title}, {"columns", t.columns}, {"rows", t.rows}};
}

}  // namespace

Json to_json(const PropertyGraph& graph) {
  Json nodes = Json::array(), edges = Json::array();
  for (const auto& [id, n] : graph.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"label", std::string(to_string(n.label))},
                     {"properties", properties_json(n.properties)}});
  }
  for (const auto& [id, e] : graph.edges()) {
    edges.push_back({{"id", e.id},
                     {"from", e.from},
                     {"to", e.to},
                     {"label", std::string(to_string(e.label))},
                     {"properties", properties_json(e.properties)}});
  }
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

PropertyGraph graph_from_json(const Json& json) {
  GraphBuilder b;
  for (const auto& n : field(json, "nodes")) {
    auto label = parse_node_label(text_field(n, "label"));
    if (!label) throw Error(ErrorCode::Validation, "unknown node label in " + n.dump());
    b.add_node(text_field(n, "id"), *label,
               n.contains("properties") ? properties_from(n.at("properties")) : Properties{});
  }
  for (const auto& e : field(json, "edges")) {
    auto label = parse_edge_label(text_field(e, "label"));
    if (!label) throw Error(ErrorCode::Validation, "unknown edge label in " + e.dump());
    b.add_edge(text_field(e, "id"), text_field(e, "from"), text_field(e, "to"), *label,
               e.contains("properties") ? properties_from(e.at("properties")) : Properties{});
  }
  return std::move(b).freeze();
}

Json to_json(const Value& value) {
  switch (value.kind()) {
    case Kind::Boolean: return value.as_bool();
    case Kind::Number: {
      // Whole numbers are written without a fraction: 4, not 4.0.
      const double n = value.as_number();
      if (std::trunc(n) == n && std::fabs(n) < 9e15) return static_cast<std::int64_t>(n);
      return n;
    }
    default: return value.to_string();
  }
}

Inputs inputs_from_json(const DecisionModel& model, const Json& json) {
  if (!json.is_object()) throw Error(ErrorCode::TypeError, "inputs must be a JSON object");
  Inputs out;
  for (const auto& [name, v] : json.items()) {
    Value value = coerce_input(model, name, scalar_text(v));
    check_input(model, name, value);
    out.insert_or_assign(name, std::move(value));
  }
  return out;
}

Json to_json(const DecisionInstance& instance) {
  Json inputs = Json::object(), derived = Json::object(), trace = Json::array();
  for (const auto& [k, v] : instance.inputs()) inputs[k] = to_json(v);
  for (const auto& [k, v] : instance.derived()) derived[k] = to_json(v);
  for (const auto& step : instance.trace()) {
    Json conditions = Json::array(), consumed = Json::object();
    for (const auto& c : step.conditions) {
      conditions.push_back({{"atom", c.atom}, {"value", std::string(to_string(c.value))}});
    }
    for (const auto& [k, v] : step.consumed) consumed[k] = to_json(v);
    trace.push_back({{"rule", step.rule},
                     {"conditions", std::move(conditions)},
                     {"consumed", std::move(consumed)},
                     {"target", step.target},
                     {"value", to_json(step.value)}});
  }
  return Json{{"model", instance.model().name},
              {"version", instance.model().version},
              {"status", std::string(to_string(instance.status()))},
              {"inputs", std::move(inputs)},
              {"derived", std::move(derived)},
              {"trace", std::move(trace)}};
}

DecisionInstance instance_from_json(std::shared_ptr<const DecisionModel> model, const Json& json) {
  if (text_field(json, "model") != model->name) {
    throw Error(ErrorCode::Mismatch, "instance belongs to model '" + text_field(json, "model") +
                                         "', not '" + model->name + "'");
  }
  const Inputs inputs = inputs_from_json(*model, field(json, "inputs"));
  DecisionInstance fresh = evaluate(model, inputs);
  // The stored document must be exactly what the engine produces now.
  if (json.contains("derived") || json.contains("trace")) {
    const Json again = to_json(fresh);
    if ((json.contains("derived") && json.at("derived") != again.at("derived")) ||
        (json.contains("trace") && json.at("trace") != again.at("trace"))) {
      throw Error(ErrorCode::Mismatch,
                  "stored instance does not match a fresh evaluation of model '" + model->name + "'");
    }
  }
  return fresh;
}

Json to_json(const CheckReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.table) {
    rows.push_back({{"element", row.element},
                    {"kind", row.kind},
                    {"status", std::string(to_string(row.status))},
                    {"detail", row.detail}});
  }
  return Json{{"check", report.check},
              {"verdict", report.passed ? "pass" : "fail"},
              {"text", report.text},
              {"table", std::move(rows)},
              {"graph_view", to_json(report.graph_view)}};
}

Json to_json(const std::vector<CheckReport>& reports) {
  Json out = Json::array();
  for (const auto& r : reports) out.push_back(to_json(r));
  return out;
}

Json to_json(const Question& q) {
  Json params = Json::object();
  for (const auto& [k, v] : q.parameters) params[k] = v;
  return Json{{"qtype", std::string(to_string(q.qtype))},
              {"target", q.target ? Json(*q.target) : Json(nullptr)},
              {"parameters", std::move(params)}};
}

Question question_from_json(const Json& json) {
  Question q;
  const std::string qtype = text_field(json, "qtype");
  auto parsed = parse_qtype(qtype);
  if (!parsed) throw Error(ErrorCode::InvalidQuestion, "unknown qtype '" + qtype + "'");
  q.qtype = *parsed;
  if (json.contains("target") && !json.at("target").is_null()) q.target = text_field(json, "target");
  if (json.contains("parameters") && !json.at("parameters").is_null()) {
    const Json& params = json.at("parameters");
    if (!params.is_object()) throw Error(ErrorCode::InvalidQuestion, "parameters must be an object");
    for (const auto& [k, v] : params.items()) q.parameters[k] = scalar_text(v);
  }
  return q;
}

Json to_json(const Answer& answer) {
  Json tables = Json::array(), citations = Json::array();
  for (const auto& t : answer.tables) tables.push_back(table_json(t));
  for (const auto& c : answer.citations) citations.push_back({{"label", c.label}, {"uri", c.uri}});
  return Json{{"question", to_json(answer.question)},
              {"text", answer.text},
              {"tables", std::move(tables)},
              {"graph_view", to_json(answer.graph_view)},
              {"citations", std::move(citations)}};
}

Json catalogue_json() {
  Json out = Json::array();
  for (const auto& spec : question_catalogue()) {
    Json params = Json::array();
    for (const auto& p : spec.parameters) {
      params.push_back({{"name", p.name},
                        {"type", p.type},
                        {"required", p.required},
                        {"description", p.description}});
    }
    out.push_back({{"qtype", std::string(to_string(spec.qtype))},
                   {"category", spec.category},
                   {"purpose", spec.purpose},
                   {"requires_instance", requires_instance(spec.qtype)},
                   {"target", {{"required", spec.target_required},
                               {"description", spec.target_description}}},
                   {"parameters", std::move(params)}});
  }
  return out;
}

Json profiles_json() {
  Json out = Json::array();
  for (const auto& p : builtin_profiles()) {
    Json allowed = Json::array();
    for (auto q : p.allowed) allowed.push_back(std::string(to_string(q)));
    out.push_back({{"name", p.name},
                   {"allowed", std::move(allowed)},
                   {"radius", p.radius ? Json(*p.radius) : Json(nullptr)},
                   {"vocabulary", p.vocabulary == Vocabulary::Plain ? "plain" : "technical"}});
  }
  return out;
}

Json to_json(const Diagnostic& d) {
  return Json{{"severity", std::string(to_string(d.severity))},
              {"element", d.element},
              {"message", d.message},
              {"line", d.line},
              {"column", d.column}};
}

}  // namespace explaineo
