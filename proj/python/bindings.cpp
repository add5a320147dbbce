#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/engine.hpp"
#include "explaineo/errors.hpp"
#include "explaineo/explain.hpp"
#include "explaineo/json_io.hpp"
#include "explaineo/render.hpp"
#include "explaineo/verify.hpp"

namespace py = pybind11;
using namespace explaineo;

namespace {

// Carries parse diagnostics to the exception translator.
class ParseErrors : public Error {
 public:
  explicit ParseErrors(std::vector<Diagnostic> d)
      : Error(ErrorCode::Parse, d.empty() ? "invalid model" : format_diagnostic(d.front())),
        diagnostics(std::move(d)) {}
  std::vector<Diagnostic> diagnostics;
};

std::shared_ptr<const DecisionModel> parse_source(const std::string& source) {
  ParseResult r = parse_model(source);
  if (!r.ok()) throw ParseErrors(std::move(r.errors));
  return std::make_shared<const DecisionModel>(std::move(*r.model));
}

std::shared_ptr<const DecisionInstance> evaluate_json(std::shared_ptr<const DecisionModel> model,
                                                      const std::string& inputs) {
  const Inputs in = inputs_from_json(*model, Json::parse(inputs));
  return std::make_shared<const DecisionInstance>(evaluate(std::move(model), in));
}

std::string parse(const std::string& source) {
  auto m = parse_source(source);
  Json rules = Json::array(), services = Json::array(), variables = Json::array();
  for (const auto* v : m->variables()) variables.push_back(v->name);
  for (const auto& r : m->rule_model) rules.push_back(r.name);
  for (const auto& s : m->service_model) services.push_back(s.name);
  return Json{{"name", m->name},
              {"version", m->version},
              {"variables", variables},
              {"rules", rules},
              {"services", services},
              {"inputs", m->input_variables()},
              {"outputs", m->output_variables()}}
      .dump();
}

std::string check(const std::string& source, const std::string& check_id,
                  const std::optional<std::string>& service) {
  auto m = parse_source(source);
  if (check_id == "all") return to_json(run_all_checks(*m, service)).dump();
  return to_json(run_check(*m, check_id, service)).dump();
}

std::string evaluate_inputs(const std::string& source, const std::string& inputs) {
  return to_json(*evaluate_json(parse_source(source), inputs)).dump();
}

std::string ask_question(const std::string& source, const std::string& question,
                         const std::optional<std::string>& inputs,
                         const std::optional<std::string>& profile, const std::string& format) {
  auto m = parse_source(source);
  std::shared_ptr<const DecisionInstance> inst;
  if (inputs) inst = evaluate_json(m, *inputs);
  const Question q = question_from_json(Json::parse(question));
  const AudienceProfile& p = profile ? find_profile(*profile) : default_profile(q.qtype);
  const Answer a = ask(p, q, Context::of(m, inst));
  if (format == "json") return to_json(a).dump(2) + "\n";
  if (format == "text") return render_text(a);
  if (format == "table") return render_table(a, TableFormat::Aligned);
  if (format == "csv") return render_table(a, TableFormat::Csv);
  if (format == "dot") return render_dot(a.graph_view, std::string(to_string(q.qtype)));
  throw Error(ErrorCode::InvalidQuestion, "unknown format '" + format + "'");
}

std::string export_graph(const std::string& source, const std::optional<std::string>& inputs,
                         const std::string& to, const std::string& graph_kind) {
  auto m = parse_source(source);
  if (graph_kind != "simplified" && graph_kind != "asg") {
    throw Error(ErrorCode::InvalidQuestion, "graph must be simplified or asg");
  }
  PropertyGraph g = graph_kind == "asg" ? build_asg(*m) : model_graph(*m);
  if (inputs) {
    if (graph_kind == "asg") throw Error(ErrorCode::InvalidQuestion, "instances decorate the simplified graph only");
    g = instantiate(g, *evaluate_json(m, *inputs));
  }
  if (to == "json") return to_json(g).dump(2) + "\n";
  if (to == "dot") return render_dot(g, m->name);
  if (to == "cypher") return export_graph_script(g);
  throw Error(ErrorCode::InvalidQuestion, "unknown export format '" + to + "'");
}

}  // namespace

PYBIND11_MODULE(_explaineo, m) {
  m.doc() = "Native core of the explaineo package; the functions take and return JSON text.";

  py::register_exception_translator([](std::exception_ptr p) {
    if (!p) return;
    auto raise = [](const std::string& code, const std::string& message, const Json& details) {
      py::object cls = py::module_::import("explaineo._errors").attr("ExplaineoError");
      py::object exc = cls(code, message, details.dump());
      PyErr_SetObject(cls.ptr(), exc.ptr());
    };
    try {
      std::rethrow_exception(p);
    } catch (const ParseErrors& e) {
      Json diags = Json::array();
      for (const auto& d : e.diagnostics) diags.push_back(to_json(d));
      raise("ParseError", e.what(), Json{{"diagnostics", diags}});
    } catch (const ModelConflict& e) {
      raise("ModelConflict", e.what(),
            Json{{"rules", {e.first_rule(), e.second_rule()}}, {"target", e.target()}});
    } catch (const Error& e) {
      raise(std::string(to_string(e.code())), e.what(), Json::object());
    } catch (const nlohmann::json::exception& e) {
      raise("ParseError", std::string("invalid JSON: ") + e.what(), Json::object());
    }
  });

  m.def("parse", &parse, py::arg("source"));
  m.def("check", &check, py::arg("source"), py::arg("check") = "all", py::arg("service") = py::none());
  m.def("evaluate", &evaluate_inputs, py::arg("source"), py::arg("inputs"));
  m.def("ask", &ask_question, py::arg("source"), py::arg("question"), py::arg("inputs") = py::none(),
        py::arg("profile") = py::none(), py::arg("format") = "json");
  m.def("export", &export_graph, py::arg("source"), py::arg("inputs") = py::none(), py::arg("to") = "json",
        py::arg("graph") = "simplified");
}
