// explaineo command line: check, eval, ask, export, serve.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/engine.hpp"
#include "explaineo/explain.hpp"
#include "explaineo/json_io.hpp"
#include "explaineo/render.hpp"
#include "explaineo/service.hpp"
#include "explaineo/verify.hpp"

namespace fs = std::filesystem;
using namespace explaineo;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::NotFound, "cannot write " + out_path);
  out << text;
}

// A model argument is a DSL file when one exists at that path, otherwise a
// workspace model name.
std::shared_ptr<const DecisionModel> resolve_model(const std::string& arg, const fs::path& ws_root) {
  if (fs::is_regular_file(arg)) return std::make_shared<const DecisionModel>(load_model(arg));
  return Workspace(ws_root).model(arg);
}

std::shared_ptr<const DecisionInstance> resolve_instance(const std::string& arg,
                                                         std::shared_ptr<const DecisionModel> model,
                                                         const fs::path& ws_root) {
  if (fs::is_regular_file(arg)) {
    const Json doc = Json::parse(slurp(arg));
    // Bare inputs objects are accepted as well as stored instances.
    if (doc.is_object() && doc.contains("inputs") && doc.contains("model")) {
      return std::make_shared<const DecisionInstance>(instance_from_json(model, doc));
    }
    return std::make_shared<const DecisionInstance>(evaluate(model, inputs_from_json(*model, doc)));
  }
  auto inst = Workspace(ws_root).instance(arg);
  if (inst->model().name != model->name) {
    throw Error(ErrorCode::Mismatch, "instance '" + arg + "' belongs to model '" +
                                         inst->model().name + "'");
  }
  return inst;
}

std::string dot_of_reports(const std::vector<CheckReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += render_dot(r.graph_view, r.check);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explaineo: decision models, verification and explanations"};
  app.require_subcommand(1);
  // Lets --workspace follow the subcommand too, as in `serve --workspace dir`.
  app.fallthrough();

  fs::path ws_root = Workspace::default_root();
  app.add_option("--workspace", ws_root, "Workspace directory (default $EXPLAINEO_WORKSPACE or ./workspace)");

  std::string model_arg, service, format = "text", out_path;

  auto* check = app.add_subcommand("check", "Run every verification check on a model");
  check->add_option("model", model_arg, "Model file or workspace name")->required();
  check->add_option("--service", service, "Restrict to one service");
  check->add_option("--format", format)->check(CLI::IsMember({"text", "json", "dot", "table", "csv"}));

  std::string inputs_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a model on input values and write the instance");
  eval->add_option("model", model_arg)->required();
  eval->add_option("--inputs", inputs_path, "JSON object of input values")->required();
  eval->add_option("-o,--output", out_path);

  std::string qtype, instance_arg, target, profile_name;
  std::vector<std::string> params;
  auto* ask_cmd = app.add_subcommand("ask", "Ask a question");
  ask_cmd->add_option("qtype", qtype)->required();
  ask_cmd->add_option("--model", model_arg)->required();
  ask_cmd->add_option("--instance", instance_arg);
  ask_cmd->add_option("--target", target);
  ask_cmd->add_option("--param", params, "k=v, repeatable");
  ask_cmd->add_option("--profile", profile_name);
  ask_cmd->add_option("--format", format)
      ->check(CLI::IsMember({"text", "table", "csv", "json", "dot"}));

  std::string to = "dot", graph_kind = "simplified";
  auto* exp = app.add_subcommand("export", "Export a model or instance graph");
  exp->add_option("model", model_arg)->required();
  exp->add_option("--instance", instance_arg);
  exp->add_option("--to", to)->check(CLI::IsMember({"dot", "cypher", "json"}));
  exp->add_option("--graph", graph_kind, "simplified or asg")->check(CLI::IsMember({"simplified", "asg"}));
  exp->add_option("-o,--output", out_path);

  std::string addr = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--addr", addr, "host:port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      auto model = resolve_model(model_arg, ws_root);
      std::optional<std::string> svc;
      if (!service.empty()) svc = service;
      const auto reports = run_all_checks(*model, svc);
      bool all = true;
      for (const auto& r : reports) all = all && r.passed;
      if (format == "json") {
        std::cout << to_json(reports).dump(2) << "\n";
      } else if (format == "dot") {
        std::cout << dot_of_reports(reports);
      } else {
        for (std::size_t i = 0; i < reports.size(); ++i) {
          if (i) std::cout << "\n";
          if (format == "text") {
            std::cout << render_text(reports[i]);
          } else {
            std::cout << render_table(reports[i], format == "csv" ? TableFormat::Csv
                                                                  : TableFormat::Aligned);
          }
        }
      }
      return all ? 0 : 1;
    }

    if (*eval) {
      auto model = resolve_model(model_arg, ws_root);
      const Inputs inputs = inputs_from_json(*model, Json::parse(slurp(inputs_path)));
      emit(to_json(evaluate(model, inputs)).dump(2) + "\n", out_path);
      return 0;
    }

    if (*ask_cmd) {
      auto model = resolve_model(model_arg, ws_root);
      std::shared_ptr<const DecisionInstance> instance;
      if (!instance_arg.empty()) instance = resolve_instance(instance_arg, model, ws_root);
      auto parsed = parse_qtype(qtype);
      if (!parsed) throw Error(ErrorCode::InvalidQuestion, "unknown qtype '" + qtype + "'");
      Question q;
      q.qtype = *parsed;
      if (!target.empty()) q.target = target;
      for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw Error(ErrorCode::InvalidQuestion, "parameter '" + p + "' is not k=v");
        }
        q.parameters[p.substr(0, eq)] = p.substr(eq + 1);
      }
      const AudienceProfile& profile =
          profile_name.empty() ? default_profile(q.qtype) : find_profile(profile_name);
      const Answer a = ask(profile, q, Context::of(model, instance));
      if (format == "json") {
        std::cout << to_json(a).dump(2) << "\n";
      } else if (format == "dot") {
        std::cout << render_dot(a.graph_view, std::string(to_string(q.qtype)));
      } else if (format == "text") {
        std::cout << render_text(a);
      } else {
        std::cout << render_table(a, format == "csv" ? TableFormat::Csv : TableFormat::Aligned);
      }
      return 0;
    }

    if (*exp) {
      auto model = resolve_model(model_arg, ws_root);
      PropertyGraph graph = graph_kind == "asg" ? build_asg(*model) : model_graph(*model);
      if (!instance_arg.empty()) {
        if (graph_kind == "asg") {
          throw Error(ErrorCode::InvalidQuestion, "instances decorate the simplified graph only");
        }
        graph = instantiate(graph, *resolve_instance(instance_arg, model, ws_root));
      }
      std::string text;
      if (to == "dot") {
        text = render_dot(graph, model->name);
      } else if (to == "cypher") {
        text = export_graph_script(graph);
      } else {
        text = to_json(graph).dump(2) + "\n";
      }
      emit(text, out_path);
      return 0;
    }

    if (*serve) {
      const auto colon = addr.rfind(':');
      if (colon == std::string::npos) {
        std::cerr << "error: --addr must be host:port\n";
        return 2;
      }
      const std::string host = addr.substr(0, colon);
      const int port = std::stoi(addr.substr(colon + 1));
      Workspace ws(ws_root);
      httplib::Server server;
      install_routes(server, ws);
      std::cerr << "serving " << ws.root().string() << " on http://" << host << ":" << port << "/v1\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << addr << "\n";
        return 2;
      }
      return 0;
    }
  } catch (const ParseFailure& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
