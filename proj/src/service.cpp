#include "explaineo/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include <httplib.h>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/errors.hpp"
#include "explaineo/verify.hpp"

namespace explaineo {

namespace fs = std::filesystem;

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += "\n";
    out += format_diagnostic(d);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::NotFound, "cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

ParseFailure::ParseFailure(std::vector<Diagnostic> diagnostics)
    : Error(ErrorCode::Parse, join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool valid_artifact_name(const std::string& name) {
  if (name.empty() || name.size() > 128) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

// Directories are created on first write, so read-only use leaves no trace.
Workspace::Workspace(fs::path root) : root_(std::move(root)) {}

fs::path Workspace::default_root() {
  if (const char* env = std::getenv("EXPLAINEO_WORKSPACE"); env && *env) return env;
  return "workspace";
}

fs::path Workspace::model_path(const std::string& name) const {
  if (!valid_artifact_name(name)) {
    throw Error(ErrorCode::Validation, "invalid model name '" + name + "'");
  }
  return root_ / "models" / (name + ".dm");
}

fs::path Workspace::instance_path(const std::string& id) const {
  if (!valid_artifact_name(id)) {
    throw Error(ErrorCode::Validation, "invalid instance id '" + id + "'");
  }
  return root_ / "instances" / (id + ".json");
}

int Workspace::revision(const std::string& name) const {
  const fs::path rev = root_ / "models" / (name + ".rev");
  if (!fs::exists(rev)) return 0;
  return std::stoi(read_file(rev));
}

Workspace::ModelInfo Workspace::put_model(const std::string& name, const std::string& source) {
  const fs::path path = model_path(name);
  ParseResult parsed = parse_model(source);
  if (!parsed.ok()) throw ParseFailure(parsed.errors);
  if (parsed.model->name != name) {
    throw Error(ErrorCode::Validation, "model text declares '" + parsed.model->name +
                                           "' but is stored as '" + name + "'");
  }
  std::unique_lock lock(mutex_);
  const int rev = revision(name) + 1;
  write_file(path, source);
  write_file(root_ / "models" / (name + ".rev"), std::to_string(rev) + "\n");
  return {name, parsed.model->version, rev};
}

std::vector<Workspace::ModelInfo> Workspace::list_models() const {
  std::vector<std::string> names;
  {
    std::shared_lock lock(mutex_);
    if (!fs::is_directory(root_ / "models")) return {};
    for (const auto& entry : fs::directory_iterator(root_ / "models")) {
      if (entry.path().extension() == ".dm") names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<ModelInfo> out;
  for (const auto& n : names) out.push_back(model_info(n));
  return out;
}

Workspace::ModelInfo Workspace::model_info(const std::string& name) const {
  auto m = model(name);
  std::shared_lock lock(mutex_);
  return {name, m->version, revision(name)};
}

std::string Workspace::model_source(const std::string& name) const {
  const fs::path path = model_path(name);
  std::shared_lock lock(mutex_);
  if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "unknown model '" + name + "'");
  return read_file(path);
}

std::shared_ptr<const DecisionModel> Workspace::model(const std::string& name) const {
  ParseResult parsed = parse_model(model_source(name));
  if (!parsed.ok()) throw ParseFailure(parsed.errors);
  return std::make_shared<const DecisionModel>(std::move(*parsed.model));
}

std::string Workspace::put_instance(const std::string& model_name, const Inputs& inputs,
                                   const std::string& id) {
  auto m = model(model_name);
  const DecisionInstance inst = evaluate(m, inputs);
  Json doc = to_json(inst);
  std::unique_lock lock(mutex_);
  std::string chosen = id;
  if (chosen.empty()) {
    for (int n = 1;; ++n) {
      chosen = model_name + "-" + std::to_string(n);
      if (!fs::exists(instance_path(chosen))) break;
    }
  }
  Json stored = Json{{"id", chosen}};
  for (auto& [k, v] : doc.items()) stored[k] = v;
  write_file(instance_path(chosen), stored.dump(2) + "\n");
  return chosen;
}

std::shared_ptr<const DecisionInstance> Workspace::instance(const std::string& id) const {
  const fs::path path = instance_path(id);
  std::string text;
  {
    std::shared_lock lock(mutex_);
    if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "unknown instance '" + id + "'");
    text = read_file(path);
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Validation, "instance '" + id + "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("model") || !doc.at("model").is_string()) {
    throw Error(ErrorCode::Validation, "instance '" + id + "' names no model");
  }
  auto m = model(doc.at("model").get<std::string>());
  return std::make_shared<const DecisionInstance>(instance_from_json(m, doc));
}

std::vector<std::string> Workspace::list_instances() const {
  std::vector<std::string> out;
  std::shared_lock lock(mutex_);
  if (!fs::is_directory(root_ / "instances")) return out;
  for (const auto& entry : fs::directory_iterator(root_ / "instances")) {
    if (entry.path().extension() == ".json") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ModelConflict: return 409;
    default: return 400;
  }
}

Json error_json(const std::exception& e) {
  Json out = Json::object();
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    out["error"] = std::string(to_string(err->code()));
  } else {
    out["error"] = "internal";
  }
  out["message"] = e.what();
  if (const auto* pf = dynamic_cast<const ParseFailure*>(&e)) {
    Json ds = Json::array();
    for (const auto& d : pf->diagnostics()) ds.push_back(to_json(d));
    out["diagnostics"] = std::move(ds);
  }
  if (const auto* mc = dynamic_cast<const ModelConflict*>(&e)) {
    out["rules"] = {mc->first_rule(), mc->second_rule()};
    out["target"] = mc->target();
  }
  return out;
}

Answer ask_workspace(const Workspace& ws, const Json& request) {
  if (!request.is_object()) throw Error(ErrorCode::InvalidQuestion, "request must be an object");
  auto text = [&](const char* key) -> std::optional<std::string> {
    if (!request.contains(key) || request.at(key).is_null()) return std::nullopt;
    if (!request.at(key).is_string()) {
      throw Error(ErrorCode::InvalidQuestion, std::string("'") + key + "' must be a string");
    }
    return request.at(key).get<std::string>();
  };
  if (!request.contains("question")) throw Error(ErrorCode::InvalidQuestion, "missing question");
  const Question question = question_from_json(request.at("question"));
  const auto model_name = text("model");
  if (!model_name) throw Error(ErrorCode::InvalidQuestion, "missing model");
  auto model = ws.model(*model_name);
  std::shared_ptr<const DecisionInstance> instance;
  if (auto id = text("instance")) {
    instance = ws.instance(*id);
    if (instance->model().name != model->name) {
      throw Error(ErrorCode::Mismatch, "instance '" + *id + "' belongs to another model");
    }
  }
  const auto profile_name = text("profile");
  const AudienceProfile& profile =
      profile_name ? find_profile(*profile_name) : default_profile(question.qtype);
  return ask(profile, question, Context::of(model, instance));
}

namespace {

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json; charset=utf-8");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_json(res, error_json(e), http_status(e.code()));
    } catch (const nlohmann::json::exception& e) {
      send_json(res, error_json(Error(ErrorCode::Parse, std::string("invalid JSON: ") + e.what())),
                400);
    } catch (const std::exception& e) {
      send_json(res, error_json(e), 500);
    }
  };
}

Json info_json(const Workspace::ModelInfo& info) {
  return Json{{"name", info.name}, {"version", info.version}, {"revision", info.revision}};
}

Json stored_instance_json(const Workspace& ws, const std::string& id) {
  Json out = Json{{"id", id}};
  const Json doc = to_json(*ws.instance(id));
  for (const auto& [k, v] : doc.items()) out[k] = v;
  return out;
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

}  // namespace

void install_routes(httplib::Server& server, Workspace& ws) {
  const std::string name = "([A-Za-z0-9_-]+)";

  server.Get("/v1/models", guarded([&ws](const httplib::Request&, httplib::Response& res) {
    Json out = Json::array();
    for (const auto& info : ws.list_models()) out.push_back(info_json(info));
    send_json(res, out);
  }));

  server.Put("/v1/models/" + name, guarded([&ws](const httplib::Request& req, httplib::Response& res) {
    const auto info = ws.put_model(req.matches[1], req.body);
    send_json(res, info_json(info), info.revision == 1 ? 201 : 200);
  }));

  server.Get("/v1/models/" + name, guarded([&ws](const httplib::Request& req, httplib::Response& res) {
    const std::string model = req.matches[1];
    Json out = info_json(ws.model_info(model));
    out["source"] = ws.model_source(model);
    send_json(res, out);
  }));

  server.Get("/v1/models/" + name + "/graph",
             guarded([&ws](const httplib::Request& req, httplib::Response& res) {
               auto model = ws.model(req.matches[1]);
               const std::string view = query(req, "view").value_or("full");
               if (view == "asg") {
                 send_json(res, to_json(build_asg(*model)));
                 return;
               }
               Context ctx = Context::of(model);
               if (auto id = query(req, "instance")) {
                 ctx.graph = instantiate(ctx.graph, *ws.instance(*id));
               }
               std::size_t radius = 1;
               if (auto r = query(req, "radius")) {
                 auto [ptr, ec] = std::from_chars(r->data(), r->data() + r->size(), radius);
                 if (ec != std::errc() || ptr != r->data() + r->size()) {
                   throw Error(ErrorCode::InvalidQuestion, "radius must be a whole number");
                 }
               }
               const Answer a = answer_visualisation(ctx, view, query(req, "focus"), radius);
               send_json(res, to_json(a.graph_view));
             }));

  server.Post("/v1/models/" + name + "/instances",
              guarded([&ws](const httplib::Request& req, httplib::Response& res) {
                const std::string model_name = req.matches[1];
                auto model = ws.model(model_name);
                const Json body = Json::parse(req.body);
                std::string id;
                const Json* inputs = &body;
                if (body.is_object() && body.contains("inputs") && body.at("inputs").is_object()) {
                  inputs = &body.at("inputs");
                  if (body.contains("id")) id = body.at("id").get<std::string>();
                }
                id = ws.put_instance(model_name, inputs_from_json(*model, *inputs), id);
                send_json(res, stored_instance_json(ws, id), 201);
              }));

  server.Get("/v1/instances/" + name, guarded([&ws](const httplib::Request& req, httplib::Response& res) {
    send_json(res, stored_instance_json(ws, req.matches[1]));
  }));

  server.Post("/v1/models/" + name + "/checks/" + name,
              guarded([&ws](const httplib::Request& req, httplib::Response& res) {
                auto model = ws.model(req.matches[1]);
                const std::string check = req.matches[2];
                const auto service = query(req, "service");
                if (check == "all") {
                  send_json(res, to_json(run_all_checks(*model, service)));
                } else {
                  // The check id is part of the path, so an unknown one is a missing resource.
                  const auto& ids = check_ids();
                  if (std::find(ids.begin(), ids.end(), check) == ids.end()) {
                    throw Error(ErrorCode::NotFound, "unknown check '" + check + "'");
                  }
                  send_json(res, to_json(run_check(*model, check, service)));
                }
              }));

  server.Get("/v1/questions", guarded([](const httplib::Request&, httplib::Response& res) {
    send_json(res, catalogue_json());
  }));

  server.Get("/v1/profiles", guarded([](const httplib::Request&, httplib::Response& res) {
    send_json(res, profiles_json());
  }));

  server.Post("/v1/ask", guarded([&ws](const httplib::Request& req, httplib::Response& res) {
    send_json(res, to_json(ask_workspace(ws, Json::parse(req.body))));
  }));
}

}  // namespace explaineo
