#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "explaineo/dsl.hpp"
#include "explaineo/engine.hpp"
#include "explaineo/errors.hpp"
#include "explaineo/explain.hpp"
#include "explaineo/json_io.hpp"
#include "explaineo/model.hpp"

namespace httplib {
class Server;
}

namespace explaineo {

/// Parse failure carrying every diagnostic, for the HTTP 400 body.
class ParseFailure : public Error {
 public:
  explicit ParseFailure(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Directory of stored models (models/<name>.dm plus a revision counter)
/// and instances (instances/<id>.json). Writes are serialised; readers run
/// concurrently. Every load re-parses or re-evaluates the stored artifact.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  /// $EXPLAINEO_WORKSPACE, or ./workspace.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const { return root_; }

  struct ModelInfo {
    std::string name;
    std::string version;
    int revision = 0;
  };

  /// Validates and stores DSL text under `name`, which must match the
  /// model's declared name. Throws ParseFailure on invalid text.
  ModelInfo put_model(const std::string& name, const std::string& source);
  std::vector<ModelInfo> list_models() const;
  ModelInfo model_info(const std::string& name) const;
  std::shared_ptr<const DecisionModel> model(const std::string& name) const;
  std::string model_source(const std::string& name) const;

  /// Evaluates and stores an instance; returns its id (generated as
  /// "<model>-<n>" when `id` is empty).
  std::string put_instance(const std::string& model_name, const Inputs& inputs,
                           const std::string& id = {});
  std::shared_ptr<const DecisionInstance> instance(const std::string& id) const;
  std::vector<std::string> list_instances() const;

 private:
  std::filesystem::path model_path(const std::string& name) const;
  std::filesystem::path instance_path(const std::string& id) const;
  int revision(const std::string& name) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
};

/// Names usable as model or instance ids: letters, digits, '_' and '-'.
bool valid_artifact_name(const std::string& name);

/// HTTP status for a library error: 404 unknown resource, 409 rule
/// conflict, 400 otherwise.
int http_status(ErrorCode code);

/// {"error": code, "message": ..., "diagnostics": [...]}
Json error_json(const std::exception& e);

/// Body of POST /v1/ask: {"profile", "model", "instance", "question"}.
/// The profile defaults to the first built-in one allowing the qtype.
Answer ask_workspace(const Workspace& ws, const Json& request);

/// Registers the /v1 routes on an httplib server.
void install_routes(httplib::Server& server, Workspace& ws);

}  // namespace explaineo
