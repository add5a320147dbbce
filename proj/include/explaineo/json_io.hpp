#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "explaineo/dsl.hpp"
#include "explaineo/engine.hpp"
#include "explaineo/explain.hpp"
#include "explaineo/graph.hpp"
#include "explaineo/verify.hpp"

namespace explaineo {

/// Insertion-ordered so serialised documents keep a stable key order.
using Json = nlohmann::ordered_json;

Json to_json(const PropertyGraph& graph);
/// Throws Error(Validation) on a malformed document.
PropertyGraph graph_from_json(const Json& json);

Json to_json(const Value& value);

/// Input document: {"var": value, ...}. Strings, numbers and booleans are
/// coerced to the declared kind.
Inputs inputs_from_json(const DecisionModel& model, const Json& json);

/// {"model","status","inputs","derived","trace"}
Json to_json(const DecisionInstance& instance);
/// Re-evaluates the stored inputs and throws Error(Mismatch) unless the
/// stored derived values and trace agree with the fresh evaluation.
DecisionInstance instance_from_json(std::shared_ptr<const DecisionModel> model, const Json& json);

Json to_json(const CheckReport& report);
Json to_json(const std::vector<CheckReport>& reports);

Json to_json(const Question& question);
/// {"qtype","target","parameters"}; parameter values may be any scalar.
Question question_from_json(const Json& json);
Json to_json(const Answer& answer);

Json catalogue_json();
Json profiles_json();

Json to_json(const Diagnostic& diagnostic);

}  // namespace explaineo
