#pragma once

#include <string>

#include "explaineo/engine.hpp"
#include "explaineo/graph.hpp"
#include "explaineo/model.hpp"

namespace explaineo {

/// Lossless projection of a validated model: every declaration, condition
/// and expression node, message and source becomes a node; containment and
/// references become edges. An empty model yields a single Model node.
PropertyGraph build_asg(const DecisionModel& model);

/// Inverse of build_asg (up to formatting). Throws Error(Validation) when the
/// graph is not an abstract syntax graph.
DecisionModel model_from_asg(const PropertyGraph& asg);

/// Collapses an abstract syntax graph into the legal-analysis schema:
/// ObjectType/Variable/Rule/Source/Service/message nodes only, rules carrying
/// their condition and action as printable properties, and one CONDITION or
/// CALC_INPUT edge per distinct variable a rule reads.
PropertyGraph simplify(const PropertyGraph& asg);

/// build_asg followed by simplify.
PropertyGraph model_graph(const DecisionModel& model);

/// Decorates a simplified graph with one decision: Variable nodes gain
/// value/origin, Rule nodes gain fired, CONDITION edges gain satisfied and
/// DERIVES edges gain active. Topology is unchanged. Throws Error(Mismatch)
/// when the graph and instance describe different models.
PropertyGraph instantiate(const PropertyGraph& simplified, const DecisionInstance& instance);

/// True when `label` is allowed from `from` to `to` in the simplified schema.
bool schema_allows(EdgeLabel label, NodeLabel from, NodeLabel to);

/// Edge id helper shared by the projections: "LABEL:from->to".
std::string edge_id(EdgeLabel label, const std::string& from, const std::string& to);

}  // namespace explaineo
