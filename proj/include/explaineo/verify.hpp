#pragma once

#include <optional>
#include <string>
#include <vector>

#include "explaineo/graph.hpp"
#include "explaineo/model.hpp"

namespace explaineo {

enum class RowStatus { Pass, Fail, Warn, Unchecked };
std::string_view to_string(RowStatus status);

struct CheckRow {
  std::string element;  // element id, e.g. "var:payment_date"
  std::string kind;     // "input", "output", "variable", "rule", ...
  RowStatus status = RowStatus::Pass;
  std::string detail;
  friend bool operator==(const CheckRow&, const CheckRow&) = default;
};

struct CheckReport {
  std::string check;
  bool passed = true;  // no row has status Fail
  std::string text;
  std::vector<CheckRow> table;
  PropertyGraph graph_view;  // nodes carry highlight = "fail" | "witness"
};

/// Check ids in run order.
const std::vector<std::string>& check_ids();

/// Each path/assignment check runs on the simplified model graph. With no
/// service named the checks cover every service of the graph.
CheckReport check_messages_used(const PropertyGraph& graph,
                                const std::optional<std::string>& service = std::nullopt);
CheckReport check_io_paths(const PropertyGraph& graph,
                           const std::optional<std::string>& service = std::nullopt);
CheckReport check_variables_used(const PropertyGraph& graph);
CheckReport check_variables_assigned(const PropertyGraph& graph);
CheckReport check_logical(const DecisionModel& model);

/// Dispatch by id; throws Error(UnknownElement) for an unknown check id.
CheckReport run_check(const DecisionModel& model, const std::string& check_id,
                      const std::optional<std::string>& service = std::nullopt);
std::vector<CheckReport> run_all_checks(const DecisionModel& model,
                                        const std::optional<std::string>& service = std::nullopt);

enum class Satisfiability { Satisfiable, Unsatisfiable, Unknown };

struct SatResult {
  Satisfiability verdict = Satisfiability::Satisfiable;
  /// For Unsatisfiable: the smallest contradictory atom set found (usually a
  /// pair), printed with negations pushed into the comparators.
  std::vector<std::string> conflict;
};

/// Decides whether some total assignment of the declared variables makes
/// the condition true. Finite domains are enumerated; ordered kinds are
/// solved as difference constraints.
SatResult satisfiable(const DecisionModel& model, const Condition& condition);

}  // namespace explaineo
