#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "explaineo/model.hpp"

namespace explaineo {

using Inputs = std::map<std::string, Value>;

enum class Origin { Input, Derived, Unset };
std::string_view to_string(Origin origin);

struct Binding {
  std::string variable;
  std::optional<Value> value;
  Origin origin = Origin::Unset;
  std::string rule;  // deriving rule name when origin == Derived
  friend bool operator==(const Binding&, const Binding&) = default;
};

/// Kleene truth value: atoms over unbound variables are Unknown.
enum class Truth { False, True, Unknown };
std::string_view to_string(Truth t);

struct AtomEvaluation {
  std::string atom;  // printed atom, e.g. "payment_date > payment_due_date"
  Truth value = Truth::Unknown;
  friend bool operator==(const AtomEvaluation&, const AtomEvaluation&) = default;
};

struct TraceStep {
  std::string rule;
  std::vector<AtomEvaluation> conditions;
  std::vector<std::pair<std::string, Value>> consumed;
  std::string target;
  Value value = Value::boolean(false);
  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

enum class InstanceStatus { Complete, Partial };
std::string_view to_string(InstanceStatus status);

/// Result of evaluating a model over inputs. Immutable once built.
class DecisionInstance {
 public:
  DecisionInstance(std::shared_ptr<const DecisionModel> model, Inputs inputs,
                   std::map<std::string, Binding> bindings, std::vector<TraceStep> trace,
                   InstanceStatus status);

  const DecisionModel& model() const { return *model_; }
  const std::shared_ptr<const DecisionModel>& model_ptr() const { return model_; }
  const Inputs& inputs() const { return inputs_; }
  /// One binding per declared variable, unset ones included.
  const std::map<std::string, Binding>& bindings() const { return bindings_; }
  const std::vector<TraceStep>& trace() const { return trace_; }
  InstanceStatus status() const { return status_; }

  const Binding& binding(const std::string& variable) const;
  std::optional<Value> value(const std::string& variable) const;
  /// Derived values only.
  std::map<std::string, Value> derived() const;
  const TraceStep* step_for(const std::string& variable) const;
  bool fired(const std::string& rule) const;

  /// Same model identity, inputs, bindings, trace and status.
  friend bool operator==(const DecisionInstance& a, const DecisionInstance& b);

 private:
  std::shared_ptr<const DecisionModel> model_;
  Inputs inputs_;
  std::map<std::string, Binding> bindings_;
  std::vector<TraceStep> trace_;
  InstanceStatus status_;
};

/// Read-only view of current variable values used by condition evaluation.
using Lookup = std::map<std::string, Value>;

Truth evaluate_atom(const Atom& atom, const DecisionModel& model, const Lookup& values);
Truth evaluate_condition(const Condition& cond, const DecisionModel& model, const Lookup& values);

/// Value of a rule's action under `values`; nullopt while any referenced
/// variable is unbound. Throws Error(Evaluation) on division by zero.
std::optional<Value> evaluate_action(const Rule& rule, const DecisionModel& model,
                                     const Lookup& values);

/// Checks an input against its declaration; throws Error(TypeError) or
/// Error(NotInput).
void check_input(const DecisionModel& model, const std::string& variable, const Value& value);

/// Converts loosely typed text (CLI/JSON) into a value of the variable's
/// declared kind. Throws Error(TypeError) on mismatch.
Value coerce_input(const DecisionModel& model, const std::string& variable, const std::string& text);

/// Forward-chains to a fixpoint. Rules become eligible when their condition
/// is True and their target is unset; all eligible rules of a round fire
/// together against the bindings at the start of that round.
DecisionInstance evaluate(std::shared_ptr<const DecisionModel> model, const Inputs& inputs);

/// evaluate(model, inputs patched with overrides). Overrides must name input
/// variables.
DecisionInstance evaluate_counterfactual(const DecisionInstance& instance, const Inputs& overrides);

struct Goal {
  std::string variable;
  Value value;
};

struct HowToResult {
  /// Minimal assignments of the unset inputs, in canonical order.
  std::vector<Inputs> assignments;
  /// Number of partial assignments evaluated.
  std::size_t searched = 0;
  /// Size of the partial-assignment space.
  std::size_t space = 0;

  bool reachable() const { return !assignments.empty(); }
};

inline constexpr std::size_t kDefaultSearchCap = 10'000;

/// Every minimal assignment of unset input variables (each drawn from its
/// finite domain, or left unset) that makes evaluation produce the goal.
/// Throws UnboundedSearch when an unset input has no finite domain and
/// SearchTooLarge when the partial-assignment space exceeds `cap`.
HowToResult search_how_to(std::shared_ptr<const DecisionModel> model, const Inputs& fixed,
                          const Goal& goal, std::size_t cap = kDefaultSearchCap);

/// Canonical ordering of how-to assignments: compare the (variable, domain
/// index) sequences, sorted by variable name, lexicographically.
bool assignment_less(const DecisionModel& model, const Inputs& a, const Inputs& b);

}  // namespace explaineo
