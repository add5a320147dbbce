#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "explaineo/model.hpp"

namespace explaineo {

enum class Severity { Error, Warning };

std::string_view to_string(Severity severity);

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string element;  // element id such as "rule:paid_too_late", or "model"
  std::string message;
  int line = 0;
  int column = 0;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// "3:14: error: undeclared variable 'foo' [rule:r]"
std::string format_diagnostic(const Diagnostic& d);

struct ParseResult {
  std::optional<DecisionModel> model;
  std::vector<Diagnostic> errors;

  bool ok() const { return model.has_value(); }
};

/// Parses and validates DSL text. Never throws on bad input: either the
/// model is set and `errors` holds no error-severity entries, or the model
/// is empty and `errors` is non-empty.
ParseResult parse_model(std::string_view source);

/// Checks every model invariant (declarations, references, types, messages).
/// Returns an empty list iff the model is valid.
std::vector<Diagnostic> validate_model(const DecisionModel& model);

/// Canonical DSL text; `parse_model(print_model(m))` yields a model equal
/// to `m`.
std::string print_model(const DecisionModel& model);

/// Reads and parses a file, throwing Error(Parse) with every diagnostic on
/// failure.
DecisionModel load_model(const std::filesystem::path& path);

/// Like parse_model, but throws Error(Parse) on failure.
DecisionModel parse_model_or_throw(std::string_view source);

}  // namespace explaineo
