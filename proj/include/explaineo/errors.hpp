#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace explaineo {

enum class ErrorCode {
  Parse,
  Validation,
  TypeError,
  NotInput,
  ModelConflict,
  Evaluation,
  UnboundedSearch,
  SearchTooLarge,
  NotDerivable,
  UnknownElement,
  NotDerived,
  InvalidQuestion,
  QTypeNotAllowed,
  Mismatch,
  NotFound,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every recoverable failure in the library. The code
/// lets front ends (CLI exit codes, HTTP status) classify the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Two eligible rules would assign different values to the same target in
/// one evaluation round.
class ModelConflict : public Error {
 public:
  ModelConflict(std::string first_rule, std::string second_rule, std::string target);

  const std::string& first_rule() const noexcept { return first_; }
  const std::string& second_rule() const noexcept { return second_; }
  const std::string& target() const noexcept { return target_; }

 private:
  std::string first_;
  std::string second_;
  std::string target_;
};

}  // namespace explaineo
