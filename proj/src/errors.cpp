#include "explaineo/errors.hpp"

namespace explaineo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::NotInput: return "NotInput";
    case ErrorCode::ModelConflict: return "ModelConflict";
    case ErrorCode::Evaluation: return "EvaluationError";
    case ErrorCode::UnboundedSearch: return "UnboundedSearch";
    case ErrorCode::SearchTooLarge: return "SearchTooLarge";
    case ErrorCode::NotDerivable: return "NotDerivable";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::NotDerived: return "NotDerived";
    case ErrorCode::InvalidQuestion: return "InvalidQuestion";
    case ErrorCode::QTypeNotAllowed: return "QTypeNotAllowed";
    case ErrorCode::Mismatch: return "Mismatch";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Error";
}

ModelConflict::ModelConflict(std::string first_rule, std::string second_rule, std::string target)
    : Error(ErrorCode::ModelConflict, "rules '" + first_rule + "' and '" + second_rule +
                                          "' both assign different values to '" + target + "'"),
      first_(std::move(first_rule)),
      second_(std::move(second_rule)),
      target_(std::move(target)) {}

}  // namespace explaineo
