#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "explaineo/engine.hpp"
#include "explaineo/graph.hpp"
#include "explaineo/model.hpp"
#include "explaineo/verify.hpp"

namespace explaineo {

enum class QType { What, WhatIf, Why, WhyNot, HowTo, Input, Output, How, Visualisation, Whether };

/// Wire names: "what", "what_if", "why", "why_not", "how_to", "input",
/// "output", "how", "visualisation", "whether".
std::string_view to_string(QType qtype);
std::optional<QType> parse_qtype(std::string_view text);
const std::vector<QType>& all_qtypes();

/// Decision questions are about one evaluated instance; system questions
/// are about the model alone.
bool requires_instance(QType qtype);

struct Question {
  QType qtype = QType::What;
  std::optional<std::string> target;
  std::map<std::string, std::string> parameters;
  friend bool operator==(const Question&, const Question&) = default;
};

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  friend bool operator==(const Table&, const Table&) = default;
};

struct Answer {
  Question question;
  std::string text;
  std::vector<Table> tables;
  PropertyGraph graph_view;
  std::vector<SourceRef> citations;
};

enum class Vocabulary { Technical, Plain };

struct AudienceProfile {
  std::string name;
  std::vector<QType> allowed;
  std::optional<std::size_t> radius;  // graph_view trim around the target
  Vocabulary vocabulary = Vocabulary::Plain;

  bool allows(QType qtype) const;
};

/// model_expert and legal_support.
const std::vector<AudienceProfile>& builtin_profiles();
/// Throws Error(NotFound) for an unknown name.
const AudienceProfile& find_profile(const std::string& name);
/// First built-in profile allowing the qtype.
const AudienceProfile& default_profile(QType qtype);

struct ParameterSpec {
  std::string name;
  std::string type;
  bool required = false;
  std::string description;
};

struct QuestionSpec {
  QType qtype;
  std::string category;  // "decision" or "system"
  std::string purpose;
  bool target_required = false;
  std::string target_description;
  std::vector<ParameterSpec> parameters;
};

const std::vector<QuestionSpec>& question_catalogue();

/// Everything a question may look at. `graph` is the simplified model graph.
struct Context {
  std::shared_ptr<const DecisionModel> model;
  PropertyGraph graph;
  std::shared_ptr<const DecisionInstance> instance;

  static Context of(std::shared_ptr<const DecisionModel> model,
                    std::shared_ptr<const DecisionInstance> instance = nullptr);
};

Answer answer_what(const Context& ctx, Vocabulary vocab);
Answer answer_why(const Context& ctx, const std::string& target, Vocabulary vocab);
Answer answer_why_trace(const Context& ctx, const std::string& target, Vocabulary vocab);
Answer answer_what_if(const Context& ctx, const std::map<std::string, std::string>& overrides,
                      Vocabulary vocab);
Answer answer_why_not(const Context& ctx, const std::string& target,
                      const std::string& alternative, Vocabulary vocab);
/// `free` names instance inputs the search may change in addition to the
/// ones the instance leaves unset.
Answer answer_how_to(const Context& ctx, const std::string& target, const std::string& value,
                     const std::vector<std::string>& free, std::size_t cap, Vocabulary vocab);
Answer answer_input(const Context& ctx, const std::optional<std::string>& service,
                    Vocabulary vocab);
Answer answer_output(const Context& ctx, const std::optional<std::string>& service,
                     Vocabulary vocab);
Answer answer_how(const Context& ctx, const std::string& target, Vocabulary vocab);
Answer answer_visualisation(const Context& ctx, const std::string& view,
                            const std::optional<std::string>& focus, std::size_t radius);
Answer answer_whether(const Context& ctx, const std::string& check,
                      const std::optional<std::string>& service);

/// Checks the profile, dispatches on the qtype, then trims the graph view
/// to the profile's radius. Throws Error(QTypeNotAllowed) or
/// Error(InvalidQuestion) for a question the profile or context cannot
/// answer.
Answer ask(const AudienceProfile& profile, const Question& question, const Context& ctx);

}  // namespace explaineo
