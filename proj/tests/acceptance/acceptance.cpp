// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <deque>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/render.hpp"
#include "explaineo/service.hpp"
#include "testkit.hpp"

using namespace explaineo;
using namespace explaineo::testkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;  // keep the first failure
    ok = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool path_through_rule(const PropertyGraph& view, const std::string& goal) {
  // Forward search over (node, seen a rule yet) from every input message.
  std::set<std::pair<std::string, bool>> seen;
  std::deque<std::pair<std::string, bool>> queue;
  for (const Node* m : view.nodes_with(NodeLabel::InputMessage)) queue.push_back({m->id, false});
  while (!queue.empty()) {
    auto [id, ruled] = queue.front();
    queue.pop_front();
    if (!seen.insert({id, ruled}).second) continue;
    if (id == goal && ruled) return true;
    for (const auto& eid : view.out_edges(id)) {
      const Edge& e = *view.find_edge(eid);
      queue.push_back({e.to, ruled || view.node(e.to).label == NodeLabel::Rule});
    }
  }
  return false;
}

Outcome fixture_scenario() {
  Outcome o;
  const auto start = Clock::now();
  auto model = load_fixture("tax_interest");
  auto late = fixture_instance("tax_interest", "late");
  const Context ctx = Context::of(model, late);
  const auto& profile = find_profile("legal_support");
  const Answer why = ask(profile, Question{QType::Why, "owes_tax_interest", {}}, ctx);
  const Answer trace = ask(profile, Question{QType::Why, "owes_tax_interest", {{"mode", "trace"}}}, ctx);
  const double elapsed = seconds_since(start);

  if (why.text.find("paid_too_late") == std::string::npos) o.fail("text does not name paid_too_late");
  const std::string uri = model->find_rule("paid_too_late")->source->uri;
  if (why.text.find(uri) == std::string::npos) o.fail("text lacks the law link");
  std::size_t satisfied = 0;
  for (const auto& t : why.tables) {
    if (t.title != "Conditions") continue;
    for (const auto& row : t.rows) satisfied += row.at(3) == "true";
  }
  if (satisfied < 2) o.fail("fewer than two satisfied conditions listed");
  if (!path_through_rule(trace.graph_view, ids::variable("owes_tax_interest"))) {
    o.fail("trace view has no input message -> rule -> decision path");
  }
  const std::map<std::string, std::string> produced = {
      {"why_late.txt", render_text(why)},
      {"why_late.json", to_json(why).dump(2) + "\n"},
      {"why_trace_late.json", to_json(trace).dump(2) + "\n"}};
  for (const auto& [file, bytes] : produced) {
    if (read_text(golden_dir() / file) != bytes) o.fail(file + " differs from the golden file");
  }
  if (elapsed >= 1.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.ok) o.detail = std::to_string(satisfied) + " satisfied conditions, goldens match, " +
                       std::to_string(elapsed * 1000).substr(0, 5) + " ms";
  return o;
}

Outcome verification_scenario() {
  Outcome o;
  const auto start = Clock::now();
  auto crippled = load_fixture("tax_interest_crippled");
  const CheckReport io = check_io_paths(model_graph(*crippled), std::string("TaxInterest"));
  const std::set<std::string> expected_fail = {"var:interest_start_date", "var:interest_end_date"};
  std::set<std::string> failed, all;
  for (const auto& row : io.table) {
    all.insert(row.element);
    if (row.status == RowStatus::Fail) {
      failed.insert(row.element);
    } else if (row.status != RowStatus::Pass) {
      o.fail(row.element + " has status " + std::string(to_string(row.status)));
    }
  }
  if (failed != expected_fail) o.fail("io_paths fail rows differ from the two period dates");
  if (all.size() != io.table.size()) o.fail("duplicate io_paths rows");
  if (io.passed) o.fail("io_paths verdict is pass");

  auto intact = load_fixture("tax_interest");
  const auto reports = run_all_checks(*intact, std::string("TaxInterest"));
  if (reports.size() != 5) o.fail("expected five checks");
  for (const auto& r : reports) {
    if (!r.passed) o.fail("intact fixture fails " + r.check);
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 1.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.ok) o.detail = "2 fail rows of " + std::to_string(io.table.size()) + ", intact 5/5 pass";
  return o;
}

Outcome reachability_oracle() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937 rng(20240501);
  std::size_t rows = 0, fail_rows = 0;
  for (int i = 0; i < 200 && o.ok; ++i) {
    const std::string text = random_structure_model(rng, 30, 15);
    const DecisionModel model = parse_model_or_throw(text);
    const auto expected = structural_oracle(model);
    for (const auto& [check, statuses] : expected) {
      const CheckReport r = run_check(model, check);
      const auto got = row_statuses(r);
      rows += got.size();
      if (got != statuses) {
        o.fail("model " + std::to_string(i) + ": " + check + " disagrees with the oracle");
        break;
      }
      bool any_fail = false;
      for (const auto& [id, s] : statuses) {
        any_fail = any_fail || s == RowStatus::Fail;
        fail_rows += s == RowStatus::Fail;
      }
      if (r.passed == any_fail) o.fail("model " + std::to_string(i) + ": " + check + " verdict");
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.ok) o.detail = "200 models, " + std::to_string(rows) + " rows agree (" +
                       std::to_string(fail_rows) + " fail rows)";
  return o;
}

Outcome logic_oracle() {
  Outcome o;
  std::mt19937 rng(7);
  int rules = 0, unsat = 0;
  while (rules < 200 && o.ok) {
    const DecisionModel model = parse_model_or_throw(random_logic_model(rng, 10));
    const CheckReport r = check_logical(model);
    std::map<std::string, RowStatus> got;
    for (const auto& row : r.table) {
      if (row.kind == "rule") got[row.element] = row.status;
    }
    for (const auto& rule : model.rule_model) {
      const bool sat = truth_table_satisfiable(model, *rule.condition);
      unsat += !sat;
      const RowStatus want = sat ? RowStatus::Pass : RowStatus::Fail;
      auto it = got.find(ids::rule(rule.name));
      if (it == got.end() || it->second != want) {
        o.fail("rule '" + print_condition(*rule.condition) + "' expected " +
               std::string(to_string(want)));
        break;
      }
      ++rules;
    }
  }

  const std::string seeded =
      "model seeded version \"1\"\n"
      "object X { x: number\n  flag: boolean }\n"
      "rule both if x > 5 and x < 3 then flag = true\n"
      "rule either if x > 5 or x < 3 then flag = true\n";
  const CheckReport r = check_logical(parse_model_or_throw(seeded));
  for (const auto& row : r.table) {
    if (row.element == "rule:both") {
      if (row.status != RowStatus::Fail) o.fail("x > 5 and x < 3 not flagged");
      if (row.detail.find("x > 5") == std::string::npos ||
          row.detail.find("x < 3") == std::string::npos) {
        o.fail("contradiction does not cite both atoms");
      }
    }
    if (row.element == "rule:either" && row.status != RowStatus::Pass) {
      o.fail("x > 5 or x < 3 flagged");
    }
  }
  if (o.ok) o.detail = std::to_string(rules) + " rules agree (" + std::to_string(unsat) +
                       " contradictory), seeded cases correct";
  return o;
}

Outcome engine_properties() {
  Outcome o;
  std::mt19937 rng(99);
  int replays = 0, counterfactuals = 0, howtos = 0, reachable = 0, conflicts = 0;

  if (auto err = replay_trace(*fixture_instance("tax_interest", "late")); !err.empty()) {
    o.fail("fixture replay: " + err);
  }
  while (counterfactuals < 500 && o.ok) {
    auto model = std::make_shared<const DecisionModel>(parse_model_or_throw(random_engine_model(rng)));
    const Inputs base = random_inputs(rng, *model);
    std::optional<DecisionInstance> inst;
    try {
      inst.emplace(evaluate(model, base));
    } catch (const ModelConflict&) {
      ++conflicts;
      continue;
    }
    if (auto err = replay_trace(*inst); !err.empty()) {
      o.fail("replay: " + err);
      break;
    }
    ++replays;

    Inputs overrides = random_inputs(rng, *model, 0.4);
    Inputs patched = base;
    for (const auto& [k, v] : overrides) patched.insert_or_assign(k, v);
    std::optional<DecisionInstance> cf, fresh;
    std::string cf_error, fresh_error;
    try {
      cf.emplace(evaluate_counterfactual(*inst, overrides));
    } catch (const ModelConflict& e) {
      cf_error = e.what();
    }
    try {
      fresh.emplace(evaluate(model, patched));
    } catch (const ModelConflict& e) {
      fresh_error = e.what();
    }
    if (cf_error != fresh_error || cf.has_value() != fresh.has_value() || (cf && !(*cf == *fresh))) {
      o.fail("counterfactual differs from fresh evaluation");
      break;
    }
    ++counterfactuals;

    if (howtos < 150) {
      static const std::vector<std::pair<std::string, Value>> goals = {
          {"d0", Value::boolean(true)},  {"d1", Value::boolean(false)},
          {"d2", Value::boolean(true)},  {"k0", Value::enumeration("x")},
          {"k0", Value::enumeration("y")}};
      const auto& [var, value] = goals[howtos % goals.size()];
      const Inputs fixed = random_inputs(rng, *model, 0.5);
      const Goal goal{var, value};
      const auto expected = brute_force_how_to(model, fixed, goal);
      const auto got = search_how_to(model, fixed, goal);
      if (got.assignments != expected) {
        o.fail("how-to search differs from exhaustive enumeration");
        break;
      }
      ++howtos;
      reachable += got.reachable();
    }
  }
  if (o.ok) {
    o.detail = std::to_string(replays + 1) + " replays, " + std::to_string(counterfactuals) +
               " counterfactuals, " + std::to_string(howtos) + " how-to searches (" + std::to_string(reachable) +
               " reachable), " +
               std::to_string(conflicts) + " conflicting inputs skipped";
  }
  return o;
}

Outcome catalogue_coverage() {
  Outcome o;
  std::set<QType> listed;
  for (const auto& spec : question_catalogue()) listed.insert(spec.qtype);
  const auto& all = all_qtypes();
  if (question_catalogue().size() != 10 || listed.size() != 10 ||
      listed != std::set<QType>(all.begin(), all.end())) {
    o.fail("catalogue does not list exactly the ten qtypes");
  }

  auto model = load_fixture("tax_interest");
  auto late = fixture_instance("tax_interest", "late");
  const Context with = Context::of(model, late);
  const Context without = Context::of(model);
  const PropertyGraph context_graph = instantiate(model_graph(*model), *late);

  const std::map<QType, Question> questions = {
      {QType::What, {QType::What, std::nullopt, {}}},
      {QType::WhatIf, {QType::WhatIf, std::nullopt, {{"payment_date", "2023-04-20"}}}},
      {QType::Why, {QType::Why, "owes_tax_interest", {}}},
      {QType::WhyNot, {QType::WhyNot, "owes_tax_interest", {{"value", "false"}}}},
      {QType::HowTo, {QType::HowTo, "owes_tax_interest", {{"value", "true"}}}},
      {QType::Input, {QType::Input, "TaxInterest", {}}},
      {QType::Output, {QType::Output, "TaxInterest", {}}},
      {QType::How, {QType::How, "tax_interest_amount", {}}},
      {QType::Visualisation, {QType::Visualisation, std::nullopt, {{"view", "rule"}}}},
      {QType::Whether, {QType::Whether, "TaxInterest", {{"check", "io_paths"}}}}};
  int passed = 0;
  for (QType qt : all) {
    const std::string name(to_string(qt));
    const Question& q = questions.at(qt);
    const AudienceProfile& profile = default_profile(qt);
    try {
      const Answer a = ask(profile, q, with);
      const auto problems = answer_problems(to_json(a), context_graph, *model);
      if (!problems.empty()) {
        o.fail(name + ": " + problems.front());
        continue;
      }
      if (requires_instance(qt)) {
        try {
          ask(profile, q, without);
          o.fail(name + " answered without an instance");
          continue;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::InvalidQuestion) {
            o.fail(name + " without instance: wrong error");
            continue;
          }
        }
      } else {
        ask(profile, q, without);
      }
      ++passed;
    } catch (const std::exception& e) {
      o.fail(name + ": " + e.what());
    }
  }
  if (o.ok) o.detail = std::to_string(passed) + "/10 qtypes answer with schema-valid output";
  return o;
}

Outcome render_determinism() {
  Outcome o;
  const auto first = golden_outputs();
  const auto second = golden_outputs();
  if (first != second) o.fail("two runs differ");
  for (const auto& [file, bytes] : first) {
    const fs::path path = golden_dir() / file;
    if (!fs::exists(path)) {
      o.fail(file + " has no golden file");
    } else if (read_text(path) != bytes) {
      o.fail(file + " differs from the golden file");
    }
  }
  auto model = load_fixture("tax_interest");
  auto late = fixture_instance("tax_interest", "late");
  std::vector<PropertyGraph> graphs = {build_asg(*model), model_graph(*model),
                                       instantiate(model_graph(*model), *late)};
  std::mt19937 rng(31337);
  for (int i = 0; i < 50; ++i) graphs.push_back(random_graph(rng));
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    try {
      if (!(parse_graph_script(export_graph_script(graphs[i])) == graphs[i])) {
        o.fail("graph " + std::to_string(i) + " does not survive the script round trip");
      }
    } catch (const std::exception& e) {
      o.fail("graph " + std::to_string(i) + ": " + e.what());
    }
  }
  if (o.ok) o.detail = std::to_string(first.size()) + " golden files stable, " +
                       std::to_string(graphs.size()) + " graphs round-trip";
  return o;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

std::pair<int, std::string> run(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return {-1, ""};
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome interface_consistency() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("explaineo-acceptance-" + std::to_string(getpid()));
  fs::remove_all(root);
  Workspace ws(root);
  httplib::Server server;
  install_routes(server, ws);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);

  int agreed = 0;
  try {
    for (const char* m : {"tax_interest", "tax_interest_crippled", "tax_interest_howto"}) {
      auto res = client.Put("/v1/models/" + std::string(m),
                            read_text(fixture_dir() / (std::string(m) + ".dm")), "text/plain");
      if (!res || res->status / 100 != 2) throw std::runtime_error(std::string("PUT model ") + m);
    }
    const std::vector<std::tuple<std::string, std::string, std::string>> instances = {
        {"late", "tax_interest", "late"},
        {"on_time", "tax_interest", "on_time"},
        {"howto_partial", "tax_interest_howto", "howto_partial"},
        {"crippled_late", "tax_interest_crippled", "late"}};
    for (const auto& [id, m, inputs] : instances) {
      const Json body = {{"id", id}, {"inputs", Json::parse(read_text(fixture_dir() / (inputs + ".json")))}};
      auto res = client.Post("/v1/models/" + m + "/instances", body.dump(), "application/json");
      if (!res || res->status != 201) throw std::runtime_error("POST instance " + id);
    }

    const auto script = scripted_questions();
    for (std::size_t i = 0; i < script.size(); ++i) {
      const auto& s = script[i];
      Json request = {{"model", s.model}, {"question", s.question}};
      if (!s.instance.empty()) request["instance"] = s.instance;
      if (!s.profile.empty()) request["profile"] = s.profile;
      auto res = client.Post("/v1/ask", request.dump(), "application/json");
      if (!res || res->status != 200) {
        o.fail("triple " + std::to_string(i) + ": HTTP " + (res ? std::to_string(res->status) : "error"));
        continue;
      }

      std::string cmd = shell_quote(EXPLAINEO_CLI_PATH) + " --workspace " + shell_quote(root.string()) +
                        " ask " + s.question["qtype"].get<std::string>() + " --model " +
                        shell_quote(s.model) + " --format json";
      if (!s.instance.empty()) cmd += " --instance " + shell_quote(s.instance);
      if (!s.profile.empty()) cmd += " --profile " + shell_quote(s.profile);
      if (s.question["target"].is_string()) {
        cmd += " --target " + shell_quote(s.question["target"].get<std::string>());
      }
      for (const auto& [k, v] : s.question["parameters"].items()) {
        cmd += " --param " + shell_quote(k + "=" + v.get<std::string>());
      }
      const auto [code, out] = run(cmd + " 2>/dev/null");
      if (code != 0) {
        o.fail("triple " + std::to_string(i) + ": CLI exit " + std::to_string(code));
      } else if (out != res->body) {
        o.fail("triple " + std::to_string(i) + ": CLI and HTTP answers differ");
      } else {
        ++agreed;
      }
    }
    if (script.size() != 20) o.fail("expected 20 scripted triples");
  } catch (const std::exception& e) {
    o.fail(std::string("setup: ") + e.what());
  }
  server.stop();
  thread.join();
  fs::remove_all(root);
  if (o.ok) o.detail = std::to_string(agreed) + " triples byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fixture scenario: why answer on the late payment", fixture_scenario},
      {"verification scenario: crippled and intact fixture checks", verification_scenario},
      {"oracle equivalence: reachability on 200 random models", reachability_oracle},
      {"oracle equivalence: logic on 200 random rules", logic_oracle},
      {"engine properties: replay, counterfactual, how-to", engine_properties},
      {"question catalogue coverage: ten qtypes", catalogue_coverage},
      {"renderer determinism and script round trip", render_determinism},
      {"interface consistency: CLI ask vs HTTP /ask", interface_consistency},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.ok;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << " -- "
              << o.detail << std::endl;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed")
            << std::endl;
  return failures ? 1 : 0;
}
