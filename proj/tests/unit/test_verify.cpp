#include <doctest.h>

#include <random>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/errors.hpp"
#include "explaineo/verify.hpp"
#include "testkit.hpp"

using namespace explaineo;
using namespace explaineo::testkit;

namespace {

const char* kDecls =
    "model s\nobject O {\n"
    "  x: number\n  y: number\n  m: money\n  d: date\n  t: text\n  u: text\n"
    "  e: enum in [\"low\", \"high\"]\n  b: boolean\n  r: boolean\n"
    "  w: date in [2023-01-01, 2023-01-02]\n}\n";

SatResult sat(const std::string& cond) {
  const DecisionModel m = parse_model_or_throw(std::string(kDecls) + "rule q if " + cond + " then r = true\n");
  return satisfiable(m, *m.rule_model[0].condition);
}

Satisfiability verdict(const std::string& cond) { return sat(cond).verdict; }

std::set<std::string> failing(const CheckReport& r) {
  std::set<std::string> out;
  for (const auto& row : r.table) {
    if (row.status == RowStatus::Fail) out.insert(row.element);
  }
  return out;
}

}  // namespace

TEST_CASE("intact fixture passes every check") {
  auto m = load_fixture("tax_interest");
  const auto reports = run_all_checks(*m);
  REQUIRE(reports.size() == check_ids().size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i].check == check_ids()[i]);
    CHECK(reports[i].passed);
    CHECK_FALSE(reports[i].text.empty());
  }
}

TEST_CASE("crippled fixture fails on the interest period") {
  auto m = load_fixture("tax_interest_crippled");
  const std::set<std::string> dates = {"var:interest_start_date", "var:interest_end_date"};
  const CheckReport io = run_check(*m, "io_paths", std::string("TaxInterest"));
  CHECK_FALSE(io.passed);
  CHECK(failing(io) == dates);
  for (const auto& id : dates) {
    REQUIRE(io.graph_view.find_node(id));
    CHECK(io.graph_view.node(id).text("highlight") == "fail");
  }
  const CheckReport assigned = run_check(*m, "variables_assigned");
  CHECK(failing(assigned) == dates);
  CHECK(run_check(*m, "variables_used").passed);
  CHECK(run_check(*m, "messages_used").passed);
  CHECK(run_check(*m, "logical").passed);
}

TEST_CASE("seeded defects") {
  const std::string base =
      "model d\nobject O {\n  a: number\n  b: number\n  c: number\n  orphan: number\n  z: number\n}\n"
      "rule r1 if a > 1 then b = a + 1\n";
  SUBCASE("a variable nothing reads or writes") {
    const DecisionModel m = parse_model_or_throw(base + "service S { in I(a) out O(b) }\n");
    const auto used = check_variables_used(model_graph(m));
    CHECK(failing(used).count("var:orphan"));
    CHECK_FALSE(failing(used).count("var:a"));
  }
  SUBCASE("a derived variable without a rule") {
    const DecisionModel m = parse_model_or_throw(base + "service S { in I(a) out O(b, c) }\n");
    const auto assigned = check_variables_assigned(model_graph(m));
    CHECK(failing(assigned).count("var:c"));
    CHECK_FALSE(failing(assigned).count("var:b"));
    const auto io = check_io_paths(model_graph(m));
    CHECK(failing(io).count("var:c"));
  }
  SUBCASE("an input message nothing depends on") {
    const DecisionModel m = parse_model_or_throw(base + "service S { in I(a) in J(z) out O(b) }\n");
    const auto msgs = check_messages_used(model_graph(m));
    CHECK_FALSE(msgs.passed);
    CHECK(failing(msgs).count("msg:J"));
    CHECK_FALSE(failing(msgs).count("msg:I"));
  }
  SUBCASE("an impossible rule") {
    const DecisionModel m = parse_model_or_throw(base + "rule never if a > 3 and a < 2 then c = 1\n");
    const auto logical = check_logical(m);
    CHECK(failing(logical) == std::set<std::string>{"rule:never"});
    for (const auto& row : logical.table) {
      if (row.element == "rule:never") CHECK(row.detail == "contradiction: a > 3 and a < 2");
    }
  }
  SUBCASE("overlapping rules with different results") {
    const DecisionModel m = parse_model_or_throw(
        "model o\nobject O { a: number\n f: boolean }\n"
        "rule yes if a > 1 then f = true\nrule no if a > 2 then f = false\n"
        "rule fine if a < 0 then f = false\n");
    const auto logical = check_logical(m);
    // A warning, not a failure: the inputs may never meet both conditions.
    CHECK(logical.passed);
    std::vector<std::string> warned;
    for (const auto& row : logical.table) {
      if (row.status == RowStatus::Warn) warned.push_back(row.element);
    }
    CHECK(warned == std::vector<std::string>{"rule:yes+rule:no"});
    CHECK(logical.text.find("1 rule pair(s)") != std::string::npos);
  }
}

TEST_CASE("unknown checks and services") {
  auto m = load_fixture("tax_interest");
  CHECK_THROWS_AS(run_check(*m, "nope"), Error);
  try {
    run_check(*m, "io_paths", std::string("NoSuchService"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownElement);
  }
}

TEST_CASE("satisfiability over numbers, money and dates") {
  CHECK(verdict("x > 1 and x < 2") == Satisfiability::Satisfiable);
  CHECK(verdict("x > 2 and x < 2") == Satisfiability::Unsatisfiable);
  CHECK(verdict("x >= 2 and x <= 2") == Satisfiability::Satisfiable);
  CHECK(verdict("x < y and y < x") == Satisfiability::Unsatisfiable);
  CHECK(verdict("x <= y and y <= x") == Satisfiability::Satisfiable);
  CHECK(verdict("x < y and y < 3 and x > 2") == Satisfiability::Satisfiable);
  // Dates and money live on a grid.
  CHECK(verdict("d > 2023-01-01 and d < 2023-01-02") == Satisfiability::Unsatisfiable);
  CHECK(verdict("d > 2023-01-01 and d < 2023-01-03") == Satisfiability::Satisfiable);
  CHECK(verdict("m > 1.00 and m < 1.01") == Satisfiability::Unsatisfiable);
  CHECK(verdict("m > 1.00 and m < 1.02") == Satisfiability::Satisfiable);
  // Money against a number is compared on the same scale.
  CHECK(verdict("m > x and x > 5 and m < 5") == Satisfiability::Unsatisfiable);
}

TEST_CASE("inequality") {
  CHECK(verdict("x != 1") == Satisfiability::Satisfiable);
  CHECK(verdict("x >= 1 and x <= 1 and x != 1") == Satisfiability::Unsatisfiable);
  CHECK(verdict("x = y and x != y") == Satisfiability::Unsatisfiable);
  CHECK(verdict("x >= 1 and x <= 2 and x != 1 and x != 2") == Satisfiability::Satisfiable);
  // Exhausting a small grid by exclusions is left undecided.
  CHECK(verdict("d >= 2023-01-01 and d <= 2023-01-02 and d != 2023-01-01 and d != 2023-01-02") ==
        Satisfiability::Unknown);
  CHECK(verdict("d >= 2023-01-01 and d <= 2023-01-05 and d != 2023-01-01 and d != 2023-01-02") ==
        Satisfiability::Satisfiable);
}

TEST_CASE("finite domains, text and negation") {
  CHECK(verdict("e = \"low\" and e = \"high\"") == Satisfiability::Unsatisfiable);
  CHECK(verdict("e != \"low\" and e != \"high\"") == Satisfiability::Unsatisfiable);
  CHECK(verdict("b and not b") == Satisfiability::Unsatisfiable);
  CHECK(verdict("b or not b") == Satisfiability::Satisfiable);
  CHECK(verdict("w > 2023-01-01 and w < 2023-01-02") == Satisfiability::Unsatisfiable);
  CHECK(verdict("w > d and d < 2023-01-02") == Satisfiability::Satisfiable);
  CHECK(verdict("w > d and d > 2023-01-01") == Satisfiability::Unsatisfiable);
  CHECK(verdict("w < d and d < 2023-01-02") == Satisfiability::Unsatisfiable);
  CHECK(verdict("t = \"a\" and t = \"b\"") == Satisfiability::Unsatisfiable);
  CHECK(verdict("t = u and u = \"a\" and t != \"a\"") == Satisfiability::Unsatisfiable);
  CHECK(verdict("t != u") == Satisfiability::Satisfiable);
  CHECK(verdict("not (x > 1 or x < 0) and x > 0.5") == Satisfiability::Satisfiable);
  CHECK(verdict("not (x > 1 or x < 0) and x > 2") == Satisfiability::Unsatisfiable);
  const auto r = sat("b and x > 3 and x < 1");
  CHECK(r.conflict == std::vector<std::string>{"x > 3", "x < 1"});
}

TEST_CASE("logic agrees with a truth table on finite models") {
  std::mt19937 rng(99);
  for (int i = 0; i < 60; ++i) {
    const DecisionModel m = parse_model_or_throw(random_logic_model(rng, 4));
    for (const auto& rule : m.rule_model) {
      if (!rule.condition) continue;
      const bool expected = truth_table_satisfiable(m, *rule.condition);
      const auto got = satisfiable(m, *rule.condition).verdict;
      CAPTURE(print_condition(*rule.condition));
      CHECK(got == (expected ? Satisfiability::Satisfiable : Satisfiability::Unsatisfiable));
    }
  }
}

TEST_CASE("structural checks agree with the closure oracle") {
  std::mt19937 rng(4242);
  for (int i = 0; i < 40; ++i) {
    const DecisionModel m = parse_model_or_throw(random_structure_model(rng, 20, 10));
    for (const auto& [check, statuses] : structural_oracle(m)) {
      CAPTURE(check);
      CHECK(row_statuses(run_check(m, check)) == statuses);
    }
  }
}

TEST_CASE("removing a rule never repairs a check") {
  // Dropping a rule can only remove paths and assignments, so every row
  // that failed before still fails.
  std::mt19937 rng(17);
  for (int i = 0; i < 40; ++i) {
    const DecisionModel m = parse_model_or_throw(random_structure_model(rng, 20, 10));
    if (m.rule_model.empty()) continue;
    DecisionModel fewer = m;
    fewer.rule_model.erase(fewer.rule_model.begin() +
                           static_cast<long>(rng() % fewer.rule_model.size()));
    for (const std::string check : {"io_paths", "variables_assigned", "messages_used"}) {
      const auto before = row_statuses(run_check(m, check));
      const auto after = row_statuses(run_check(fewer, check));
      for (const auto& [key, status] : before) {
        if (status != RowStatus::Fail) continue;
        CAPTURE(key);
        REQUIRE(after.count(key));
        CHECK(after.at(key) == RowStatus::Fail);
      }
    }
  }
}
