#include <doctest.h>

#include <random>

#include "explaineo/builder.hpp"
#include "explaineo/dsl.hpp"
#include "explaineo/errors.hpp"
#include "testkit.hpp"

using namespace explaineo;
using namespace explaineo::testkit;

TEST_CASE("ASG round trip on the fixtures") {
  for (const char* name : {"tax_interest", "tax_interest_crippled", "tax_interest_howto"}) {
    auto m = load_fixture(name);
    const PropertyGraph asg = build_asg(*m);
    CHECK(model_from_asg(asg) == *m);
    CHECK(build_asg(model_from_asg(asg)) == asg);
  }
}

TEST_CASE("ASG round trip on random models") {
  std::mt19937 rng(3);
  for (int i = 0; i < 120; ++i) {
    const std::string text = i % 2 ? random_structure_model(rng) : random_engine_model(rng);
    const DecisionModel m = parse_model_or_throw(text);
    CAPTURE(text);
    CHECK(model_from_asg(build_asg(m)) == m);
  }
}

TEST_CASE("an empty model is a single node") {
  const DecisionModel m = parse_model_or_throw("model empty\n");
  const auto asg = build_asg(m);
  CHECK(asg.node_count() == 1);
  CHECK(asg.edge_count() == 0);
  CHECK(model_from_asg(asg) == m);
}

TEST_CASE("non-ASG graphs are rejected") {
  GraphBuilder b;
  b.add_node("x", NodeLabel::Rule);
  CHECK_THROWS_AS(model_from_asg(std::move(b).freeze()), Error);
}

TEST_CASE("simplified graph follows the schema") {
  std::mt19937 rng(8);
  std::vector<std::shared_ptr<const DecisionModel>> models = {load_fixture("tax_interest")};
  for (int i = 0; i < 60; ++i) {
    models.push_back(std::make_shared<const DecisionModel>(parse_model_or_throw(random_structure_model(rng))));
  }
  for (const auto& m : models) {
    const PropertyGraph g = model_graph(*m);
    for (const auto& [id, n] : g.nodes()) {
      CHECK(n.label != NodeLabel::Condition);
      CHECK(n.label != NodeLabel::Atom);
      CHECK(n.label != NodeLabel::Expression);
      CHECK(n.label != NodeLabel::Action);
    }
    for (const auto& [id, e] : g.edges()) {
      CAPTURE(id);
      CHECK(schema_allows(e.label, g.node(e.from).label, g.node(e.to).label));
    }
    CHECK(g.nodes_with(NodeLabel::Rule).size() == m->rule_model.size());
    CHECK(g.nodes_with(NodeLabel::Variable).size() == m->variables().size());
  }
}

TEST_CASE("simplified fixture graph") {
  auto m = load_fixture("tax_interest");
  const PropertyGraph g = model_graph(*m);
  const Node& rule = g.node("rule:paid_too_late");
  CHECK(rule.text("condition") == "payment_overdue = true and payment_date > payment_due_date");
  CHECK(rule.text("action") == "owes_tax_interest = true");
  CHECK(g.find_edge(edge_id(EdgeLabel::CONDITION, "var:payment_date", "rule:paid_too_late")));
  CHECK(g.find_edge(edge_id(EdgeLabel::DERIVES, "rule:paid_too_late", "var:owes_tax_interest")));
  CHECK(g.find_edge(edge_id(EdgeLabel::CALC_INPUT, "var:tax_amount", "rule:tax_interest_calculation")));
  CHECK(edge_id(EdgeLabel::DERIVES, "a", "b") == "DERIVES:a->b");
  CHECK_FALSE(schema_allows(EdgeLabel::DERIVES, NodeLabel::Variable, NodeLabel::Rule));
  CHECK(schema_allows(EdgeLabel::DERIVES, NodeLabel::Rule, NodeLabel::Variable));
}

TEST_CASE("instantiate decorates without changing topology") {
  auto late = fixture_instance("tax_interest", "late");
  const PropertyGraph g = model_graph(late->model());
  const PropertyGraph d = instantiate(g, *late);
  CHECK(d.node_count() == g.node_count());
  CHECK(d.edge_count() == g.edge_count());
  for (const auto& [id, e] : g.edges()) {
    REQUIRE(d.find_edge(id));
    CHECK(d.find_edge(id)->from == e.from);
    CHECK(d.find_edge(id)->to == e.to);
  }
  CHECK(d.node("var:owes_tax_interest").text("value") == "true");
  CHECK(d.node("var:owes_tax_interest").text("origin") == "derived");
  CHECK(d.node("var:owes_tax_interest").text("derived_by") == "paid_too_late");
  CHECK(d.node("var:tax_amount").text("origin") == "input");
  CHECK(d.node("rule:paid_too_late").flag("fired") == true);
  CHECK(d.node("rule:no_tax_interest").flag("fired") == false);
  CHECK(d.find_edge(edge_id(EdgeLabel::CONDITION, "var:payment_date", "rule:paid_too_late"))->flag("satisfied") ==
        true);
  CHECK(d.find_edge(edge_id(EdgeLabel::DERIVES, "rule:paid_too_late", "var:owes_tax_interest"))->flag("active") ==
        true);

  auto on_time = fixture_instance("tax_interest", "on_time");
  const PropertyGraph o = instantiate(g, *on_time);
  CHECK(o.node("var:interest_days").text("value").empty());
  CHECK(o.find_edge(edge_id(EdgeLabel::CONDITION, "var:payment_date", "rule:paid_too_late"))->flag("satisfied") ==
        false);
}

TEST_CASE("instantiate refuses a foreign instance") {
  auto late = fixture_instance("tax_interest", "late");
  const auto other = model_graph(parse_model_or_throw("model x\nobject O { a: number }\n"));
  try {
    instantiate(other, *late);
    FAIL("expected Mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Mismatch);
  }
  // Same names, two rules fewer.
  const auto crippled = model_graph(*load_fixture("tax_interest_crippled"));
  CHECK_THROWS_AS(instantiate(crippled, *late), Error);
}
