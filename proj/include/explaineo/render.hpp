#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "explaineo/explain.hpp"
#include "explaineo/graph.hpp"
#include "explaineo/verify.hpp"

namespace explaineo {

/// Answer prose followed by its sources as "label <uri>" lines.
std::string render_text(const Answer& answer);
std::string render_text(const CheckReport& report);

enum class TableFormat { Aligned, Csv };

/// Every table of the answer, titled, in declared column order. CSV quoting
/// follows RFC 4180; several tables are separated by an empty line.
std::string render_table(const Answer& answer, TableFormat format);
std::string render_table(const CheckReport& report, TableFormat format);
std::string render_table(const Table& table, TableFormat format);

/// Graphviz digraph, statements ordered by id. Shapes follow the node
/// label; highlighted elements are emphasised and unfired rules dimmed.
std::string render_dot(const PropertyGraph& graph, const std::string& name = "view");

/// Result of the internal DOT reader: statements in source order.
struct DotDocument {
  std::string name;
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> nodes;
  struct EdgeStmt {
    std::string from;
    std::string to;
    std::map<std::string, std::string> attributes;
  };
  std::vector<EdgeStmt> edges;
};

/// Parses the DOT subset render_dot emits (digraph, node/edge/attribute
/// statements, quoted ids). Throws Error(Parse) with the offending offset.
DotDocument parse_dot(const std::string& text);

/// openCypher script: one CREATE per node, one MATCH ... CREATE per edge.
/// Element ids are kept in an `_id` property.
std::string export_graph_script(const PropertyGraph& graph);

/// Reads back a script produced by export_graph_script.
PropertyGraph parse_graph_script(const std::string& script);

}  // namespace explaineo
