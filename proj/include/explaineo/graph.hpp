#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace explaineo {

/// Closed node vocabulary. The first seven labels make up the simplified
/// legal-analysis graph; the remaining ones appear only in the abstract
/// syntax graph.
enum class NodeLabel {
  ObjectType,
  Variable,
  Rule,
  Service,
  InputMessage,
  OutputMessage,
  Source,
  // abstract syntax graph only
  Model,
  Condition,
  Atom,
  Action,
  Expression,
};

enum class EdgeLabel {
  RELATES_TO,
  HAS_VARIABLE,
  CONDITION,
  DERIVES,
  CALC_INPUT,
  INPUT,
  OUTPUT,
  SOURCE_OF,
  HAS_MESSAGE,
  // abstract syntax graph only
  CONTAINS,
  HAS_CONDITION,
  HAS_ACTION,
  OPERAND,
  REFERS_TO,
  ASSIGNS,
};

std::string_view to_string(NodeLabel label);
std::string_view to_string(EdgeLabel label);
std::optional<NodeLabel> parse_node_label(std::string_view text);
std::optional<EdgeLabel> parse_edge_label(std::string_view text);

using PropertyValue = std::variant<std::monostate, bool, std::int64_t, double, std::string>;
using Properties = std::map<std::string, PropertyValue>;

std::string property_text(const PropertyValue& value);

struct Node {
  std::string id;
  NodeLabel label = NodeLabel::Variable;
  Properties properties;
  friend bool operator==(const Node&, const Node&) = default;

  /// String property or empty.
  std::string text(const std::string& key) const;
  std::optional<bool> flag(const std::string& key) const;
  std::string name() const { return text("name"); }
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  EdgeLabel label = EdgeLabel::CONTAINS;
  Properties properties;
  friend bool operator==(const Edge&, const Edge&) = default;

  std::string text(const std::string& key) const;
  std::optional<bool> flag(const std::string& key) const;
};

/// Immutable directed labelled multigraph. Built through GraphBuilder;
/// nodes and edges iterate in id order.
class PropertyGraph {
 public:
  PropertyGraph() = default;

  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }

  const Node* find_node(std::string_view id) const;
  const Edge* find_edge(std::string_view id) const;
  const Node& node(std::string_view id) const;

  /// Edge ids leaving / entering a node, sorted.
  const std::vector<std::string>& out_edges(std::string_view node) const;
  const std::vector<std::string>& in_edges(std::string_view node) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::vector<const Node*> nodes_with(NodeLabel label) const;

  friend bool operator==(const PropertyGraph& a, const PropertyGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  friend class GraphBuilder;
  void index();

  std::map<std::string, Node> nodes_;
  std::map<std::string, Edge> edges_;
  std::map<std::string, std::vector<std::string>, std::less<>> out_;
  std::map<std::string, std::vector<std::string>, std::less<>> in_;
};

/// Mutable staging area for a PropertyGraph. Rejects duplicate ids and
/// edges whose endpoints are missing.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  explicit GraphBuilder(PropertyGraph base);

  Node& add_node(std::string id, NodeLabel label, Properties props = {});
  Edge& add_edge(std::string id, std::string from, std::string to, EdgeLabel label,
                 Properties props = {});
  /// add_node unless the id already exists.
  Node& ensure_node(std::string id, NodeLabel label, Properties props = {});
  void set_node_property(std::string_view node, std::string key, PropertyValue value);
  void set_edge_property(std::string_view edge, std::string key, PropertyValue value);

  bool has_node(std::string_view id) const;
  bool has_edge(std::string_view id) const;

  PropertyGraph freeze() &&;

 private:
  PropertyGraph graph_;
};

struct Path {
  std::vector<std::string> nodes;
  std::vector<std::string> edges;
};

/// Collects a view of an existing graph. Copied nodes and edges keep their
/// ids and properties; adding an edge adds its endpoints.
class ViewBuilder {
 public:
  explicit ViewBuilder(const PropertyGraph& source) : source_(source) {}

  /// An empty highlight leaves any earlier highlight in place.
  void node(const std::string& id, std::string_view highlight = {});
  void edge(const std::string& id, std::string_view highlight = {});
  void path(const Path& path, std::string_view highlight);
  bool has_node(std::string_view id) const { return builder_.has_node(id); }

  PropertyGraph freeze() && { return std::move(builder_).freeze(); }

 private:
  const PropertyGraph& source_;
  GraphBuilder builder_;
};

using NodePredicate = std::function<bool(const Node&)>;
using EdgePredicate = std::function<bool(const Edge&)>;

/// Kept nodes plus kept edges whose endpoints are both kept.
PropertyGraph filter(const PropertyGraph& graph, const NodePredicate& keep_node,
                     const EdgePredicate& keep_edge);

/// Subgraph induced by a node id set; edges limited to `edge_labels` when
/// given.
PropertyGraph induced(const PropertyGraph& graph, const std::set<std::string>& node_ids,
                      const std::optional<std::set<EdgeLabel>>& edge_labels = std::nullopt);

/// Union of two subgraphs of the same graph (properties from `a` win).
PropertyGraph merge(const PropertyGraph& a, const PropertyGraph& b);

enum class Direction { Forward, Backward };

struct Reachability {
  bool found = false;
  Path witness;
};

/// Shortest path from any `from` node to any `to` node using only edges with
/// allowed labels, followed along (Forward) or against (Backward) their
/// direction. Among shortest paths the witness has the lexicographically
/// smallest node id sequence. A node in both sets is a zero-length path.
Reachability reachable(const PropertyGraph& graph, const std::set<std::string>& from,
                       const std::set<std::string>& to, const std::set<EdgeLabel>& labels,
                       Direction direction = Direction::Forward);

/// Node ids reachable from `start` (inclusive) through allowed edges.
std::set<std::string> closure(const PropertyGraph& graph, const std::set<std::string>& start,
                              const std::set<EdgeLabel>& labels, Direction direction);

/// Nodes within `radius` undirected hops of `centre` over allowed labels,
/// with the allowed-label edges among them. Throws Error(UnknownElement) for
/// a missing centre.
PropertyGraph neighbourhood(const PropertyGraph& graph, const std::string& centre,
                            std::size_t radius, const std::set<EdgeLabel>& labels);

std::set<EdgeLabel> all_edge_labels();

}  // namespace explaineo
