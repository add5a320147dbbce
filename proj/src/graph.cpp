#include "explaineo/graph.hpp"

#include <array>
#include <deque>

#include "explaineo/errors.hpp"
#include "explaineo/value.hpp"

namespace explaineo {

namespace {

constexpr std::array<std::pair<NodeLabel, std::string_view>, 12> kNodeLabels{{
    {NodeLabel::ObjectType, "ObjectType"},
    {NodeLabel::Variable, "Variable"},
    {NodeLabel::Rule, "Rule"},
    {NodeLabel::Service, "Service"},
    {NodeLabel::InputMessage, "InputMessage"},
    {NodeLabel::OutputMessage, "OutputMessage"},
    {NodeLabel::Source, "Source"},
    {NodeLabel::Model, "Model"},
    {NodeLabel::Condition, "Condition"},
    {NodeLabel::Atom, "Atom"},
    {NodeLabel::Action, "Action"},
    {NodeLabel::Expression, "Expression"},
}};

constexpr std::array<std::pair<EdgeLabel, std::string_view>, 15> kEdgeLabels{{
    {EdgeLabel::RELATES_TO, "RELATES_TO"},
    {EdgeLabel::HAS_VARIABLE, "HAS_VARIABLE"},
    {EdgeLabel::CONDITION, "CONDITION"},
    {EdgeLabel::DERIVES, "DERIVES"},
    {EdgeLabel::CALC_INPUT, "CALC_INPUT"},
    {EdgeLabel::INPUT, "INPUT"},
    {EdgeLabel::OUTPUT, "OUTPUT"},
    {EdgeLabel::SOURCE_OF, "SOURCE_OF"},
    {EdgeLabel::HAS_MESSAGE, "HAS_MESSAGE"},
    {EdgeLabel::CONTAINS, "CONTAINS"},
    {EdgeLabel::HAS_CONDITION, "HAS_CONDITION"},
    {EdgeLabel::HAS_ACTION, "HAS_ACTION"},
    {EdgeLabel::OPERAND, "OPERAND"},
    {EdgeLabel::REFERS_TO, "REFERS_TO"},
    {EdgeLabel::ASSIGNS, "ASSIGNS"},
}};

const std::vector<std::string> kNoEdges;

}  // namespace

std::string_view to_string(NodeLabel label) {
  for (const auto& [l, name] : kNodeLabels) {
    if (l == label) return name;
  }
  return "?";
}

std::string_view to_string(EdgeLabel label) {
  for (const auto& [l, name] : kEdgeLabels) {
    if (l == label) return name;
  }
  return "?";
}

std::optional<NodeLabel> parse_node_label(std::string_view text) {
  for (const auto& [l, name] : kNodeLabels) {
    if (name == text) return l;
  }
  return std::nullopt;
}

std::optional<EdgeLabel> parse_edge_label(std::string_view text) {
  for (const auto& [l, name] : kEdgeLabels) {
    if (name == text) return l;
  }
  return std::nullopt;
}

std::set<EdgeLabel> all_edge_labels() {
  std::set<EdgeLabel> out;
  for (const auto& [l, name] : kEdgeLabels) out.insert(l);
  return out;
}

std::string property_text(const PropertyValue& value) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, value);
}

namespace {

std::string text_of(const Properties& props, const std::string& key) {
  auto it = props.find(key);
  if (it == props.end()) return {};
  return property_text(it->second);
}

std::optional<bool> flag_of(const Properties& props, const std::string& key) {
  auto it = props.find(key);
  if (it == props.end()) return std::nullopt;
  if (const auto* b = std::get_if<bool>(&it->second)) return *b;
  return std::nullopt;
}

}  // namespace

std::string Node::text(const std::string& key) const { return text_of(properties, key); }
std::optional<bool> Node::flag(const std::string& key) const { return flag_of(properties, key); }
std::string Edge::text(const std::string& key) const { return text_of(properties, key); }
std::optional<bool> Edge::flag(const std::string& key) const { return flag_of(properties, key); }

const Node* PropertyGraph::find_node(std::string_view id) const {
  auto it = nodes_.find(std::string(id));
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* PropertyGraph::find_edge(std::string_view id) const {
  auto it = edges_.find(std::string(id));
  return it == edges_.end() ? nullptr : &it->second;
}

const Node& PropertyGraph::node(std::string_view id) const {
  const Node* n = find_node(id);
  if (!n) throw Error(ErrorCode::UnknownElement, "unknown node '" + std::string(id) + "'");
  return *n;
}

const std::vector<std::string>& PropertyGraph::out_edges(std::string_view node) const {
  auto it = out_.find(node);
  return it == out_.end() ? kNoEdges : it->second;
}

const std::vector<std::string>& PropertyGraph::in_edges(std::string_view node) const {
  auto it = in_.find(node);
  return it == in_.end() ? kNoEdges : it->second;
}

std::vector<const Node*> PropertyGraph::nodes_with(NodeLabel label) const {
  std::vector<const Node*> out;
  for (const auto& [id, n] : nodes_) {
    if (n.label == label) out.push_back(&n);
  }
  return out;
}

void PropertyGraph::index() {
  out_.clear();
  in_.clear();
  // edges_ iterates in id order, so the adjacency lists come out sorted.
  for (const auto& [id, e] : edges_) {
    out_[e.from].push_back(id);
    in_[e.to].push_back(id);
  }
}

GraphBuilder::GraphBuilder(PropertyGraph base) : graph_(std::move(base)) {}

Node& GraphBuilder::add_node(std::string id, NodeLabel label, Properties props) {
  auto [it, fresh] = graph_.nodes_.try_emplace(id, Node{id, label, std::move(props)});
  if (!fresh) throw Error(ErrorCode::Validation, "duplicate node id '" + id + "'");
  return it->second;
}

Node& GraphBuilder::ensure_node(std::string id, NodeLabel label, Properties props) {
  auto it = graph_.nodes_.find(id);
  if (it != graph_.nodes_.end()) return it->second;
  return add_node(std::move(id), label, std::move(props));
}

Edge& GraphBuilder::add_edge(std::string id, std::string from, std::string to, EdgeLabel label,
                             Properties props) {
  if (!graph_.nodes_.count(from) || !graph_.nodes_.count(to)) {
    throw Error(ErrorCode::Validation, "edge '" + id + "' has a missing endpoint");
  }
  auto [it, fresh] = graph_.edges_.try_emplace(
      id, Edge{id, std::move(from), std::move(to), label, std::move(props)});
  if (!fresh) throw Error(ErrorCode::Validation, "duplicate edge id '" + id + "'");
  return it->second;
}

void GraphBuilder::set_node_property(std::string_view node, std::string key, PropertyValue value) {
  auto it = graph_.nodes_.find(std::string(node));
  if (it == graph_.nodes_.end()) {
    throw Error(ErrorCode::UnknownElement, "unknown node '" + std::string(node) + "'");
  }
  it->second.properties.insert_or_assign(std::move(key), std::move(value));
}

void GraphBuilder::set_edge_property(std::string_view edge, std::string key, PropertyValue value) {
  auto it = graph_.edges_.find(std::string(edge));
  if (it == graph_.edges_.end()) {
    throw Error(ErrorCode::UnknownElement, "unknown edge '" + std::string(edge) + "'");
  }
  it->second.properties.insert_or_assign(std::move(key), std::move(value));
}

bool GraphBuilder::has_node(std::string_view id) const {
  return graph_.nodes_.count(std::string(id)) > 0;
}

bool GraphBuilder::has_edge(std::string_view id) const {
  return graph_.edges_.count(std::string(id)) > 0;
}

PropertyGraph GraphBuilder::freeze() && {
  graph_.index();
  return std::move(graph_);
}

PropertyGraph filter(const PropertyGraph& graph, const NodePredicate& keep_node,
                     const EdgePredicate& keep_edge) {
  GraphBuilder b;
  for (const auto& [id, n] : graph.nodes()) {
    if (keep_node(n)) b.add_node(n.id, n.label, n.properties);
  }
  for (const auto& [id, e] : graph.edges()) {
    if (b.has_node(e.from) && b.has_node(e.to) && keep_edge(e)) {
      b.add_edge(e.id, e.from, e.to, e.label, e.properties);
    }
  }
  return std::move(b).freeze();
}

PropertyGraph induced(const PropertyGraph& graph, const std::set<std::string>& node_ids,
                      const std::optional<std::set<EdgeLabel>>& edge_labels) {
  return filter(
      graph, [&](const Node& n) { return node_ids.count(n.id) > 0; },
      [&](const Edge& e) { return !edge_labels || edge_labels->count(e.label) > 0; });
}

PropertyGraph merge(const PropertyGraph& a, const PropertyGraph& b) {
  GraphBuilder out(a);
  for (const auto& [id, n] : b.nodes()) {
    if (!out.has_node(id)) out.add_node(n.id, n.label, n.properties);
  }
  for (const auto& [id, e] : b.edges()) {
    if (!out.has_edge(id)) out.add_edge(e.id, e.from, e.to, e.label, e.properties);
  }
  return std::move(out).freeze();
}

namespace {

// Neighbours of `node` when moving along `direction`, as (edge id, node id).
template <typename Fn>
void for_each_step(const PropertyGraph& g, const std::string& node,
                   const std::set<EdgeLabel>& labels, Direction direction, Fn&& fn) {
  const auto& ids = direction == Direction::Forward ? g.out_edges(node) : g.in_edges(node);
  for (const auto& eid : ids) {
    const Edge& e = *g.find_edge(eid);
    if (!labels.count(e.label)) continue;
    fn(e, direction == Direction::Forward ? e.to : e.from);
  }
}

Direction opposite(Direction d) {
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

}  // namespace

std::set<std::string> closure(const PropertyGraph& graph, const std::set<std::string>& start,
                              const std::set<EdgeLabel>& labels, Direction direction) {
  std::set<std::string> seen;
  std::deque<std::string> queue;
  for (const auto& s : start) {
    if (graph.find_node(s) && seen.insert(s).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    for_each_step(graph, cur, labels, direction, [&](const Edge&, const std::string& next) {
      if (seen.insert(next).second) queue.push_back(next);
    });
  }
  return seen;
}

Reachability reachable(const PropertyGraph& graph, const std::set<std::string>& from,
                       const std::set<std::string>& to, const std::set<EdgeLabel>& labels,
                       Direction direction) {
  // Distance of every node to the nearest target, walking edges the other way.
  std::map<std::string, std::size_t> dist;
  std::deque<std::string> queue;
  for (const auto& t : to) {
    if (graph.find_node(t) && dist.emplace(t, 0).second) queue.push_back(t);
  }
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    const std::size_t d = dist.at(cur);
    for_each_step(graph, cur, labels, opposite(direction), [&](const Edge&, const std::string& prev) {
      if (dist.emplace(prev, d + 1).second) queue.push_back(prev);
    });
  }

  Reachability result;
  const std::string* start = nullptr;
  for (const auto& s : from) {  // std::set: ascending id order
    auto it = dist.find(s);
    if (it == dist.end()) continue;
    if (!start || it->second < dist.at(*start)) start = &s;
  }
  if (!start) return result;

  result.found = true;
  std::string cur = *start;
  result.witness.nodes.push_back(cur);
  while (dist.at(cur) > 0) {
    const std::size_t want = dist.at(cur) - 1;
    std::string best_node;
    std::string best_edge;
    for_each_step(graph, cur, labels, direction, [&](const Edge& e, const std::string& next) {
      auto it = dist.find(next);
      if (it == dist.end() || it->second != want) return;
      if (best_node.empty() || next < best_node || (next == best_node && e.id < best_edge)) {
        best_node = next;
        best_edge = e.id;
      }
    });
    result.witness.edges.push_back(best_edge);
    result.witness.nodes.push_back(best_node);
    cur = best_node;
  }
  return result;
}

PropertyGraph neighbourhood(const PropertyGraph& graph, const std::string& centre,
                            std::size_t radius, const std::set<EdgeLabel>& labels) {
  if (!graph.find_node(centre)) {
    throw Error(ErrorCode::UnknownElement, "unknown node '" + centre + "'");
  }
  std::map<std::string, std::size_t> dist{{centre, 0}};
  std::deque<std::string> queue{centre};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    const std::size_t d = dist.at(cur);
    if (d == radius) continue;
    auto visit = [&](const Edge&, const std::string& next) {
      if (dist.emplace(next, d + 1).second) queue.push_back(next);
    };
    for_each_step(graph, cur, labels, Direction::Forward, visit);
    for_each_step(graph, cur, labels, Direction::Backward, visit);
  }
  std::set<std::string> keep;
  for (const auto& [id, d] : dist) keep.insert(id);
  return induced(graph, keep, labels);
}

void ViewBuilder::node(const std::string& id, std::string_view highlight) {
  if (!builder_.has_node(id)) {
    const Node& n = source_.node(id);
    builder_.add_node(n.id, n.label, n.properties);
  }
  if (!highlight.empty()) builder_.set_node_property(id, "highlight", std::string(highlight));
}

void ViewBuilder::edge(const std::string& id, std::string_view highlight) {
  const Edge* e = source_.find_edge(id);
  if (!e) throw Error(ErrorCode::UnknownElement, "unknown edge '" + id + "'");
  node(e->from);
  node(e->to);
  if (!builder_.has_edge(id)) builder_.add_edge(e->id, e->from, e->to, e->label, e->properties);
  if (!highlight.empty()) builder_.set_edge_property(id, "highlight", std::string(highlight));
}

void ViewBuilder::path(const Path& path, std::string_view highlight) {
  for (const auto& n : path.nodes) node(n, highlight);
  for (const auto& e : path.edges) edge(e, highlight);
}

}  // namespace explaineo
