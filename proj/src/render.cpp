#include "explaineo/render.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "explaineo/errors.hpp"

namespace explaineo {

// --- text -----------------------------------------------------------------

std::string render_text(const Answer& answer) {
  std::string out = answer.text;
  if (!out.empty() && out.back() != '\n') out += '\n';
  if (!answer.citations.empty()) {
    out += "\nSources:\n";
    for (const auto& c : answer.citations) out += "- " + c.label + " <" + c.uri + ">\n";
  }
  return out;
}

std::string render_text(const CheckReport& report) {
  return report.check + ": " + (report.passed ? "pass" : "fail") + "\n" + report.text + "\n";
}

// --- tables ---------------------------------------------------------------

namespace {

std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_record(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\r\n";
}

Table report_table(const CheckReport& report) {
  Table t{report.check, {"element", "kind", "status", "detail"}, {}};
  for (const auto& row : report.table) {
    t.rows.push_back({row.element, row.kind, std::string(to_string(row.status)), row.detail});
  }
  return t;
}

}  // namespace

std::string render_table(const Table& table, TableFormat format) {
  if (format == TableFormat::Csv) {
    std::string out = csv_record(table.columns);
    for (const auto& row : table.rows) out += csv_record(row);
    return out;
  }
  std::vector<std::size_t> width(table.columns.size());
  for (std::size_t i = 0; i < table.columns.size(); ++i) width[i] = display_width(table.columns[i]);
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], display_width(row[i]));
    }
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < width.size(); ++i) {
      const std::string cell = i < cells.size() ? cells[i] : "";
      if (i) out += "  ";
      out += cell;
      if (i + 1 < width.size()) out += std::string(width[i] - display_width(cell), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = table.title + "\n" + line(table.columns);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  out += line(rule);
  for (const auto& row : table.rows) out += line(row);
  return out;
}

std::string render_table(const Answer& answer, TableFormat format) {
  std::string out;
  for (std::size_t i = 0; i < answer.tables.size(); ++i) {
    if (i) out += format == TableFormat::Csv ? "\r\n" : "\n";
    if (format == TableFormat::Csv && answer.tables.size() > 1) {
      out += csv_record({answer.tables[i].title});
    }
    out += render_table(answer.tables[i], format);
  }
  return out;
}

std::string render_table(const CheckReport& report, TableFormat format) {
  return render_table(report_table(report), format);
}

// --- DOT ------------------------------------------------------------------

namespace {

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string_view shape_of(NodeLabel label) {
  switch (label) {
    case NodeLabel::Variable: return "ellipse";
    case NodeLabel::Rule: return "box";
    case NodeLabel::InputMessage:
    case NodeLabel::OutputMessage: return "parallelogram";
    case NodeLabel::Source: return "note";
    case NodeLabel::ObjectType: return "folder";
    case NodeLabel::Service: return "component";
    case NodeLabel::Model: return "doubleoctagon";
    default: return "plaintext";
  }
}

std::string_view highlight_colour(const std::string& h) {
  if (h == "fail") return "red";
  if (h == "satisfied" || h == "assigned") return "darkgreen";
  if (h == "changed") return "darkorange";
  return "blue";
}

template <typename Element>
void emphasis(const Element& e, std::vector<std::pair<std::string, std::string>>& attrs) {
  const std::string h = e.text("highlight");
  if (h.empty()) return;
  attrs.emplace_back("color", std::string(highlight_colour(h)));
  attrs.emplace_back("penwidth", "2.5");
}

std::string attr_list(const std::vector<std::pair<std::string, std::string>>& attrs) {
  std::string out = " [";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) out += ", ";
    out += attrs[i].first + "=" + dot_quote(attrs[i].second);
  }
  return out + "]";
}

}  // namespace

std::string render_dot(const PropertyGraph& graph, const std::string& name) {
  std::string out = "digraph " + dot_quote(name) + " {\n";
  out += "  rankdir=\"LR\";\n";
  out += "  node [fontname=\"Helvetica\", fontsize=\"10\"];\n";
  out += "  edge [fontname=\"Helvetica\", fontsize=\"8\"];\n";
  for (const auto& [id, n] : graph.nodes()) {
    std::string label = n.name().empty() ? n.id : n.name();
    if (auto it = n.properties.find("value"); it != n.properties.end()) {
      label += "\n= " + property_text(it->second);
    }
    std::vector<std::pair<std::string, std::string>> attrs = {
        {"label", label}, {"shape", std::string(shape_of(n.label))}};
    if (n.flag("fired") == false || n.text("origin") == "unset") {
      attrs.emplace_back("style", "dashed");
      attrs.emplace_back("fontcolor", "gray50");
      if (n.text("highlight").empty()) attrs.emplace_back("color", "gray60");
    }
    emphasis(n, attrs);
    out += "  " + dot_quote(n.id) + attr_list(attrs) + ";\n";
  }
  for (const auto& [id, e] : graph.edges()) {
    std::vector<std::pair<std::string, std::string>> attrs = {
        {"label", std::string(to_string(e.label))}};
    if (e.flag("active") == false || e.flag("satisfied") == false) {
      attrs.emplace_back("style", "dashed");
      if (e.text("highlight").empty()) attrs.emplace_back("color", "gray60");
    }
    emphasis(e, attrs);
    out += "  " + dot_quote(e.from) + " -> " + dot_quote(e.to) + attr_list(attrs) + ";\n";
  }
  out += "}\n";
  return out;
}

namespace {

class DotReader {
 public:
  explicit DotReader(const std::string& text) : s_(text) {}

  DotDocument run() {
    DotDocument doc;
    expect_word("digraph");
    if (peek() != '{') doc.name = id();
    expect('{');
    while (true) {
      skip();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      if (pos_ >= s_.size()) fail("unterminated graph");
      const std::size_t start = pos_;
      const std::string first = id();
      skip();
      if ((first == "graph" || first == "node" || first == "edge") && peek() == '[' &&
          !quoted_at(start)) {
        attributes();
      } else if (peek() == '=') {
        ++pos_;
        id();
      } else if (s_.compare(pos_, 2, "->") == 0) {
        pos_ += 2;
        const std::string to = id();
        skip();
        DotDocument::EdgeStmt e{first, to, {}};
        if (peek() == '[') e.attributes = attributes();
        doc.edges.push_back(std::move(e));
      } else {
        std::map<std::string, std::string> attrs;
        if (peek() == '[') attrs = attributes();
        doc.nodes.emplace_back(first, std::move(attrs));
      }
      skip();
      if (peek() == ';') ++pos_;
    }
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::Parse, "dot: " + why + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect_word(const std::string& w) {
    skip();
    if (id() != w) fail("expected '" + w + "'");
  }
  bool quoted_at(std::size_t p) const { return p < s_.size() && s_[p] == '"'; }

  std::string id() {
    skip();
    if (pos_ >= s_.size()) fail("expected identifier");
    if (s_[pos_] == '"') {
      std::string out;
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
          const char next = s_[pos_ + 1];
          if (next == '"' || next == '\\') {
            out += next;
          } else if (next == 'n') {
            out += '\n';  // render_dot writes newlines this way
          } else {
            out += '\\';
            out += next;
          }
          pos_ += 2;
          continue;
        }
        out += s_[pos_++];
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
            s_[pos_] == '.' || static_cast<unsigned char>(s_[pos_]) >= 0x80)) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  std::map<std::string, std::string> attributes() {
    std::map<std::string, std::string> out;
    expect('[');
    while (peek() != ']') {
      const std::string key = id();
      expect('=');
      out[key] = id();
      const char c = peek();
      if (c == ',' || c == ';') ++pos_;
    }
    ++pos_;
    return out;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

DotDocument parse_dot(const std::string& text) { return DotReader(text).run(); }

// --- openCypher -----------------------------------------------------------

namespace {

bool plain_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string cypher_key(const std::string& key) {
  return plain_identifier(key) ? key : "`" + key + "`";
}

std::string cypher_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string cypher_double(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string out(buf, ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

std::string cypher_value(const PropertyValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return cypher_double(x);
        } else {
          return cypher_string(x);
        }
      },
      v);
}

std::string cypher_map(const std::string& id, const Properties& props) {
  std::string out = "{_id: " + cypher_string(id);
  for (const auto& [k, v] : props) out += ", " + cypher_key(k) + ": " + cypher_value(v);
  return out + "}";
}

}  // namespace

std::string export_graph_script(const PropertyGraph& graph) {
  std::string out;
  for (const auto& [id, n] : graph.nodes()) {
    out += "CREATE (:" + std::string(to_string(n.label)) + " " + cypher_map(n.id, n.properties) +
           ");\n";
  }
  for (const auto& [id, e] : graph.edges()) {
    out += "MATCH (a {_id: " + cypher_string(e.from) + "}), (b {_id: " + cypher_string(e.to) +
           "}) CREATE (a)-[:" + std::string(to_string(e.label)) + " " +
           cypher_map(e.id, e.properties) + "]->(b);\n";
  }
  return out;
}

namespace {

class CypherReader {
 public:
  explicit CypherReader(const std::string& text) : s_(text) {}

  PropertyGraph run() {
    GraphBuilder b;
    while (true) {
      skip();
      if (pos_ >= s_.size()) break;
      const std::string keyword = word();
      if (keyword == "CREATE") {
        expect("(");
        expect(":");
        const std::string label = word();
        auto node_label = parse_node_label(label);
        if (!node_label) fail("unknown node label '" + label + "'");
        auto [id, props] = property_map();
        expect(")");
        expect(";");
        b.add_node(id, *node_label, std::move(props));
      } else if (keyword == "MATCH") {
        expect("(");
        expect_word("a");
        const std::string from = property_map().first;
        expect(")");
        expect(",");
        expect("(");
        expect_word("b");
        const std::string to = property_map().first;
        expect(")");
        expect_word("CREATE");
        expect("(");
        expect_word("a");
        expect(")");
        expect("-");
        expect("[");
        expect(":");
        const std::string label = word();
        auto edge_label = parse_edge_label(label);
        if (!edge_label) fail("unknown relationship type '" + label + "'");
        auto [id, props] = property_map();
        expect("]");
        expect("->");
        expect("(");
        expect_word("b");
        expect(")");
        expect(";");
        b.add_edge(id, from, to, *edge_label, std::move(props));
      } else {
        fail("unexpected '" + keyword + "'");
      }
    }
    return std::move(b).freeze();
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::Parse, "cypher: " + why + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(std::string_view token) {
    skip();
    if (s_.compare(pos_, token.size(), token) != 0) fail("expected '" + std::string(token) + "'");
    pos_ += token.size();
  }
  void expect_word(const std::string& w) {
    if (word() != w) fail("expected '" + w + "'");
  }
  std::string word() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '`') {
      const std::size_t end = s_.find('`', pos_ + 1);
      if (end == std::string::npos) fail("unterminated quoted name");
      std::string out = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return out;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }
  std::string string_literal() {
    expect("\"");
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 'r': c = '\r'; break;
          case 't': c = '\t'; break;
          default: c = e;
        }
      }
      out += c;
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }
  PropertyValue value() {
    skip();
    if (pos_ >= s_.size()) fail("expected a value");
    const char c = s_[pos_];
    if (c == '"') return string_literal();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_++;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                  s_[pos_] == '.' || s_[pos_] == '-' || s_[pos_] == '+')) {
        ++pos_;
      }
      const std::string num = s_.substr(start, pos_ - start);
      if (num.find_first_of(".eEn") == std::string::npos) {
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), i);
        if (ec != std::errc() || p != num.data() + num.size()) fail("bad integer '" + num + "'");
        return i;
      }
      double d = 0;
      auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), d);
      if (ec != std::errc() || p != num.data() + num.size()) fail("bad number '" + num + "'");
      return d;
    }
    const std::string w = word();
    if (w == "true") return true;
    if (w == "false") return false;
    if (w == "null") return std::monostate{};
    fail("unexpected '" + w + "'");
  }
  std::pair<std::string, Properties> property_map() {
    expect("{");
    std::string id;
    Properties props;
    skip();
    while (pos_ < s_.size() && s_[pos_] != '}') {
      const std::string key = word();
      expect(":");
      PropertyValue v = value();
      if (key == "_id") {
        if (!std::holds_alternative<std::string>(v)) fail("_id must be a string");
        id = std::get<std::string>(v);
      } else {
        props[key] = std::move(v);
      }
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      skip();
    }
    expect("}");
    if (id.empty()) fail("missing _id");
    return {id, std::move(props)};
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

PropertyGraph parse_graph_script(const std::string& script) { return CypherReader(script).run(); }

}  // namespace explaineo
