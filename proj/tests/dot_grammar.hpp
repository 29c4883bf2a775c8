#pragma once

// Recursive-descent checker for the subset of the DOT language the exporter
// is allowed to emit:
//
//   graph     := "digraph" id? "{" stmt* "}"
//   stmt      := (attr_stmt | edge_stmt | node_stmt) ";"?
//   attr_stmt := ("graph" | "node" | "edge") attr_list
//   edge_stmt := id "->" id attr_list?
//   node_stmt := id attr_list?
//   attr_list := "[" (id "=" id ("," | ";")?)* "]"
//   id        := [A-Za-z_][A-Za-z_0-9]* | -?[0-9]+(.[0-9]+)? | quoted string

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace revstream::testing {

struct DotGraph {
  std::set<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::vector<std::pair<std::string, std::string>>> edge_attrs;
};

class DotParser {
 public:
  explicit DotParser(std::string text) : s_(std::move(text)) {}

  /// Empty on any syntax error; `error()` then says where.
  std::optional<DotGraph> parse() {
    DotGraph g;
    if (!keyword("digraph")) return fail("expected digraph");
    skip_ws();
    if (peek() != '{') {
      if (!id()) return fail("bad graph id");
    }
    if (!punct('{')) return fail("expected {");
    while (true) {
      skip_ws();
      if (peek() == '}') break;
      if (at_end()) return fail("unterminated graph");
      if (!stmt(g)) return std::nullopt;
      skip_ws();
      if (peek() == ';') ++pos_;
    }
    ++pos_;
    skip_ws();
    if (!at_end()) return fail("trailing text");
    for (const auto& [a, b] : g.edges) {
      if (!g.nodes.count(a) || !g.nodes.count(b)) return fail("edge to undeclared node");
    }
    return g;
  }

  const std::string& error() const { return error_; }

 private:
  using Attrs = std::vector<std::pair<std::string, std::string>>;

  std::optional<DotGraph> fail(const std::string& what) {
    error_ = what + " at offset " + std::to_string(pos_);
    return std::nullopt;
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool punct(char c) {
    skip_ws();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  bool keyword(const std::string& kw) {
    skip_ws();
    if (s_.compare(pos_, kw.size(), kw) != 0) return false;
    const std::size_t end = pos_ + kw.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  std::optional<std::string> id() {
    skip_ws();
    if (at_end()) return std::nullopt;
    const char c = s_[pos_];
    std::string out;
    if (c == '"') {
      ++pos_;
      while (!at_end() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) out += s_[pos_++];
        out += s_[pos_++];
      }
      if (at_end()) return std::nullopt;
      ++pos_;
      return out;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        out += s_[pos_++];
      }
      return out;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      if (c == '-') out += s_[pos_++];
      bool digits = false;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        out += s_[pos_++];
        digits = true;
      }
      if (peek() == '.') {
        out += s_[pos_++];
        while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          out += s_[pos_++];
          digits = true;
        }
      }
      if (!digits) return std::nullopt;
      return out;
    }
    return std::nullopt;
  }

  std::optional<Attrs> attr_list() {
    Attrs attrs;
    if (!punct('[')) return std::nullopt;
    while (true) {
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return attrs;
      }
      auto key = id();
      if (!key || !punct('=')) return std::nullopt;
      auto value = id();
      if (!value) return std::nullopt;
      attrs.emplace_back(*key, *value);
      skip_ws();
      if (peek() == ',' || peek() == ';') ++pos_;
    }
  }

  bool stmt(DotGraph& g) {
    const std::size_t save = pos_;
    if (keyword("graph") || keyword("node") || keyword("edge")) {
      skip_ws();
      if (peek() == '[') {
        if (!attr_list()) return bool(fail("bad attribute list"));
        return true;
      }
      pos_ = save;
    }
    auto a = id();
    if (!a) return bool(fail("expected a statement"));
    skip_ws();
    if (s_.compare(pos_, 2, "->") == 0) {
      pos_ += 2;
      auto b = id();
      if (!b) return bool(fail("expected an edge target"));
      Attrs attrs;
      skip_ws();
      if (peek() == '[') {
        auto parsed = attr_list();
        if (!parsed) return bool(fail("bad edge attributes"));
        attrs = *parsed;
      }
      g.edges.emplace_back(*a, *b);
      g.edge_attrs.push_back(std::move(attrs));
      return true;
    }
    if (peek() == '[' && !attr_list()) return bool(fail("bad node attributes"));
    if (!g.nodes.insert(*a).second) return bool(fail("node declared twice"));
    return true;
  }

  std::string s_;
  std::size_t pos_ = 0;
  std::string error_;
};

}  // namespace revstream::testing
