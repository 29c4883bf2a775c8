#include "revstream/explain/explain.hpp"

#include <cmath>
#include <cstdio>

#include "revstream/data_model.hpp"
#include "revstream/error.hpp"
#include "revstream/text_features.hpp"

namespace revstream {

FeatureSchema::FeatureSchema(std::size_t dimension) {
  for (std::size_t i = 0; i < dimension; ++i) names_.push_back("feature" + std::to_string(i));
  blocks_.assign(dimension, NgramBlock::kNone);
  tokens_.assign(dimension, std::string());
}

FeatureSchema FeatureSchema::for_profiles(const NgramVocabulary& vocab) {
  FeatureSchema s;
  for (auto name : dense_display_names()) {
    s.names_.emplace_back(name);
    s.blocks_.push_back(NgramBlock::kNone);
    s.tokens_.emplace_back();
  }
  const auto k = static_cast<std::uint32_t>(vocab.size());
  for (NgramBlock block : {NgramBlock::kInserted, NgramBlock::kDeleted}) {
    const char* prefix = block == NgramBlock::kInserted ? "Inserted n-gram '" : "Deleted n-gram '";
    for (std::uint32_t col = 0; col < k; ++col) {
      const auto& term = vocab.term(col);
      s.names_.push_back(prefix + term + "'");
      s.blocks_.push_back(block);
      s.tokens_.push_back(term);
    }
  }
  return s;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* subject(NgramBlock block) {
  return block == NgramBlock::kDeleted ? "The deleted text" : "The revision";
}

std::string token_list(const std::vector<std::string>& tokens) {
  std::string out = "[";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ", ";
    out += "'" + tokens[i] + "'";
  }
  return out + "]";
}

std::string predicate_text(const Predicate& p) {
  const char* op = p.op == Comparison::kLess ? " < " : " > ";
  if (p.block == NgramBlock::kNone) return p.name + op + fixed2(p.threshold);
  const char* where = p.block == NgramBlock::kDeleted ? "the deleted text" : "the revision";
  return std::string("The number of times ") + where + " contains '" + p.token + "'" + op +
         fixed2(p.threshold);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

Explanation decision_path(const DecisionTree& tree, const FeatureVector& x,
                          const FeatureSchema& schema, const std::string& sample_id,
                          std::size_t tree_id) {
  if (tree.empty()) throw InvalidArgument("cannot explain an empty tree");
  if (x.dimension != tree.n_features()) {
    throw InvalidArgument("sample has " + std::to_string(x.dimension) +
                          " features, the tree expects " + std::to_string(tree.n_features()));
  }
  if (schema.dimension() != tree.n_features()) {
    throw InvalidArgument("feature schema does not match the tree");
  }
  Explanation e;
  e.sample_id = sample_id;
  e.tree_id = tree_id;
  std::size_t i = 0;
  for (;;) {
    const auto& node = tree.node(i);
    e.nodes.push_back(i);
    e.ginis.push_back(node.gini);
    if (node.is_leaf()) break;
    const auto f = static_cast<std::size_t>(node.feature);
    Predicate p;
    p.feature = f;
    p.name = schema.name(f);
    p.threshold = node.threshold;
    p.block = schema.block(f);
    p.token = schema.token(f);
    if (x.value(f) < node.threshold) {
      p.op = Comparison::kLess;
      i = static_cast<std::size_t>(node.left);
    } else {
      p.op = Comparison::kGreater;
      i = static_cast<std::size_t>(node.right);
    }
    e.predicates.push_back(std::move(p));
  }
  e.predicted = tree.node(i).predicted_class();
  return e;
}

Explanation shortest_ensemble_path(std::span<const DecisionTree> trees, const FeatureVector& x,
                                   const FeatureSchema& schema, const std::string& sample_id) {
  std::vector<std::optional<Explanation>> paths(trees.size());
  ClassDistribution votes{};
  for (std::size_t t = 0; t < trees.size(); ++t) {
    if (trees[t].empty()) continue;
    auto e = decision_path(trees[t], x, schema, sample_id, t);
    if (total(trees[t].node(e.nodes.back()).class_counts) <= 0.0) continue;  // abstains
    votes[index_of(e.predicted)] += 1.0;
    paths[t] = std::move(e);
  }
  if (total(votes) == 0.0) throw InvalidArgument("every tree of the ensemble abstains");
  const Label vote = argmax(votes);
  std::optional<Explanation> best;
  for (auto& p : paths) {
    if (!p || p->predicted != vote) continue;
    if (!best || p->predicates.size() < best->predicates.size()) best = std::move(p);
  }
  return *best;
}

std::string render_nl(const Explanation& explanation) {
  std::string out = "For sample " + explanation.sample_id +
                    ", the model decision is based on the following facts:\n";
  const auto& ps = explanation.predicates;
  for (std::size_t i = 0; i < ps.size();) {
    if (!ps[i].is_containment()) {
      out += " " + predicate_text(ps[i]) + "\n";
      ++i;
      continue;
    }
    // Consecutive presence tests of the same kind share one line.
    std::vector<std::string> tokens;
    std::size_t j = i;
    while (j < ps.size() && ps[j].is_containment() && ps[j].block == ps[i].block &&
           ps[j].op == ps[i].op) {
      tokens.push_back(ps[j].token);
      ++j;
    }
    const char* verb = ps[i].op == Comparison::kGreater ? " contains " : " does not contain ";
    out += std::string(" ") + subject(ps[i].block) + verb + token_list(tokens) + "\n";
    i = j;
  }
  out += " Predicted class " + std::string(class_name(explanation.predicted)) + "\n";
  return out;
}

std::string export_dot(const DecisionTree& tree, const FeatureSchema& schema,
                       const Explanation* highlight) {
  std::vector<bool> on_path(tree.size(), false);
  if (highlight) {
    for (auto n : highlight->nodes) {
      if (n < tree.size()) on_path[n] = true;
    }
  }
  std::string out = "digraph Tree {\n";
  out += "  node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n";
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    std::string label;
    std::string fill;
    if (n.is_leaf()) {
      const Label cls = n.predicted_class();
      label = "class = " + std::string(class_name(cls));
      fill = cls == Label::kRevert ? "green" : "yellow";
    } else {
      label = schema.name(static_cast<std::size_t>(n.feature)) + " < " + short_number(n.threshold);
      fill = "white";
    }
    label = dot_escape(label) + "\\ngini = " + fixed2(n.gini) + "\\ncounts = [" +
            short_number(n.class_counts[0]) + ", " + short_number(n.class_counts[1]) + "]";
    out += "  " + std::to_string(i) + " [label=\"" + label + "\", fillcolor=\"" + fill + "\"";
    if (on_path[i]) out += ", penwidth=2";
    out += "];\n";
  }
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    if (n.is_leaf()) continue;
    for (int side = 0; side < 2; ++side) {
      const auto child = static_cast<std::size_t>(side == 0 ? n.left : n.right);
      out += "  " + std::to_string(i) + " -> " + std::to_string(child) + " [label=\"" +
             (side == 0 ? "True" : "False") + "\"";
      if (on_path[i] && on_path[child]) out += ", style=bold";
      out += "];\n";
    }
  }
  out += "}\n";
  return out;
}

bool is_faithful(const Explanation& explanation, const DecisionTree& tree, const FeatureVector& x) {
  if (tree.empty() || explanation.nodes.size() != explanation.predicates.size() + 1) return false;
  std::size_t i = 0;
  for (std::size_t k = 0; k < explanation.predicates.size(); ++k) {
    const auto& node = tree.node(i);
    const auto& p = explanation.predicates[k];
    if (explanation.nodes[k] != i || node.is_leaf()) return false;
    if (p.feature != static_cast<std::size_t>(node.feature) || p.threshold != node.threshold) {
      return false;
    }
    const bool less = x.value(p.feature) < p.threshold;
    if (less != (p.op == Comparison::kLess)) return false;
    i = static_cast<std::size_t>(less ? node.left : node.right);
  }
  return explanation.nodes.back() == i && tree.node(i).is_leaf() &&
         tree.node(i).predicted_class() == explanation.predicted;
}

}  // namespace revstream
