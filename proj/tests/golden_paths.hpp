#pragma once

// Constructed decision paths for the four reference explanations.
// Each is a chain tree: the sample follows the listed steps and
// every off-path child is a leaf of the other class.

#include <string>
#include <string_view>
#include <vector>

#include "revstream/data_model.hpp"
#include "revstream/error.hpp"
#include "revstream/explain/explain.hpp"
#include "revstream/text_features.hpp"
#include "revstream/tree.hpp"

namespace revstream::testing {

struct Step {
  std::size_t feature;
  double threshold;
  bool greater;
};

struct ChainCase {
  DecisionTree tree;
  FeatureVector x;
};

inline std::size_t dense_slot(std::string_view display_name) {
  const auto& names = dense_display_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == display_name) return i;
  }
  throw InvalidArgument("no slot named " + std::string(display_name));
}

inline ChainCase chain_case(const std::vector<Step>& steps, Label leaf, std::size_t dimension) {
  const Label other = leaf == Label::kRevert ? Label::kNonRevert : Label::kRevert;
  auto leaf_node = [](Label cls) {
    TreeNode n;
    n.class_counts[index_of(cls)] = 5;
    n.class_counts[1 - index_of(cls)] = 1;
    n.gini = 1.0 - (25.0 + 1.0) / 36.0;
    return n;
  };
  std::vector<TreeNode> nodes;
  std::vector<double> values(dimension, 0.0);
  std::size_t current = 0;
  nodes.emplace_back();
  for (const auto& s : steps) {
    const int on = static_cast<int>(nodes.size());
    const int off = on + 1;
    nodes.push_back(TreeNode{});
    nodes.push_back(leaf_node(other));
    auto& n = nodes[current];
    n.feature = static_cast<int>(s.feature);
    n.threshold = s.threshold;
    n.left = s.greater ? off : on;
    n.right = s.greater ? on : off;
    n.gini = 0.5;
    values[s.feature] = s.greater ? s.threshold + 1.0 : s.threshold / 2.0;
    current = static_cast<std::size_t>(on);
  }
  nodes[current] = leaf_node(leaf);
  // Internal counts sum their children, bottom-up.
  for (std::size_t i = nodes.size(); i-- > 0;) {
    auto& n = nodes[i];
    if (n.is_leaf()) continue;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      n.class_counts[c] = nodes[std::size_t(n.left)].class_counts[c] +
                          nodes[std::size_t(n.right)].class_counts[c];
    }
  }
  FeatureVector x;
  x.dimension = dimension;
  x.dense.assign(values.begin(), values.begin() + std::min<std::size_t>(kDenseWidth, dimension));
  for (std::size_t c = kDenseWidth; c < dimension; ++c) {
    if (values[c] != 0.0) x.sparse.emplace_back(static_cast<std::uint32_t>(c), values[c]);
  }
  return {DecisionTree(std::move(nodes), dimension), std::move(x)};
}

/// Vocabulary holding the tokens of the reference explanations.
inline NgramVocabulary golden_vocabulary() {
  NgramConfig cfg;
  cfg.word_min_n = 1;
  cfg.word_max_n = 1;
  cfg.char_min_n = 1;
  cfg.char_max_n = 1;
  cfg.min_df = 0.0;
  cfg.max_df = 1.0;
  const std::vector<Tokens> docs{{"wiki", "speciality", "barbeque"},
                                 {"jpg", "wikidata", "pgname", "long"}};
  return fit_ngram_vocabulary(docs, cfg);
}

struct GoldenSample {
  std::string id;
  std::vector<Step> steps;
  Label predicted;
  std::string expected;
};

inline std::vector<GoldenSample> golden_samples(const NgramVocabulary& vocab) {
  const auto ins = [&](const char* token) {
    return kDenseWidth + *vocab.word_index(token);
  };
  const auto rep = dense_slot("The average number of repeated links");
  const auto wp10ga = dense_slot("Average ORES article quality probability - WP10GAAvg");
  const auto wp10fa = dense_slot("Average ORES article quality probability - WP10FAAvg");
  const auto wp10b = dense_slot("Average ORES article quality probability - WP10BAvg");
  const auto damaging = dense_slot("Average ORES edit quality probability - damagingTrueAvg");
  const auto e_avg = dense_slot("Average ORES item quality probability - EAvg");
  const auto c_avg = dense_slot("Average ORES item quality probability - CAvg");
  const std::string head = ", the model decision is based on the following facts:\n";
  return {
      {"1",
       {{rep, 0.03, false}, {wp10ga, 0.01, true}, {wp10fa, 0.01, true}, {damaging, 0.19, false},
        {e_avg, 0.96, false}},
       Label::kNonRevert,
       "For sample 1" + head +
           " The average number of repeated links < 0.03\n"
           " Average ORES article quality probability - WP10GAAvg > 0.01\n"
           " Average ORES article quality probability - WP10FAAvg > 0.01\n"
           " Average ORES edit quality probability - damagingTrueAvg < 0.19\n"
           " Average ORES item quality probability - EAvg < 0.96\n"
           " Predicted class non-revert\n"},
      {"2",
       {{damaging, 0.19, true}, {c_avg, 0.02, false}, {ins("wiki"), 0.5, true}},
       Label::kRevert,
       "For sample 2" + head +
           " Average ORES edit quality probability - damagingTrueAvg > 0.19\n"
           " Average ORES item quality probability - CAvg < 0.02\n"
           " The revision contains ['wiki']\n"
           " Predicted class revert\n"},
      {"3",
       {{rep, 0.01, true}, {wp10b, 0.22, false}, {ins("speciality"), 0.5, true},
        {ins("barbeque"), 0.5, true}},
       Label::kRevert,
       "For sample 3" + head +
           " The average number of repeated links > 0.01\n"
           " Average ORES article quality probability - WP10BAvg < 0.22\n"
           " The revision contains ['speciality', 'barbeque']\n"
           " Predicted class revert\n"},
      {"4",
       {{rep, 0.01, false}, {ins("jpg"), 0.5, true}, {ins("wikidata"), 0.5, true},
        {ins("pgname"), 0.5, true}, {ins("long"), 0.5, true}},
       Label::kNonRevert,
       "For sample 4" + head +
           " The average number of repeated links < 0.01\n"
           " The revision contains ['jpg', 'wikidata', 'pgname', 'long']\n"
           " Predicted class non-revert\n"},
  };
}

}  // namespace revstream::testing
