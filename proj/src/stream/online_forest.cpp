#include "revstream/stream/online_forest.hpp"

#include "revstream/error.hpp"
#include "revstream/stream/naive_bayes.hpp"

namespace revstream {

void OnlineForestConfig::validate() const {
  if (n_trees == 0) throw InvalidArgument("online forest needs at least one tree");
  if (!(poisson_lambda > 0.0)) throw InvalidArgument("poisson lambda must be positive");
  tree.validate();
}

OnlineForest::OnlineForest(OnlineForestConfig config) : config_(config) {
  config_.validate();
  for (std::size_t i = 0; i < config_.n_trees; ++i) {
    members_.emplace_back(config_.tree);
    rngs_.emplace_back(derive_seed(config_.seed, static_cast<std::uint64_t>(i)));
  }
}

void OnlineForest::learn(const FeatureVector& x, Label y, double weight) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const unsigned k = config_.unit_weights ? 1U : rngs_[i].poisson(config_.poisson_lambda);
    if (k == 0) continue;
    members_[i].learn(x, y, weight * static_cast<double>(k));
  }
}

std::optional<ClassDistribution> OnlineForest::votes(const FeatureVector& x) const {
  ClassDistribution v{};
  bool any = false;
  for (const auto& m : members_) {
    const auto p = m.predict(x);
    if (!p) continue;
    v[index_of(*p)] += 1.0;
    any = true;
  }
  if (!any) return std::nullopt;
  return v;
}

std::optional<ClassDistribution> OnlineForest::predict_proba(const FeatureVector& x) const {
  auto v = votes(x);
  if (!v) return std::nullopt;
  const double n = total(*v);
  return ClassDistribution{(*v)[0] / n, (*v)[1] / n};
}

nlohmann::json OnlineForest::checkpoint() const {
  auto members = nlohmann::json::array();
  for (std::size_t i = 0; i < members_.size(); ++i) {
    members.push_back({{"seed", derive_seed(config_.seed, static_cast<std::uint64_t>(i))},
                       {"rng_state", rngs_[i].state()},
                       {"tree", members_[i].checkpoint()}});
  }
  return {{"kind", "arf"},
          {"version", 1},
          {"config",
           {{"n_trees", config_.n_trees},
            {"poisson_lambda", config_.poisson_lambda},
            {"seed", config_.seed},
            {"unit_weights", config_.unit_weights}}},
          {"members", std::move(members)}};
}

OnlineForest OnlineForest::from_checkpoint(const nlohmann::json& j) {
  try {
    if (j.at("kind") != "arf" || j.at("version") != 1) throw DataError("not an online forest checkpoint");
    OnlineForestConfig cfg;
    const auto& jc = j.at("config");
    cfg.n_trees = jc.at("n_trees").get<std::size_t>();
    cfg.poisson_lambda = jc.at("poisson_lambda").get<double>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();
    cfg.unit_weights = jc.at("unit_weights").get<bool>();
    const auto& jm = j.at("members");
    if (jm.size() != cfg.n_trees) throw DataError("online forest checkpoint: member count mismatch");
    if (!jm.empty()) {
      const auto& tc = jm.front().at("tree").at("config");
      cfg.tree.grace_period = tc.at("grace_period").get<double>();
      cfg.tree.split_confidence = tc.at("split_confidence").get<double>();
      cfg.tree.tie_threshold = tc.at("tie_threshold").get<double>();
    }
    OnlineForest f(cfg);
    for (std::size_t i = 0; i < jm.size(); ++i) {
      f.members_[i] = HoeffdingTree::from_checkpoint(jm[i].at("tree"));
      if (!f.rngs_[i].set_state(jm[i].at("rng_state").get<std::string>())) {
        throw DataError("online forest checkpoint: bad generator state");
      }
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed online forest checkpoint: ") + e.what());
  }
}

std::unique_ptr<StreamModel> load_checkpoint(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw DataError("checkpoint has no model kind");
  const auto kind = j.at("kind");
  if (kind == "nb") return std::make_unique<IncrementalNaiveBayes>(IncrementalNaiveBayes::from_checkpoint(j));
  if (kind == "ht") return std::make_unique<HoeffdingTree>(HoeffdingTree::from_checkpoint(j));
  if (kind == "arf") return std::make_unique<OnlineForest>(OnlineForest::from_checkpoint(j));
  throw DataError("unknown checkpoint kind " + kind.dump());
}

}  // namespace revstream
