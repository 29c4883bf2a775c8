#include "revstream/online/profile.hpp"

#include <ostream>

#include "revstream/error.hpp"

namespace revstream {

bool update_profile(EditorProfile& profile, const DailyRecord& record) {
  if (record.editor_id != profile.editor_id) {
    throw InvalidArgument("profile of '" + profile.editor_id + "' cannot absorb a record of '" +
                          record.editor_id + "'");
  }
  bool conflict = false;
  if (profile.n_records == 0) {
    profile.bot_flag = record.bot_flag;
    profile.editor_is_creator = record.editor_is_creator;
  } else {
    if (record.date < profile.last_updated) {
      throw DataError("record of " + format_day(record.date) + " predates profile update " +
                      format_day(profile.last_updated) + " for '" + profile.editor_id + "'");
    }
    conflict = record.bot_flag != profile.bot_flag ||
               record.editor_is_creator != profile.editor_is_creator;
    if (conflict) ++profile.static_conflicts;
  }

  const auto dense = dense_features(record);
  for (std::size_t i = 0; i < kMeanSlots; ++i) profile.means[i].add(dense[kStaticSlots + i]);
  for (const auto& [col, n] : record.inserted_ngrams) profile.inserted_ngrams[col] += n;
  for (const auto& [col, n] : record.deleted_ngrams) profile.deleted_ngrams[col] += n;
  profile.last_updated = record.date;
  ++profile.n_records;
  return conflict;
}

FeatureVector profile_feature_vector(const EditorProfile& profile, std::size_t vocab_size) {
  if (profile.n_records == 0) {
    throw InvalidArgument("profile of '" + profile.editor_id + "' has no observations");
  }
  FeatureVector v;
  v.dimension = profile_dimension(vocab_size);
  v.dense.resize(kDenseWidth);
  v.dense[0] = profile.bot_flag ? 1.0 : 0.0;
  v.dense[1] = profile.editor_is_creator ? 1.0 : 0.0;
  for (std::size_t i = 0; i < kMeanSlots; ++i) v.dense[kStaticSlots + i] = profile.means[i].mean;

  v.sparse.reserve(profile.inserted_ngrams.size() + profile.deleted_ngrams.size());
  auto append = [&](const SparseCounts& counts, std::size_t offset) {
    for (const auto& [col, n] : counts) {
      if (col >= vocab_size) {
        throw DataError("n-gram column " + std::to_string(col) + " is outside a vocabulary of " +
                        std::to_string(vocab_size));
      }
      if (n == 0) continue;
      v.sparse.emplace_back(static_cast<std::uint32_t>(offset + col), static_cast<double>(n));
    }
  };
  append(profile.inserted_ngrams, kDenseWidth);
  append(profile.deleted_ngrams, kDenseWidth + vocab_size);
  return v;
}

nlohmann::json to_json(const EditorProfile& profile) {
  const auto names = dense_feature_names();
  nlohmann::json means = nlohmann::json::object();
  for (std::size_t i = 0; i < kMeanSlots; ++i) {
    means[std::string(names[kStaticSlots + i])] = {{"mean", profile.means[i].mean},
                                                   {"count", profile.means[i].count}};
  }
  auto counts = [](const SparseCounts& c) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : c) j[std::to_string(k)] = v;
    return j;
  };
  return {{"editor_id", profile.editor_id},
          {"bot_flag", profile.bot_flag},
          {"editor_is_creator", profile.editor_is_creator},
          {"last_updated", format_day(profile.last_updated)},
          {"n_records", profile.n_records},
          {"static_conflicts", profile.static_conflicts},
          {"means", std::move(means)},
          {"inserted_ngrams", counts(profile.inserted_ngrams)},
          {"deleted_ngrams", counts(profile.deleted_ngrams)}};
}

const EditorProfile& ProfileStore::update(const DailyRecord& record) {
  auto [it, fresh] = profiles_.try_emplace(record.editor_id);
  if (fresh) it->second.editor_id = record.editor_id;
  if (update_profile(it->second, record)) ++conflicts_;
  return it->second;
}

const EditorProfile* ProfileStore::find(const std::string& editor_id) const {
  const auto it = profiles_.find(editor_id);
  return it == profiles_.end() ? nullptr : &it->second;
}

void ProfileStore::write_jsonl(std::ostream& out) const {
  for (const auto& [id, p] : profiles_) out << to_json(p).dump() << '\n';
}

}  // namespace revstream
