#include "linkforge/heuristic.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::fuzzy {

namespace {

constexpr std::string_view kFormatTag = "linkforge.name-index";

}  // namespace

std::string_view to_string(HeuristicOutcome::Kind kind) {
  switch (kind) {
    case HeuristicOutcome::Kind::unique: return "unique";
    case HeuristicOutcome::Kind::tie: return "tie";
    case HeuristicOutcome::Kind::none: return "none";
  }
  return "none";
}

NameIndex NameIndex::build(const std::vector<corpus::Entity>& entities, const normalize::NormalizerConfig& config,
                           std::size_t max_edit) {
  if (max_edit > 3) throw ValidationError("max_edit must be in 0..3, got " + std::to_string(max_edit));
  NameIndex index;
  index.max_edit_ = max_edit;
  index.fingerprint_ = config.fingerprint();
  index.entities_ = entities;
  std::sort(index.entities_.begin(), index.entities_.end(),
            [](const corpus::Entity& a, const corpus::Entity& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < index.entities_.size(); ++i) {
    if (index.entities_[i].id == index.entities_[i - 1].id) {
      throw ValidationError("duplicate entity id '" + index.entities_[i].id + "'");
    }
  }

  for (const auto& entity : index.entities_) {
    const auto out = normalize::cascade(entity.canonical_name, config);
    for (std::size_t stage = 0; stage + 1 < normalize::kStageCount; ++stage) {
      if (!out.stages[stage].empty()) index.variants_.push_back({out.stages[stage], entity.id, stage});
    }
    for (const auto& abbreviation : out.abbreviations) {
      index.variants_.push_back({abbreviation, entity.id, normalize::kStageCount - 1});
    }
  }
  std::sort(index.variants_.begin(), index.variants_.end());
  index.variants_.erase(std::unique(index.variants_.begin(), index.variants_.end()), index.variants_.end());
  index.rebuild_buckets();
  return index;
}

void NameIndex::rebuild_buckets() {
  std::map<std::string_view, std::uint32_t> entity_pos;
  for (std::size_t i = 0; i < entities_.size(); ++i) entity_pos.emplace(entities_[i].id, static_cast<std::uint32_t>(i));
  for (std::size_t s = 0; s < normalize::kStageCount; ++s) {
    stages_[s] = DeletionIndex(max_edit_);
    term_entities_[s].clear();
  }
  for (const auto& v : variants_) {
    auto it = entity_pos.find(v.entity_id);
    if (it == entity_pos.end()) throw FormatError("variant refers to unknown entity '" + v.entity_id + "'");
    if (v.stage >= normalize::kStageCount) throw FormatError("variant stage out of range");
    const auto term = stages_[v.stage].add(text::to_u32(v.text));
    auto& owners = term_entities_[v.stage];
    if (term >= owners.size()) owners.resize(term + 1);
    if (owners[term].empty() || owners[term].back() != it->second) owners[term].push_back(it->second);
  }
}

void NameIndex::probe(std::size_t stage, std::u32string_view text, std::size_t max_edit,
                      std::vector<std::pair<std::uint32_t, std::size_t>>& out) const {
  for (const auto& hit : stages_.at(stage).lookup(text, std::min(max_edit, max_edit_))) {
    for (std::uint32_t entity : term_entities_[stage][hit.term]) out.emplace_back(entity, hit.distance);
  }
}

void NameIndex::save(std::ostream& out) const {
  nlohmann::json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["max_edit"] = max_edit_;
  doc["config_fingerprint"] = fingerprint_;
  auto& ents = doc["entities"] = nlohmann::json::array();
  for (const auto& e : entities_) ents.push_back({{"id", e.id}, {"canonical_name", e.canonical_name}});
  auto& vars = doc["variants"] = nlohmann::json::array();
  for (const auto& v : variants_) vars.push_back({v.text, v.entity_id, v.stage});
  out << doc.dump() << '\n';
  if (!out) throw IoError("failed writing name index");
}

void NameIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save(out);
}

NameIndex NameIndex::load(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("name index is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormatTag) throw FormatError("not a linkforge name index");
  if (doc.value("version", -1) != kFormatVersion) {
    throw FormatError("name index version " + doc.value("version", nlohmann::json(-1)).dump() + " unsupported, expected " +
                      std::to_string(kFormatVersion));
  }
  NameIndex index;
  try {
    index.max_edit_ = doc.at("max_edit").get<std::size_t>();
    index.fingerprint_ = doc.at("config_fingerprint").get<std::string>();
    for (const auto& e : doc.at("entities")) {
      index.entities_.push_back({e.at("id").get<std::string>(), e.at("canonical_name").get<std::string>()});
    }
    for (const auto& v : doc.at("variants")) {
      index.variants_.push_back({v.at(0).get<std::string>(), v.at(1).get<std::string>(), v.at(2).get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed name index: ") + e.what());
  }
  if (index.max_edit_ > 3) throw FormatError("name index max_edit out of range");
  index.rebuild_buckets();
  return index;
}

NameIndex NameIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load(in);
}

HeuristicOutcome heuristic_link(std::string_view mention, const NameIndex& index,
                                const normalize::NormalizerConfig& config, std::size_t max_edit) {
  if (config.fingerprint() != index.config_fingerprint()) {
    throw ValidationError("normalizer config does not match the one the name index was built with");
  }
  const auto out = normalize::cascade(text::nfc(mention), config);

  std::vector<std::pair<std::uint32_t, std::size_t>> hits;
  std::vector<StageMatch> best(index.entities().size(), StageMatch{{}, SIZE_MAX, 0});
  auto collect = [&](std::size_t stage, const std::string& text) {
    if (text.empty()) return;
    hits.clear();
    index.probe(stage, text::to_u32(text), max_edit, hits);
    for (const auto& [entity, distance] : hits) {
      auto& b = best[entity];
      if (distance < b.distance) b = {{}, distance, stage};
    }
  };
  for (std::size_t stage = 0; stage + 1 < normalize::kStageCount; ++stage) collect(stage, out.stages[stage]);
  for (const auto& abbreviation : out.abbreviations) collect(normalize::kStageCount - 1, abbreviation);

  HeuristicOutcome result;
  for (std::size_t i = 0; i < best.size(); ++i) {
    if (best[i].distance == SIZE_MAX) continue;
    best[i].entity_id = index.entities()[i].id;
    result.matches.push_back(std::move(best[i]));
  }
  std::sort(result.matches.begin(), result.matches.end(), [](const StageMatch& a, const StageMatch& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.stage != b.stage) return a.stage < b.stage;
    return a.entity_id < b.entity_id;
  });
  if (result.matches.empty()) return result;

  result.distance = result.matches.front().distance;
  for (const auto& m : result.matches) {
    if (m.distance == result.distance) result.entity_ids.push_back(m.entity_id);
  }
  std::sort(result.entity_ids.begin(), result.entity_ids.end());
  if (result.entity_ids.size() == 1) {
    result.kind = HeuristicOutcome::Kind::unique;
    result.stage = result.matches.front().stage;
  } else {
    result.kind = HeuristicOutcome::Kind::tie;
  }
  return result;
}

}  // namespace linkforge::fuzzy
