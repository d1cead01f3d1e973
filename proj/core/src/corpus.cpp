#include "linkforge/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::corpus {

using nlohmann::json;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::reference: return "reference";
    case Role::query: return "query";
    case Role::unassigned: break;
  }
  return "unassigned";
}

std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::train: return "train";
    case SplitTag::validation: return "validation";
    case SplitTag::test: return "test";
    case SplitTag::unsplit: break;
  }
  return "unsplit";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "reference") return Role::reference;
  if (text == "query") return Role::query;
  if (text == "unassigned" || text.empty()) return Role::unassigned;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<Entity> entities, std::vector<MentionRecord> records, SplitTag tag)
    : entities_(std::move(entities)), records_(std::move(records)), tag_(tag) {
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const auto& e = entities_[i];
    if (e.id.empty()) throw ValidationError("entity with empty id");
    if (e.canonical_name.empty()) throw ValidationError("entity '" + e.id + "' has an empty canonical name");
    if (!entity_index_.emplace(e.id, i).second) throw ValidationError("duplicate entity id '" + e.id + "'");
    by_entity_[e.id];
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!entity_index_.contains(r.entity_id)) {
      throw ValidationError("record '" + r.record_id + "' references unknown entity '" + r.entity_id + "'");
    }
    if (!record_index_.emplace(r.record_id, i).second) {
      throw ValidationError("duplicate record id '" + r.record_id + "'");
    }
    by_entity_[r.entity_id].push_back(i);
  }
}

const Entity* Corpus::find_entity(std::string_view id) const {
  auto it = entity_index_.find(std::string(id));
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

const MentionRecord* Corpus::find_record(std::string_view record_id) const {
  auto it = record_index_.find(std::string(record_id));
  return it == record_index_.end() ? nullptr : &records_[it->second];
}

const std::vector<std::size_t>& Corpus::records_of(std::string_view entity_id) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = by_entity_.find(std::string(entity_id));
  return it == by_entity_.end() ? kEmpty : it->second;
}

std::vector<const MentionRecord*> Corpus::records_with_role(Role role) const {
  std::vector<const MentionRecord*> out;
  for (const auto& r : records_) {
    if (r.role == role) out.push_back(&r);
  }
  return out;
}

bool Corpus::has_assigned_roles() const {
  return std::any_of(records_.begin(), records_.end(),
                     [](const MentionRecord& r) { return r.role != Role::unassigned; });
}

std::vector<std::string> Corpus::unlinkable_entities() const {
  std::vector<std::string> out;
  for (const auto& e : entities_) {
    const auto& idx = records_of(e.id);
    const bool has_ref = std::any_of(idx.begin(), idx.end(),
                                     [&](std::size_t i) { return records_[i].role == Role::reference; });
    if (!has_ref) out.push_back(e.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool Corpus::equivalent(const Corpus& other) const {
  auto sorted_entities = [](const Corpus& c) {
    std::vector<std::pair<std::string, std::string>> v;
    for (const auto& e : c.entities_) v.emplace_back(e.id, e.canonical_name);
    std::sort(v.begin(), v.end());
    return v;
  };
  auto record_key = [](const MentionRecord& r) {
    return std::make_tuple(r.record_id, r.entity_id, r.surface, r.sentence, r.span.begin, r.span.end,
                           static_cast<int>(r.role));
  };
  auto sorted_records = [&](const Corpus& c) {
    std::vector<decltype(record_key(std::declval<const MentionRecord&>()))> v;
    for (const auto& r : c.records_) v.push_back(record_key(r));
    std::sort(v.begin(), v.end());
    return v;
  };
  return sorted_entities(*this) == sorted_entities(other) && sorted_records(*this) == sorted_records(other);
}

// ---------------------------------------------------------------------------
// JSONL ingestion

namespace {

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

struct EntityTable {
  std::vector<Entity> entities;
  std::unordered_map<std::string, std::size_t> index;

  // Returns an error message on conflict.
  std::optional<std::string> add(const std::string& id, const std::string& name) {
    if (id.empty()) return "empty entity id";
    if (name.empty()) return "empty canonical_name";
    auto it = index.find(id);
    if (it == index.end()) {
      index.emplace(id, entities.size());
      entities.push_back({id, name});
      return std::nullopt;
    }
    if (entities[it->second].canonical_name != name) {
      return "canonical_name '" + name + "' conflicts with '" + entities[it->second].canonical_name +
             "' for entity '" + id + "'";
    }
    return std::nullopt;
  }
};

const json* find_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return nullptr;
  return &*it;
}

void ingest_entities(std::istream& in, EntityTable& table, IngestReport& report) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      report.rejected.push_back({lineno, std::string("entities: malformed JSON: ") + e.what()});
      continue;
    }
    const json* id = obj.is_object() ? find_string(obj, "id") : nullptr;
    if (id == nullptr && obj.is_object()) id = find_string(obj, "entity_id");
    const json* name = obj.is_object() ? find_string(obj, "canonical_name") : nullptr;
    if (id == nullptr || name == nullptr) {
      report.rejected.push_back({lineno, "entities: missing id or canonical_name"});
      continue;
    }
    try {
      if (auto err = table.add(id->get<std::string>(), text::nfc(name->get<std::string>()))) {
        report.rejected.push_back({lineno, "entities: " + *err});
      }
    } catch (const ValidationError& e) {
      report.rejected.push_back({lineno, std::string("entities: ") + e.what()});
    }
  }
}

}  // namespace

IngestResult ingest_jsonl(std::istream& mentions, std::istream* entities) {
  IngestReport report;
  EntityTable table;
  if (entities != nullptr) ingest_entities(*entities, table, report);

  std::vector<MentionRecord> records;
  std::set<std::tuple<std::string, std::string, std::size_t, std::size_t>> seen;
  std::set<std::string> record_ids;
  // Records without an explicit id get "L<line>" after the pass, so generated
  // ids never shadow explicit ones.
  std::vector<std::pair<std::size_t, std::string>> pending_ids;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(mentions, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      report.rejected.push_back({lineno, std::string("malformed JSON: ") + e.what()});
      continue;
    }
    if (!obj.is_object()) {
      report.rejected.push_back({lineno, "line is not a JSON object"});
      continue;
    }
    const json* entity_id = find_string(obj, "entity_id");
    const json* canonical = find_string(obj, "canonical_name");
    const json* surface = find_string(obj, "surface");
    const json* sentence = find_string(obj, "sentence");
    // Span as span_start/span_end or as a two-element "span" array.
    const json* start = nullptr;
    const json* end = nullptr;
    if (auto it = obj.find("span"); it != obj.end() && it->is_array() && it->size() == 2) {
      start = &(*it)[0];
      end = &(*it)[1];
    } else if (obj.contains("span_start") && obj.contains("span_end")) {
      start = &obj["span_start"];
      end = &obj["span_end"];
    }
    if (!entity_id || !canonical || !surface || !sentence || !start || !end || !start->is_number_unsigned() ||
        !end->is_number_unsigned()) {
      report.rejected.push_back(
          {lineno, "missing or mistyped field (entity_id, canonical_name, surface, sentence, span_start, span_end)"});
      continue;
    }

    MentionRecord rec;
    std::string name;
    try {
      rec.entity_id = entity_id->get<std::string>();
      name = text::nfc(canonical->get<std::string>());
      rec.surface = text::nfc(surface->get<std::string>());
      rec.sentence = text::nfc(sentence->get<std::string>());
    } catch (const ValidationError& e) {
      report.rejected.push_back({lineno, e.what()});
      continue;
    }
    rec.span = {start->get<std::size_t>(), end->get<std::size_t>()};

    if (auto role_it = obj.find("role"); role_it != obj.end() && !role_it->is_null()) {
      std::optional<Role> role = role_it->is_string() ? parse_role(role_it->get<std::string>()) : std::nullopt;
      if (!role) {
        report.rejected.push_back({lineno, "invalid role"});
        continue;
      }
      rec.role = *role;
    }

    const std::size_t length = text::length(rec.sentence);
    if (rec.span.begin >= rec.span.end || rec.span.end > length) {
      report.rejected.push_back({lineno, "span [" + std::to_string(rec.span.begin) + "," +
                                             std::to_string(rec.span.end) + ") outside sentence of length " +
                                             std::to_string(length)});
      continue;
    }
    const std::string covered = text::substr(rec.sentence, rec.span);
    if (covered != rec.surface) {
      report.rejected.push_back({lineno, "span covers '" + covered + "' but surface is '" + rec.surface + "'"});
      continue;
    }
    if (auto err = table.add(rec.entity_id, name)) {
      report.rejected.push_back({lineno, *err});
      continue;
    }
    if (!seen.emplace(rec.entity_id, rec.sentence, rec.span.begin, rec.span.end).second) {
      ++report.duplicates;
      continue;
    }
    if (const json* rid = find_string(obj, "record_id")) {
      rec.record_id = rid->get<std::string>();
      if (rec.record_id.empty() || !record_ids.insert(rec.record_id).second) {
        report.rejected.push_back({lineno, "duplicate or empty record_id '" + rec.record_id + "'"});
        continue;
      }
    }
    if (rec.record_id.empty()) pending_ids.emplace_back(records.size(), "L" + std::to_string(lineno));
    records.push_back(std::move(rec));
  }

  for (const auto& [idx, base] : pending_ids) {
    std::string id = base;
    for (int suffix = 2; record_ids.contains(id); ++suffix) id = base + "#" + std::to_string(suffix);
    record_ids.insert(id);
    records[idx].record_id = id;
  }

  report.accepted = records.size();
  return {Corpus(std::move(table.entities), std::move(records)), std::move(report)};
}

IngestResult ingest_jsonl(const std::filesystem::path& mentions, const std::optional<std::filesystem::path>& entities) {
  std::ifstream in(mentions);
  if (!in) throw IoError("cannot open corpus file " + mentions.string());
  if (entities) {
    std::ifstream ein(*entities);
    if (!ein) throw IoError("cannot open entities file " + entities->string());
    return ingest_jsonl(in, &ein);
  }
  return ingest_jsonl(in, nullptr);
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& r : corpus.records()) {
    json obj = {
        {"record_id", r.record_id},
        {"entity_id", r.entity_id},
        {"canonical_name", corpus.find_entity(r.entity_id)->canonical_name},
        {"surface", r.surface},
        {"sentence", r.sentence},
        {"span_start", r.span.begin},
        {"span_end", r.span.end},
    };
    if (r.role != Role::unassigned) obj["role"] = to_string(r.role);
    out << obj.dump() << '\n';
  }
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_jsonl(corpus, out);
  if (!out) throw IoError("write failed for " + path.string());
}

void write_entities_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& e : corpus.entities()) {
    out << json{{"id", e.id}, {"canonical_name", e.canonical_name}}.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Splits

namespace {

Corpus subset(const Corpus& corpus, const std::vector<std::string>& entity_ids, SplitTag tag) {
  std::set<std::string> keep(entity_ids.begin(), entity_ids.end());
  std::vector<Entity> entities;
  for (const auto& e : corpus.entities()) {
    if (keep.contains(e.id)) entities.push_back(e);
  }
  std::vector<MentionRecord> records;
  for (const auto& r : corpus.records()) {
    if (keep.contains(r.entity_id)) records.push_back(r);
  }
  return Corpus(std::move(entities), std::move(records), tag);
}

}  // namespace

EntitySplit split_entities(const Corpus& corpus, std::array<double, 3> fractions, std::uint64_t seed) {
  for (double f : fractions) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw ValidationError("split fractions must all be positive; an empty split was requested");
    }
  }
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-6) throw ValidationError("split fractions must sum to 1");

  const std::size_t n = corpus.entities().size();
  if (n < 3) {
    throw ValidationError("need at least 3 entities for 3 splits, corpus has " + std::to_string(n) +
                          " (short by " + std::to_string(3 - n) + ")");
  }

  // Largest-remainder apportionment, then guarantee every split is non-empty.
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[i] = exact - static_cast<double>(sizes[i]);
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  for (std::size_t i = 0; i < 3; ++i) {
    if (sizes[i] == 0) {
      auto largest = std::max_element(sizes.begin(), sizes.end());
      --*largest;
      sizes[i] = 1;
    }
  }

  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& e : corpus.entities()) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  rng::SplitMix64 gen(seed);
  rng::shuffle(ids.begin(), ids.end(), gen);

  auto first = ids.begin();
  std::vector<std::string> train(first, first + static_cast<std::ptrdiff_t>(sizes[0]));
  first += static_cast<std::ptrdiff_t>(sizes[0]);
  std::vector<std::string> validation(first, first + static_cast<std::ptrdiff_t>(sizes[1]));
  first += static_cast<std::ptrdiff_t>(sizes[1]);
  std::vector<std::string> test(first, ids.end());

  return {subset(corpus, train, SplitTag::train), subset(corpus, validation, SplitTag::validation),
          subset(corpus, test, SplitTag::test)};
}

RoleSplit split_reference_query(const Corpus& corpus, double ref_fraction, std::uint64_t seed, bool force) {
  if (!(ref_fraction > 0.0 && ref_fraction < 1.0)) throw ValidationError("ref_fraction must lie in (0,1)");
  if (corpus.has_assigned_roles() && !force) {
    throw ValidationError("corpus already carries reference/query roles; pass force to reassign");
  }

  RoleSplit result;
  std::vector<MentionRecord> records = corpus.records();
  std::vector<std::string> ids;
  for (const auto& e : corpus.entities()) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());

  for (const auto& id : ids) {
    std::vector<std::size_t> idx = corpus.records_of(id);
    const std::size_t n = idx.size();
    if (n == 0) {
      result.warnings.push_back("entity '" + id + "' has no records and is unlinkable");
      continue;
    }
    if (n == 1) result.warnings.push_back("entity '" + id + "' has a single record; it becomes reference only");
    // Each entity gets its own stream so adding entities does not perturb others.
    rng::SplitMix64 gen(rng::derive_seed(seed, rng::fnv1a64(id)));
    rng::shuffle(idx.begin(), idx.end(), gen);
    // The epsilon keeps 0.3 * 10 at 3 despite binary rounding; exact ties go to reference.
    auto n_ref = static_cast<std::size_t>(std::ceil(ref_fraction * static_cast<double>(n) - 1e-9));
    n_ref = std::clamp<std::size_t>(n_ref, 1, n);
    for (std::size_t k = 0; k < n; ++k) records[idx[k]].role = k < n_ref ? Role::reference : Role::query;
  }
  result.corpus = Corpus(corpus.entities(), std::move(records), corpus.split_tag());
  return result;
}

}  // namespace linkforge::corpus
