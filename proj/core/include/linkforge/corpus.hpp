#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "linkforge/types.hpp"

namespace linkforge::corpus {

enum class Role { unassigned, reference, query };
enum class SplitTag { train, validation, test, unsplit };

std::string_view to_string(Role role);
std::string_view to_string(SplitTag tag);
std::optional<Role> parse_role(std::string_view text);

struct Entity {
  std::string id;
  std::string canonical_name;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// One sentence carrying one mention of one entity. Text is stored NFC-normalized
/// and `span` counts code points, so `substr(sentence, span) == surface`.
struct MentionRecord {
  std::string record_id;
  std::string entity_id;
  std::string surface;
  std::string sentence;
  CharSpan span;
  Role role = Role::unassigned;

  friend bool operator==(const MentionRecord&, const MentionRecord&) = default;
};

/// Validated, immutable collection of entities and their mention records.
///
/// Invariants enforced at construction: entity ids are unique, canonical names
/// are non-empty, record ids are unique and every record's entity resolves.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Entity> entities, std::vector<MentionRecord> records,
         SplitTag tag = SplitTag::unsplit);

  [[nodiscard]] const std::vector<Entity>& entities() const noexcept { return entities_; }
  [[nodiscard]] const std::vector<MentionRecord>& records() const noexcept { return records_; }
  [[nodiscard]] SplitTag split_tag() const noexcept { return tag_; }

  [[nodiscard]] const Entity* find_entity(std::string_view id) const;
  [[nodiscard]] const MentionRecord* find_record(std::string_view record_id) const;
  /// Indices into records() for one entity, in corpus order.
  [[nodiscard]] const std::vector<std::size_t>& records_of(std::string_view entity_id) const;

  [[nodiscard]] std::vector<const MentionRecord*> records_with_role(Role role) const;
  [[nodiscard]] bool has_assigned_roles() const;

  /// Entities without a single reference record. These cannot be linked contextually.
  [[nodiscard]] std::vector<std::string> unlinkable_entities() const;

  /// Same entity set and same record multiset (order-insensitive).
  [[nodiscard]] bool equivalent(const Corpus& other) const;

 private:
  std::vector<Entity> entities_;
  std::vector<MentionRecord> records_;
  SplitTag tag_ = SplitTag::unsplit;
  std::unordered_map<std::string, std::size_t> entity_index_;
  std::unordered_map<std::string, std::size_t> record_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_entity_;
};

struct RejectedLine {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct IngestReport {
  std::vector<RejectedLine> rejected;
  std::size_t duplicates = 0;
  std::size_t accepted = 0;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// Reads the mention JSONL format. Bad lines are reported and skipped.
IngestResult ingest_jsonl(std::istream& mentions, std::istream* entities = nullptr);
IngestResult ingest_jsonl(const std::filesystem::path& mentions,
                          const std::optional<std::filesystem::path>& entities = std::nullopt);

void write_jsonl(const Corpus& corpus, std::ostream& out);
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);
void write_entities_jsonl(const Corpus& corpus, std::ostream& out);

struct EntitySplit {
  Corpus train;
  Corpus validation;
  Corpus test;
};

/// Partitions entities (and their records) into disjoint train/validation/test sets.
EntitySplit split_entities(const Corpus& corpus, std::array<double, 3> fractions, std::uint64_t seed);

struct RoleSplit {
  Corpus corpus;
  std::vector<std::string> warnings;
};

/// Per entity, tags ceil(ref_fraction * n) records as reference and the rest as query.
RoleSplit split_reference_query(const Corpus& corpus, double ref_fraction, std::uint64_t seed,
                                bool force = false);

}  // namespace linkforge::corpus
