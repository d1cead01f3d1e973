#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "linkforge/corpus.hpp"
#include "linkforge/fuzzy.hpp"
#include "linkforge/normalize.hpp"

namespace linkforge::fuzzy {

/// One normalized form of an entity name at one cascade stage.
struct VariantKey {
  std::string text;
  std::string entity_id;
  std::size_t stage = 0;

  friend bool operator==(const VariantKey&, const VariantKey&) = default;
  friend auto operator<=>(const VariantKey&, const VariantKey&) = default;
};

struct StageMatch {
  std::string entity_id;
  std::size_t distance = 0;
  std::size_t stage = 0;  // lowest stage reaching `distance`
};

struct HeuristicOutcome {
  enum class Kind { unique, tie, none };

  Kind kind = Kind::none;
  /// One id for unique, the sorted tied ids for tie, empty for none.
  std::vector<std::string> entity_ids;
  std::size_t distance = 0;
  /// Stage of the unique match.
  std::size_t stage = 0;
  /// Every entity within max_edit, sorted by (distance, stage, id).
  std::vector<StageMatch> matches;
};

std::string_view to_string(HeuristicOutcome::Kind kind);

/// Entity names expanded through the normalization cascade and indexed per
/// stage for bounded edit-distance lookup.
class NameIndex {
 public:
  static constexpr int kFormatVersion = 1;

  NameIndex() = default;

  /// Indexes cascade stages 0..6 of every name plus the full stage-7 set.
  /// Duplicate variants are merged; the result does not depend on entity order.
  static NameIndex build(const std::vector<corpus::Entity>& entities, const normalize::NormalizerConfig& config,
                         std::size_t max_edit = 2);

  [[nodiscard]] std::size_t max_edit() const noexcept { return max_edit_; }
  [[nodiscard]] const std::string& config_fingerprint() const noexcept { return fingerprint_; }
  [[nodiscard]] const std::vector<corpus::Entity>& entities() const noexcept { return entities_; }
  [[nodiscard]] const std::vector<VariantKey>& variants() const noexcept { return variants_; }

  /// (entity index, stage-t distance) for every entity with a stage-t variant within max_edit of `text`.
  void probe(std::size_t stage, std::u32string_view text, std::size_t max_edit,
             std::vector<std::pair<std::uint32_t, std::size_t>>& out) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  /// Throws FormatError on a wrong format tag or version.
  static NameIndex load(std::istream& in);
  static NameIndex load(const std::filesystem::path& path);

 private:
  void rebuild_buckets();

  std::size_t max_edit_ = 2;
  std::string fingerprint_;
  std::vector<corpus::Entity> entities_;  // sorted by id
  std::vector<VariantKey> variants_;      // sorted, unique
  std::array<DeletionIndex, normalize::kStageCount> stages_;
  std::array<std::vector<std::vector<std::uint32_t>>, normalize::kStageCount> term_entities_;
};

/// Cascade distance: compare stage t of the mention with stage t of each name
/// and take the minimum over stages. Unique when one entity holds the minimum,
/// tie when several do, none when nothing lies within max_edit.
/// `max_edit` is clamped to the index radius. Throws ValidationError if
/// `config` differs from the one the index was built with.
HeuristicOutcome heuristic_link(std::string_view mention, const NameIndex& index,
                                const normalize::NormalizerConfig& config, std::size_t max_edit = SIZE_MAX);

}  // namespace linkforge::fuzzy
