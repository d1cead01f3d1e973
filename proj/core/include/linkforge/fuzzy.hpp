#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace linkforge::fuzzy {

/// Damerau-Levenshtein distance, optimal string alignment variant: insertions,
/// deletions, substitutions and transpositions of adjacent characters, with no
/// substring edited more than once. Note dl("ca", "abc") == 3 here, while the
/// unrestricted variant gives 2.
std::size_t dl_distance(std::u32string_view a, std::u32string_view b);
std::size_t dl_distance(std::string_view a, std::string_view b);  // UTF-8, per code point

/// Same as dl_distance but gives up (nullopt) once the distance must exceed `max`.
std::optional<std::size_t> dl_distance_within(std::u32string_view a, std::u32string_view b, std::size_t max);

/// Calls `fn` once for every distinct string obtained from `s` by deleting at
/// most `max_deletions` characters (including `s` itself).
void for_each_deletion(std::u32string_view s, std::size_t max_deletions,
                       const std::function<void(const std::u32string&)>& fn);

/// Delete-neighborhood (SymSpell-style) index over a set of terms.
///
/// Every term is stored under each of its deletion variants with up to
/// `max_edit` deletions. Two strings within OSA distance k share a variant
/// reachable with at most k deletions on each side, so probing the query's
/// own deletion variants and verifying with dl_distance finds every term
/// within distance k <= max_edit.
class DeletionIndex {
 public:
  using TermId = std::uint32_t;

  struct Hit {
    TermId term;
    std::size_t distance;
    friend bool operator==(const Hit&, const Hit&) = default;
  };

  explicit DeletionIndex(std::size_t max_edit = 2);

  /// Adds a term (identical texts share an id) and returns its id.
  TermId add(std::u32string_view term);

  /// Terms sharing a deletion variant with `query` (superset of the answer), sorted by id.
  [[nodiscard]] std::vector<TermId> candidates(std::u32string_view query, std::size_t max_distance) const;

  /// Terms within `max_distance` (clamped to max_edit), sorted by (distance, id).
  [[nodiscard]] std::vector<Hit> lookup(std::u32string_view query, std::size_t max_distance) const;

  [[nodiscard]] const std::u32string& term(TermId id) const { return terms_.at(id); }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
  [[nodiscard]] std::size_t bucket_count() const noexcept { return buckets_.size(); }
  [[nodiscard]] std::size_t max_edit() const noexcept { return max_edit_; }

 private:
  std::size_t max_edit_;
  std::vector<std::u32string> terms_;
  std::unordered_map<std::u32string, TermId> term_ids_;
  std::unordered_map<std::u32string, std::vector<TermId>> buckets_;
};

}  // namespace linkforge::fuzzy
