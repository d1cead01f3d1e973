#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linkforge/corpus.hpp"
#include "linkforge/ctxlink.hpp"

namespace linkforge::synonyms {

struct NounSpan {
  std::string noun;
  CharSpan span;

  friend bool operator==(const NounSpan&, const NounSpan&) = default;
};

/// Finds nouns in a sentence. Spans are code point offsets into the NFC sentence.
class TaggerPort {
 public:
  virtual ~TaggerPort() = default;
  virtual std::vector<NounSpan> nouns(std::string_view sentence) const = 0;
};

/// Treats capitalized tokens as nouns, which fits German orthography. Skips
/// the sentence-initial token and stopwords; edge punctuation is trimmed.
class CapitalizationTagger final : public TaggerPort {
 public:
  explicit CapitalizationTagger(std::unordered_set<std::string> stopwords);
  /// Uses the shipped German and English stopword lists.
  CapitalizationTagger();

  std::vector<NounSpan> nouns(std::string_view sentence) const override;

 private:
  std::unordered_set<std::string> stopwords_;
};

std::vector<NounSpan> detect_nouns(std::string_view sentence, const TaggerPort& tagger);

enum class Judgment { match, non_match, maybe };

std::string_view to_string(Judgment judgment);
std::optional<Judgment> parse_judgment(std::string_view text);

struct SynonymSuggestion {
  std::string noun;
  double distance = 0.0;
  std::string record_ref;
  /// Already registered as a name of the entity.
  bool known = false;
  std::optional<Judgment> judgment;
};

/// Links one mention in context.
using MentionLinker = std::function<ctx::LinkResult(std::string_view mention, std::string_view sentence, CharSpan span)>;

/// Distance of a rank-1 answer on one scale: edit distance for heuristic
/// answers, cosine distance for bi, 1 - probability for cross.
double suggestion_distance(const ctx::RankedEntity& top);

/// Links every detected noun of every corpus sentence and keeps those whose
/// rank-1 entity is `entity`. Nouns are merged case-insensitively at their
/// smallest distance (ties: smallest record id) and sorted by (distance, folded noun).
std::vector<SynonymSuggestion> discover_synonyms(const corpus::Entity& entity, const corpus::Corpus& corpus,
                                                 const MentionLinker& linker, const TaggerPort& tagger,
                                                 const std::vector<std::string>& known = {});

/// Mean over relevant positions of precision at that position. Zero when
/// nothing is relevant. Throws ValidationError on an empty list.
double average_precision(const std::vector<Judgment>& ranked, bool maybe_is_relevant = false);
/// Unjudged suggestions count as not relevant; at least one must be judged.
double average_precision(const std::vector<SynonymSuggestion>& ranked, bool maybe_is_relevant = false);

nlohmann::json to_json(const SynonymSuggestion& s);

}  // namespace linkforge::synonyms
