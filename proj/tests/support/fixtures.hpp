#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "linkforge/corpus.hpp"
#include "linkforge/encoder.hpp"

namespace linkforge::testing {

/// Wraps another encoder and counts calls.
class CountingEncoder final : public embed::EncoderPort {
 public:
  explicit CountingEncoder(const embed::EncoderPort& inner) : inner_(inner) {}

  [[nodiscard]] const embed::EncoderInfo& info() const override { return inner_.info(); }
  embed::TokenEmbeddingSeq encode(std::string_view sentence, CharSpan span) const override {
    ++encodes;
    return inner_.encode(sentence, span);
  }
  embed::Vector encode_pair(std::string_view a, CharSpan sa, std::string_view b, CharSpan sb) const override {
    ++pair_encodes;
    return inner_.encode_pair(a, sa, b, sb);
  }

  mutable std::atomic<std::size_t> encodes{0};
  mutable std::atomic<std::size_t> pair_encodes{0};

 private:
  const embed::EncoderPort& inner_;
};

/// Builds a record whose span is located by finding `surface` in `sentence`.
corpus::MentionRecord make_record(std::string record_id, std::string entity_id, const std::string& surface,
                                  const std::string& sentence, corpus::Role role = corpus::Role::unassigned);

/// Pronounceable random lowercase word of `syllables` consonant-vowel pairs.
std::string pseudo_word(std::uint64_t& state, std::size_t syllables);

/// Entities with well-separated one-word names. Every entity has an alias
/// more than `max_edit` away from every name. Reference records mention the
/// name or the alias. Query mentions come in three kinds:
///   exact  - the name as written,
///   typo   - the name with one substituted letter,
///   alias  - the alias, which the name heuristic cannot reach.
struct HybridFixture {
  corpus::Corpus corpus;  // references and queries, roles assigned
  std::vector<std::string> exact_queries, typo_queries, alias_queries;  // record ids
};

HybridFixture hybrid_fixture(std::size_t entities, double alias_share, std::uint64_t seed, std::size_t max_edit = 2);

/// One target entity whose reference mentions pair a planted synonym with a
/// modifier word, a few other entities, and sentences that mention the
/// planted synonyms on their own next to distractor nouns.
struct SynonymFixture {
  corpus::Corpus references;  // reference records only
  corpus::Corpus sentences;   // sentences mined for nouns (entity "Leck" for every record)
  std::string target;
  std::vector<std::string> planted;
  std::vector<std::string> distractors;
};

SynonymFixture synonym_fixture();

/// Directory with the checked-in test data files.
std::filesystem::path data_dir();

}  // namespace linkforge::testing
