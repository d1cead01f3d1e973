#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "linkforge/stemmer.hpp"

namespace linkforge::normalize {

/// Splits a compound token at its best-scoring internal boundary.
///
/// A boundary between `left` and `right` scores
///   end_score(last two code points of left) + start_score(first two code points of right),
/// with unlisted bigrams contributing `missing`. Only boundaries leaving both
/// parts at least `min_part` code points long are considered. The token is
/// split once, at the highest-scoring boundary (leftmost on ties), when that
/// score exceeds `threshold`.
class CompoundSplitter {
 public:
  CompoundSplitter() = default;

  /// Parses the compound_scores.tsv format. Throws ValidationError on bad lines.
  static CompoundSplitter parse(std::string_view tsv);
  static CompoundSplitter load(const std::filesystem::path& path);

  void set_end_score(std::u32string bigram, double score) { end_[std::move(bigram)] = score; }
  void set_start_score(std::u32string bigram, double score) { start_[std::move(bigram)] = score; }
  void set_threshold(double t) noexcept { threshold_ = t; }
  void set_missing(double m) noexcept { missing_ = m; }
  void set_min_part(std::size_t n) noexcept { min_part_ = n; }

  [[nodiscard]] double threshold() const noexcept { return threshold_; }
  [[nodiscard]] std::size_t min_part() const noexcept { return min_part_; }
  [[nodiscard]] bool empty() const noexcept { return end_.empty() && start_.empty(); }

  /// Score of splitting `token` before code point index `pos`.
  [[nodiscard]] double boundary_score(std::u32string_view token, std::size_t pos) const;

  [[nodiscard]] std::vector<std::u32string> split(std::u32string_view token) const;

  [[nodiscard]] std::string fingerprint() const;

 private:
  std::unordered_map<std::u32string, double> end_;
  std::unordered_map<std::u32string, double> start_;
  double threshold_ = 1.0;
  double missing_ = -1.0;
  std::size_t min_part_ = 4;
};

/// Resources used by the normalization cascade.
class NormalizerConfig {
 public:
  NormalizerConfig(std::unordered_set<std::string> stopwords, std::unordered_set<std::string> corporate_suffixes,
                   Language stemmer_language, CompoundSplitter compounds);

  /// Shipped German defaults: German stemmer, German + English stopwords.
  static NormalizerConfig defaults();
  /// Same resources with the English (Porter2) stemmer.
  static NormalizerConfig english();
  /// Loads stopwords.txt, corporate_suffixes.txt and compound_scores.tsv from `dir`.
  static NormalizerConfig load(const std::filesystem::path& dir, Language lang);

  [[nodiscard]] const std::unordered_set<std::string>& stopwords() const noexcept { return stopwords_; }
  [[nodiscard]] const std::unordered_set<std::string>& corporate_suffixes() const noexcept { return suffixes_; }
  [[nodiscard]] Language stemmer_language() const noexcept { return language_; }
  [[nodiscard]] const CompoundSplitter& compounds() const noexcept { return compounds_; }

  /// True if `token` (any case) is a stopword or the stem of one.
  [[nodiscard]] bool is_stopword(std::string_view token) const;
  [[nodiscard]] bool is_corporate_suffix(std::string_view token) const;

  /// Stable digest of all resources; indexes record it to detect mismatched configs.
  [[nodiscard]] const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string compute_fingerprint() const;

  std::unordered_set<std::string> stopwords_;
  std::unordered_set<std::string> stemmed_stopwords_;
  std::unordered_set<std::string> suffixes_;
  Language language_;
  CompoundSplitter compounds_;
  std::string fingerprint_;
};

/// Parses a one-token-per-line word list ('#' comments, blank lines ignored), lowercased.
std::unordered_set<std::string> parse_word_list(std::string_view text);

// The seven transforms. Each is a pure function of its input (and config).
std::string remove_punctuation(std::string_view s);
std::string strip_corporate_forms(std::string_view s, const NormalizerConfig& config);
std::string lowercase(std::string_view s);
std::string stem(std::string_view s, Language lang);
std::string remove_stopwords(std::string_view s, const NormalizerConfig& config);
std::string sort_tokens(std::string_view s);
std::vector<std::string> compound_split(std::string_view token, const CompoundSplitter& splitter);
/// Initials of every contiguous n-gram (n >= 2) over the compound-split tokens,
/// plus `s` itself. Sorted by code point, duplicates removed.
std::vector<std::string> abbreviate(std::string_view s, const CompoundSplitter& splitter);

inline constexpr std::size_t kStageCount = 8;

struct CascadeOutput {
  /// stages[0] is the input; stages[t] applies transform t to stages[t-1].
  /// stages[7] is the canonical abbreviation (shortest, then smallest by code point).
  std::array<std::string, kStageCount> stages;
  /// Full stage-7 variant set used for indexing and lookup.
  std::vector<std::string> abbreviations;
};

CascadeOutput cascade(std::string_view s, const NormalizerConfig& config);

}  // namespace linkforge::normalize
