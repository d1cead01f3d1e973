#include "linkforge/normalize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "linkforge/error.hpp"
#include "linkforge/resources.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::normalize {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::u32string> tokens_of(std::string_view s) {
  std::vector<std::u32string> out;
  for (auto& t : text::split_whitespace(text::to_u32(s))) out.push_back(std::move(t.text));
  return out;
}

std::string join_tokens(const std::vector<std::u32string>& tokens) {
  std::u32string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(U' ');
    out.append(tokens[i]);
  }
  return text::to_utf8(out);
}

}  // namespace

std::unordered_set<std::string> parse_word_list(std::string_view content) {
  std::unordered_set<std::string> words;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& token : text::split_whitespace(line)) words.insert(text::to_lower(token));
  }
  return words;
}

// ---------------------------------------------------------------------------
// NormalizerConfig

NormalizerConfig::NormalizerConfig(std::unordered_set<std::string> stopwords,
                                   std::unordered_set<std::string> corporate_suffixes, Language stemmer_language,
                                   CompoundSplitter compounds)
    : stopwords_(std::move(stopwords)),
      suffixes_(std::move(corporate_suffixes)),
      language_(stemmer_language),
      compounds_(std::move(compounds)) {
  // Stopword removal runs after stemming, so stems of stopwords count too.
  for (const auto& w : stopwords_) stemmed_stopwords_.insert(stem(w, language_));
  fingerprint_ = compute_fingerprint();
}

NormalizerConfig NormalizerConfig::defaults() {
  auto stopwords = parse_word_list(resources::stopwords_de());
  stopwords.merge(parse_word_list(resources::stopwords_en()));
  return {std::move(stopwords), parse_word_list(resources::corporate_suffixes()), Language::german,
          CompoundSplitter::parse(resources::compound_scores())};
}

NormalizerConfig NormalizerConfig::english() {
  auto stopwords = parse_word_list(resources::stopwords_de());
  stopwords.merge(parse_word_list(resources::stopwords_en()));
  return {std::move(stopwords), parse_word_list(resources::corporate_suffixes()), Language::english,
          CompoundSplitter::parse(resources::compound_scores())};
}

NormalizerConfig NormalizerConfig::load(const std::filesystem::path& dir, Language lang) {
  return {parse_word_list(read_file(dir / "stopwords.txt")), parse_word_list(read_file(dir / "corporate_suffixes.txt")),
          lang, CompoundSplitter::load(dir / "compound_scores.tsv")};
}

bool NormalizerConfig::is_stopword(std::string_view token) const {
  const std::string lower = text::to_lower(token);
  return stopwords_.contains(lower) || stemmed_stopwords_.contains(lower);
}

bool NormalizerConfig::is_corporate_suffix(std::string_view token) const {
  return suffixes_.contains(text::to_lower(token));
}

std::string NormalizerConfig::compute_fingerprint() const {
  std::string blob(to_string(language_));
  for (const auto* words : {&stopwords_, &suffixes_}) {
    std::set<std::string> sorted(words->begin(), words->end());
    blob += '#';
    for (const auto& w : sorted) blob += w + ';';
  }
  blob += compounds_.fingerprint();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(rng::fnv1a64(blob)));
  return hex;
}

// ---------------------------------------------------------------------------
// Transforms

std::string remove_punctuation(std::string_view s) {
  std::vector<std::u32string> tokens;
  std::u32string current;
  for (char32_t c : text::to_u32(s)) {
    if (text::is_alnum(c)) {
      current.push_back(c);
    } else if (text::is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return join_tokens(tokens);
}

std::string strip_corporate_forms(std::string_view s, const NormalizerConfig& config) {
  auto tokens = tokens_of(s);
  // The last remaining token is never stripped.
  while (tokens.size() > 1 && config.is_corporate_suffix(text::to_utf8(tokens.back()))) tokens.pop_back();
  return join_tokens(tokens);
}

std::string lowercase(std::string_view s) { return text::to_lower(s); }

std::string stem(std::string_view s, Language lang) {
  auto tokens = tokens_of(s);
  for (auto& t : tokens) t = stem_word(t, lang);
  return join_tokens(tokens);
}

std::string remove_stopwords(std::string_view s, const NormalizerConfig& config) {
  auto tokens = tokens_of(s);
  std::erase_if(tokens, [&](const std::u32string& t) { return config.is_stopword(text::to_utf8(t)); });
  return join_tokens(tokens);
}

std::string sort_tokens(std::string_view s) {
  auto tokens = tokens_of(s);
  std::sort(tokens.begin(), tokens.end());
  return join_tokens(tokens);
}

std::vector<std::string> compound_split(std::string_view token, const CompoundSplitter& splitter) {
  std::vector<std::string> out;
  for (const auto& part : splitter.split(text::to_u32(token))) out.push_back(text::to_utf8(part));
  return out;
}

std::vector<std::string> abbreviate(std::string_view s, const CompoundSplitter& splitter) {
  std::vector<char32_t> initials;
  for (const auto& token : tokens_of(s)) {
    for (const auto& part : splitter.split(token)) initials.push_back(part.front());
  }
  std::set<std::u32string> out;
  out.insert(text::to_u32(s));
  for (std::size_t i = 0; i < initials.size(); ++i) {
    for (std::size_t j = i + 2; j <= initials.size(); ++j) {
      out.emplace(initials.begin() + static_cast<std::ptrdiff_t>(i), initials.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
  std::vector<std::string> result;
  result.reserve(out.size());
  for (const auto& a : out) result.push_back(text::to_utf8(a));
  return result;
}

CascadeOutput cascade(std::string_view s, const NormalizerConfig& config) {
  CascadeOutput out;
  auto& st = out.stages;
  st[0] = std::string(s);
  // A transform that would empty a non-empty string passes its input through.
  auto apply = [&](std::size_t t, std::string next) {
    st[t] = next.empty() && !st[t - 1].empty() ? st[t - 1] : std::move(next);
  };
  apply(1, remove_punctuation(st[0]));
  apply(2, strip_corporate_forms(st[1], config));
  apply(3, lowercase(st[2]));
  apply(4, stem(st[3], config.stemmer_language()));
  apply(5, remove_stopwords(st[4], config));
  apply(6, sort_tokens(st[5]));

  // Sorting scrambles token order, which acronyms depend on ("faz" for
  // "frankfurter allgemeine zeitung"), so initials come from both orders.
  std::set<std::string> variants;
  for (const auto* source : {&st[5], &st[6]}) {
    for (auto& a : abbreviate(*source, config.compounds())) variants.insert(std::move(a));
  }
  variants.erase("");
  out.abbreviations.assign(variants.begin(), variants.end());
  if (!out.abbreviations.empty()) {
    st[7] = *std::min_element(out.abbreviations.begin(), out.abbreviations.end(), [](const auto& a, const auto& b) {
      const auto la = text::length(a), lb = text::length(b);
      return la != lb ? la < lb : a < b;
    });
  } else {
    st[7] = st[6];
  }
  return out;
}

}  // namespace linkforge::normalize
