#include "linkforge/synonyms.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/normalize.hpp"
#include "linkforge/resources.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::synonyms {

CapitalizationTagger::CapitalizationTagger(std::unordered_set<std::string> stopwords)
    : stopwords_(std::move(stopwords)) {}

CapitalizationTagger::CapitalizationTagger() {
  stopwords_ = normalize::parse_word_list(resources::stopwords_de());
  stopwords_.merge(normalize::parse_word_list(resources::stopwords_en()));
}

std::vector<NounSpan> CapitalizationTagger::nouns(std::string_view sentence) const {
  std::vector<NounSpan> out;
  const auto tokens = text::split_whitespace(text::to_u32(text::nfc(sentence)));
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto& t = tokens[i].text;
    std::size_t lo = 0, hi = t.size();
    while (lo < hi && !text::is_alnum(t[lo])) ++lo;
    while (hi > lo && !text::is_alnum(t[hi - 1])) --hi;
    if (lo == hi || !text::is_upper(t[lo])) continue;
    const std::string word = text::to_utf8(std::u32string_view(t).substr(lo, hi - lo));
    if (stopwords_.contains(text::to_lower(word))) continue;
    out.push_back({word, {tokens[i].span.begin + lo, tokens[i].span.begin + hi}});
  }
  return out;
}

std::vector<NounSpan> detect_nouns(std::string_view sentence, const TaggerPort& tagger) {
  return tagger.nouns(sentence);
}

std::string_view to_string(Judgment judgment) {
  switch (judgment) {
    case Judgment::match: return "match";
    case Judgment::non_match: return "non-match";
    case Judgment::maybe: return "maybe";
  }
  return "non-match";
}

std::optional<Judgment> parse_judgment(std::string_view text) {
  if (text == "match") return Judgment::match;
  if (text == "non-match" || text == "non_match") return Judgment::non_match;
  if (text == "maybe") return Judgment::maybe;
  return std::nullopt;
}

double suggestion_distance(const ctx::RankedEntity& top) {
  return top.method == ctx::Method::cross ? 1.0 - top.score : top.score;
}

std::vector<SynonymSuggestion> discover_synonyms(const corpus::Entity& entity, const corpus::Corpus& corpus,
                                                 const MentionLinker& linker, const TaggerPort& tagger,
                                                 const std::vector<std::string>& known) {
  std::set<std::string> known_folded;
  for (const auto& k : known) known_folded.insert(text::to_lower(text::nfc(k)));

  std::map<std::string, SynonymSuggestion> best;  // keyed by case-folded noun
  // A sentence may back several records; link each (sentence, noun) once.
  std::map<std::tuple<std::string_view, std::size_t, std::size_t>, std::optional<double>> linked;
  for (const auto& record : corpus.records()) {
    for (const auto& noun : tagger.nouns(record.sentence)) {
      auto [cached, fresh] = linked.try_emplace({record.sentence, noun.span.begin, noun.span.end});
      if (fresh) {
        const auto result = linker(noun.noun, record.sentence, noun.span);
        const auto* top = result.top();
        if (top && top->entity_id == entity.id) cached->second = suggestion_distance(*top);
      }
      if (!cached->second) continue;
      const double distance = *cached->second;
      std::string key = text::to_lower(noun.noun);
      auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(key, SynonymSuggestion{noun.noun, distance, record.record_id, known_folded.contains(key), {}});
      } else if (distance < it->second.distance ||
                 (distance == it->second.distance && record.record_id < it->second.record_ref)) {
        it->second.noun = noun.noun;
        it->second.distance = distance;
        it->second.record_ref = record.record_id;
      }
    }
  }

  std::vector<std::pair<std::string, SynonymSuggestion>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second.distance != b.second.distance ? a.second.distance < b.second.distance : a.first < b.first;
  });
  std::vector<SynonymSuggestion> out;
  out.reserve(ranked.size());
  for (auto& [_, s] : ranked) out.push_back(std::move(s));
  return out;
}

double average_precision(const std::vector<Judgment>& ranked, bool maybe_is_relevant) {
  if (ranked.empty()) throw ValidationError("average precision of an empty ranking");
  std::size_t relevant = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const bool hit = ranked[i] == Judgment::match || (maybe_is_relevant && ranked[i] == Judgment::maybe);
    if (!hit) continue;
    ++relevant;
    sum += static_cast<double>(relevant) / static_cast<double>(i + 1);
  }
  return relevant ? sum / static_cast<double>(relevant) : 0.0;
}

double average_precision(const std::vector<SynonymSuggestion>& ranked, bool maybe_is_relevant) {
  std::vector<Judgment> judgments;
  bool any = false;
  for (const auto& s : ranked) {
    any = any || s.judgment.has_value();
    judgments.push_back(s.judgment.value_or(Judgment::non_match));
  }
  if (!any) throw ValidationError("average precision needs at least one judged suggestion");
  return average_precision(judgments, maybe_is_relevant);
}

nlohmann::json to_json(const SynonymSuggestion& s) {
  nlohmann::json j{{"noun", s.noun}, {"distance", s.distance}, {"record_ref", s.record_ref}, {"known", s.known}};
  if (s.judgment) j["judgment"] = to_string(*s.judgment);
  return j;
}

}  // namespace linkforge::synonyms
