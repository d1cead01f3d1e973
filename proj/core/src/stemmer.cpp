#include "linkforge/stemmer.hpp"

#include <array>
#include <utility>

namespace linkforge::normalize {

std::string_view to_string(Language lang) { return lang == Language::german ? "de" : "en"; }

std::optional<Language> parse_language(std::string_view code) {
  if (code == "en" || code == "english") return Language::english;
  if (code == "de" || code == "german") return Language::german;
  return std::nullopt;
}

namespace {

using Word = std::u32string;
using Suffix = std::u32string_view;

bool ends_with(const Word& w, Suffix s) {
  return w.size() >= s.size() && Suffix(w).substr(w.size() - s.size()) == s;
}

// Longest suffix of `w` from `list`, or an empty view.
template <std::size_t N>
Suffix longest_suffix(const Word& w, const std::array<Suffix, N>& list) {
  Suffix best;
  for (Suffix s : list) {
    if (s.size() > best.size() && ends_with(w, s)) best = s;
  }
  return best;
}

void replace_suffix(Word& w, std::size_t suffix_len, Suffix with) {
  w.resize(w.size() - suffix_len);
  w.append(with);
}

bool contains(Suffix chars, char32_t c) { return chars.find(c) != Suffix::npos; }

// ---------------------------------------------------------------------------
// Porter2

namespace english {

bool vowel(char32_t c) { return contains(U"aeiouy", c); }

bool short_syllable_at_end(const Word& w, std::size_t len) {
  if (len == 2) return vowel(w[0]) && !vowel(w[1]);
  if (len >= 3) {
    return !vowel(w[len - 3]) && vowel(w[len - 2]) && !vowel(w[len - 1]) && !contains(U"wxY", w[len - 1]);
  }
  return false;
}

std::size_t region_after(const Word& w, std::size_t from) {
  for (std::size_t i = from + 1; i < w.size(); ++i) {
    if (!vowel(w[i]) && vowel(w[i - 1])) return i + 1;
  }
  return w.size();
}

bool has_vowel(const Word& w, std::size_t end) {
  for (std::size_t i = 0; i < end; ++i) {
    if (vowel(w[i])) return true;
  }
  return false;
}

std::optional<Word> exception1(const Word& w) {
  static const std::array<std::pair<Suffix, Suffix>, 18> table{{
      {U"skis", U"ski"},     {U"skies", U"sky"},   {U"dying", U"die"},   {U"lying", U"lie"},
      {U"tying", U"tie"},    {U"idly", U"idl"},    {U"gently", U"gentl"}, {U"ugly", U"ugli"},
      {U"early", U"earli"},  {U"only", U"onli"},   {U"singly", U"singl"}, {U"sky", U"sky"},
      {U"news", U"news"},    {U"howe", U"howe"},   {U"atlas", U"atlas"}, {U"cosmos", U"cosmos"},
      {U"bias", U"bias"},    {U"andes", U"andes"},
  }};
  for (const auto& [from, to] : table) {
    if (Suffix(w) == from) return Word(to);
  }
  return std::nullopt;
}

Word stem(Word w) {
  if (w.size() <= 2) return w;
  if (w[0] == U'\'') w.erase(0, 1);
  if (auto e = exception1(w)) return *e;
  if (w.size() <= 2) return w;

  if (w[0] == U'y') w[0] = U'Y';
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] == U'y' && vowel(w[i - 1])) w[i] = U'Y';
  }

  std::size_t r1;
  if (w.starts_with(U"gener") || w.starts_with(U"arsen")) {
    r1 = 5;
  } else if (w.starts_with(U"commun")) {
    r1 = 6;
  } else {
    r1 = region_after(w, 0);
  }
  const std::size_t r2 = region_after(w, r1);

  auto in_r1 = [&](std::size_t suffix_len) { return w.size() - suffix_len >= r1; };
  auto in_r2 = [&](std::size_t suffix_len) { return w.size() - suffix_len >= r2; };

  // Step 0
  if (Suffix s = longest_suffix(w, std::array<Suffix, 3>{U"'s'", U"'s", U"'"}); !s.empty()) {
    w.resize(w.size() - s.size());
  }

  // Step 1a
  if (ends_with(w, U"sses")) {
    replace_suffix(w, 4, U"ss");
  } else if (ends_with(w, U"ied") || ends_with(w, U"ies")) {
    replace_suffix(w, 3, w.size() > 4 ? U"i" : U"ie");
  } else if (ends_with(w, U"us") || ends_with(w, U"ss")) {
    // unchanged
  } else if (ends_with(w, U"s") && w.size() >= 2 && has_vowel(w, w.size() - 2)) {
    w.pop_back();
  }

  static constexpr std::array<Suffix, 8> kExceptions2{U"inning", U"outing",  U"canning", U"herring",
                                                      U"earring", U"proceed", U"exceed",  U"succeed"};
  for (Suffix e : kExceptions2) {
    if (Suffix(w) == e) return w;
  }

  // Step 1b
  {
    Suffix s = longest_suffix(w, std::array<Suffix, 6>{U"eedly", U"ingly", U"edly", U"eed", U"ing", U"ed"});
    if (s == U"eed" || s == U"eedly") {
      if (in_r1(s.size())) replace_suffix(w, s.size(), U"ee");
    } else if (!s.empty() && has_vowel(w, w.size() - s.size())) {
      w.resize(w.size() - s.size());
      if (ends_with(w, U"at") || ends_with(w, U"bl") || ends_with(w, U"iz")) {
        w.push_back(U'e');
      } else if (w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && contains(U"bdfgmnprt", w.back())) {
        w.pop_back();
      } else if (short_syllable_at_end(w, w.size()) && r1 >= w.size()) {
        w.push_back(U'e');
      }
    }
  }

  // Step 1c
  if (w.size() > 2 && (w.back() == U'y' || w.back() == U'Y') && !vowel(w[w.size() - 2])) {
    w.back() = U'i';
  }

  // Step 2
  {
    static const std::array<std::pair<Suffix, Suffix>, 24> table{{
        {U"ization", U"ize"}, {U"ational", U"ate"}, {U"fulness", U"ful"}, {U"ousness", U"ous"},
        {U"iveness", U"ive"}, {U"tional", U"tion"}, {U"biliti", U"ble"},  {U"lessli", U"less"},
        {U"entli", U"ent"},   {U"ation", U"ate"},   {U"alism", U"al"},    {U"aliti", U"al"},
        {U"ousli", U"ous"},   {U"iviti", U"ive"},   {U"fulli", U"ful"},   {U"enci", U"ence"},
        {U"anci", U"ance"},   {U"abli", U"able"},   {U"izer", U"ize"},    {U"ator", U"ate"},
        {U"alli", U"al"},     {U"bli", U"ble"},     {U"ogi", U"og"},      {U"li", U""},
    }};
    std::size_t best = table.size();
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (ends_with(w, table[i].first) && (best == table.size() || table[i].first.size() > table[best].first.size())) {
        best = i;
      }
    }
    if (best != table.size() && in_r1(table[best].first.size())) {
      const auto& [from, to] = table[best];
      const std::size_t stem_len = w.size() - from.size();
      if (from == U"ogi") {
        if (stem_len >= 1 && w[stem_len - 1] == U'l') replace_suffix(w, from.size(), to);
      } else if (from == U"li") {
        if (stem_len >= 1 && contains(U"cdeghkmnrt", w[stem_len - 1])) replace_suffix(w, from.size(), to);
      } else {
        replace_suffix(w, from.size(), to);
      }
    }
  }

  // Step 3
  {
    static const std::array<std::pair<Suffix, Suffix>, 9> table{{
        {U"ational", U"ate"}, {U"tional", U"tion"}, {U"alize", U"al"}, {U"icate", U"ic"}, {U"iciti", U"ic"},
        {U"ative", U""},      {U"ical", U"ic"},     {U"ness", U""},    {U"ful", U""},
    }};
    std::size_t best = table.size();
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (ends_with(w, table[i].first) && (best == table.size() || table[i].first.size() > table[best].first.size())) {
        best = i;
      }
    }
    if (best != table.size() && in_r1(table[best].first.size())) {
      const auto& [from, to] = table[best];
      if (from != U"ative" || in_r2(from.size())) replace_suffix(w, from.size(), to);
    }
  }

  // Step 4
  {
    static constexpr std::array<Suffix, 18> list{U"ement", U"ance", U"ence", U"able", U"ible", U"ment",
                                                 U"ant",   U"ent",  U"ism",  U"ate",  U"iti",  U"ous",
                                                 U"ive",   U"ize",  U"ion",  U"al",   U"er",   U"ic"};
    Suffix s = longest_suffix(w, list);
    if (!s.empty() && in_r2(s.size())) {
      if (s == U"ion") {
        const std::size_t stem_len = w.size() - 3;
        if (stem_len >= 1 && (w[stem_len - 1] == U's' || w[stem_len - 1] == U't')) w.resize(stem_len);
      } else {
        w.resize(w.size() - s.size());
      }
    }
  }

  // Step 5
  if (ends_with(w, U"e")) {
    if (in_r2(1) || (in_r1(1) && !short_syllable_at_end(w, w.size() - 1))) w.pop_back();
  } else if (ends_with(w, U"l")) {
    if (in_r2(1) && w.size() >= 2 && w[w.size() - 2] == U'l') w.pop_back();
  }

  for (auto& c : w) {
    if (c == U'Y') c = U'y';
  }
  return w;
}

}  // namespace english

// ---------------------------------------------------------------------------
// Snowball German

namespace german {

bool vowel(char32_t c) { return contains(U"aeiouyäöü", c); }

Word stem(Word w) {
  // Prelude: ß -> ss, and protect u/y between vowels.
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == U'ß') {
      w.replace(i, 1, U"ss");
      ++i;
    }
  }
  for (std::size_t i = 1; i + 1 < w.size();) {
    if (vowel(w[i - 1]) && (w[i] == U'u' || w[i] == U'y') && vowel(w[i + 1])) {
      w[i] = w[i] == U'u' ? U'U' : U'Y';
      i += 3;  // the trailing vowel is consumed by the match
    } else {
      ++i;
    }
  }

  // Regions. p2 continues from the unadjusted p1 cursor.
  std::size_t p1 = w.size();
  std::size_t p2 = w.size();
  if (w.size() >= 3) {
    auto gopast = [&](std::size_t from, bool want_vowel) -> std::optional<std::size_t> {
      for (std::size_t i = from; i < w.size(); ++i) {
        if (vowel(w[i]) == want_vowel) return i + 1;
      }
      return std::nullopt;
    };
    if (auto a = gopast(0, true)) {
      if (auto b = gopast(*a, false)) {
        p1 = std::max<std::size_t>(*b, 3);
        if (auto c = gopast(*b, true)) {
          if (auto d = gopast(*c, false)) p2 = *d;
        }
      }
    }
  }
  auto in_r1 = [&](std::size_t suffix_len) { return w.size() >= suffix_len && w.size() - suffix_len >= p1; };
  auto in_r2 = [&](std::size_t suffix_len) { return w.size() >= suffix_len && w.size() - suffix_len >= p2; };
  auto preceded_by = [&](std::size_t suffix_len, Suffix chars) {
    return w.size() > suffix_len && contains(chars, w[w.size() - suffix_len - 1]);
  };

  // Step 1
  {
    Suffix s = longest_suffix(w, std::array<Suffix, 7>{U"em", U"ern", U"er", U"e", U"en", U"es", U"s"});
    if (!s.empty() && in_r1(s.size())) {
      if (s == U"em" || s == U"ern" || s == U"er") {
        w.resize(w.size() - s.size());
      } else if (s == U"e" || s == U"en" || s == U"es") {
        w.resize(w.size() - s.size());
        if (ends_with(w, U"niss")) w.pop_back();
      } else if (preceded_by(1, U"bdfghklmnrt")) {
        w.pop_back();
      }
    }
  }

  // Step 2
  {
    Suffix s = longest_suffix(w, std::array<Suffix, 4>{U"en", U"er", U"est", U"st"});
    if (!s.empty() && in_r1(s.size())) {
      if (s == U"st") {
        if (preceded_by(2, U"bdfghklmnt") && w.size() >= 6) w.resize(w.size() - 2);
      } else {
        w.resize(w.size() - s.size());
      }
    }
  }

  // Step 3: derivational suffixes in R2.
  {
    Suffix s = longest_suffix(
        w, std::array<Suffix, 8>{U"end", U"ung", U"ig", U"ik", U"isch", U"lich", U"heit", U"keit"});
    if (!s.empty() && in_r2(s.size())) {
      if (s == U"end" || s == U"ung") {
        w.resize(w.size() - s.size());
        if (ends_with(w, U"ig") && in_r2(2) && !preceded_by(2, U"e")) w.resize(w.size() - 2);
      } else if (s == U"ig" || s == U"ik" || s == U"isch") {
        if (!preceded_by(s.size(), U"e")) w.resize(w.size() - s.size());
      } else if (s == U"lich" || s == U"heit") {
        w.resize(w.size() - s.size());
        if ((ends_with(w, U"er") || ends_with(w, U"en")) && in_r1(2)) w.resize(w.size() - 2);
      } else {  // keit
        w.resize(w.size() - s.size());
        Suffix t = longest_suffix(w, std::array<Suffix, 2>{U"lich", U"ig"});
        if (!t.empty() && in_r2(t.size())) w.resize(w.size() - t.size());
      }
    }
  }

  for (auto& c : w) {
    switch (c) {
      case U'U': c = U'u'; break;
      case U'Y': c = U'y'; break;
      case U'ä': c = U'a'; break;
      case U'ö': c = U'o'; break;
      case U'ü': c = U'u'; break;
      default: break;
    }
  }
  return w;
}

}  // namespace german

}  // namespace

std::u32string stem_word(std::u32string_view word, Language lang) {
  return lang == Language::german ? german::stem(Word(word)) : english::stem(Word(word));
}

}  // namespace linkforge::normalize
