#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace linkforge::normalize {

enum class Language { english, german };

std::string_view to_string(Language lang);
std::optional<Language> parse_language(std::string_view code);  // "en" / "de"

// Snowball-family stemmers operating on a single lowercase word.
//   english: Porter2 (the "english" Snowball stemmer)
//   german:  the classic Snowball German stemmer, umlauts folded in the postlude
std::u32string stem_word(std::u32string_view word, Language lang);

}  // namespace linkforge::normalize
