#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "linkforge/types.hpp"

// UTF-8 <-> code point helpers backed by ICU. All offsets are code point offsets.
namespace linkforge::text {

/// Throws ValidationError on malformed UTF-8.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);

bool is_valid_utf8(std::string_view utf8);

std::string nfc(std::string_view utf8);
std::string to_lower(std::string_view utf8);
std::u32string to_lower(std::u32string_view text);

bool is_alnum(char32_t c);
bool is_space(char32_t c);
bool is_upper(char32_t c);

std::size_t length(std::string_view utf8);
std::string substr(std::string_view utf8, CharSpan span);

struct Token {
  std::u32string text;
  CharSpan span;
};

/// Splits on Unicode whitespace; tokens carry their code point spans.
std::vector<Token> split_whitespace(std::u32string_view text);
std::vector<std::string> split_whitespace(std::string_view utf8);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace linkforge::text
