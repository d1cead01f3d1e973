#pragma once

#include <compare>
#include <cstddef>

namespace linkforge {

/// Half-open range of Unicode code point offsets into an NFC-normalized string.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] constexpr std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
  [[nodiscard]] constexpr bool empty() const noexcept { return end <= begin; }
  [[nodiscard]] constexpr bool overlaps(const CharSpan& other) const noexcept {
    return begin < other.end && other.begin < end;
  }

  friend constexpr auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

}  // namespace linkforge
