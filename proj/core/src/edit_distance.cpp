#include <algorithm>
#include <numeric>

#include "linkforge/fuzzy.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::fuzzy {

namespace {

// Row-rolling OSA recurrence over prefixes. Returns nullopt as soon as an
// entire row exceeds `cap` (the distance can only grow from there).
std::optional<std::size_t> osa(std::u32string_view a, std::u32string_view b, std::size_t cap) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t diff = n > m ? n - m : m - n;
  if (diff > cap) return std::nullopt;

  std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t d = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) d = std::min(d, prev2[j - 2] + 1);
      cur[j] = d;
      row_min = std::min(row_min, d);
    }
    if (row_min > cap) return std::nullopt;
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  if (prev[m] > cap) return std::nullopt;
  return prev[m];
}

}  // namespace

std::size_t dl_distance(std::u32string_view a, std::u32string_view b) {
  return *osa(a, b, std::max(a.size(), b.size()));
}

std::size_t dl_distance(std::string_view a, std::string_view b) {
  return dl_distance(text::to_u32(a), text::to_u32(b));
}

std::optional<std::size_t> dl_distance_within(std::u32string_view a, std::u32string_view b, std::size_t max) {
  return osa(a, b, max);
}

}  // namespace linkforge::fuzzy
