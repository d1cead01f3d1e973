#include <algorithm>
#include <unordered_set>

#include "linkforge/error.hpp"
#include "linkforge/fuzzy.hpp"

namespace linkforge::fuzzy {

void for_each_deletion(std::u32string_view s, std::size_t max_deletions,
                       const std::function<void(const std::u32string&)>& fn) {
  std::unordered_set<std::u32string> seen;
  std::vector<std::u32string> frontier{std::u32string(s)};
  seen.insert(frontier.front());
  fn(frontier.front());
  for (std::size_t level = 0; level < max_deletions; ++level) {
    std::vector<std::u32string> next;
    for (const auto& word : frontier) {
      for (std::size_t i = 0; i < word.size(); ++i) {
        std::u32string variant = word.substr(0, i) + word.substr(i + 1);
        if (seen.insert(variant).second) {
          fn(variant);
          next.push_back(std::move(variant));
        }
      }
    }
    if (next.empty()) break;
    frontier = std::move(next);
  }
}

DeletionIndex::DeletionIndex(std::size_t max_edit) : max_edit_(max_edit) {
  if (max_edit > 3) throw ValidationError("max_edit must be in 0..3");
}

DeletionIndex::TermId DeletionIndex::add(std::u32string_view term) {
  std::u32string key(term);
  if (auto it = term_ids_.find(key); it != term_ids_.end()) return it->second;
  const auto id = static_cast<TermId>(terms_.size());
  terms_.push_back(key);
  term_ids_.emplace(std::move(key), id);
  for_each_deletion(term, max_edit_, [&](const std::u32string& variant) { buckets_[variant].push_back(id); });
  return id;
}

std::vector<DeletionIndex::TermId> DeletionIndex::candidates(std::u32string_view query,
                                                             std::size_t max_distance) const {
  const std::size_t k = std::min(max_distance, max_edit_);
  std::vector<TermId> out;
  for_each_deletion(query, k, [&](const std::u32string& variant) {
    if (auto it = buckets_.find(variant); it != buckets_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<DeletionIndex::Hit> DeletionIndex::lookup(std::u32string_view query, std::size_t max_distance) const {
  const std::size_t k = std::min(max_distance, max_edit_);
  std::vector<Hit> hits;
  for (TermId id : candidates(query, k)) {
    if (auto d = dl_distance_within(query, terms_[id], k)) hits.push_back({id, *d});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.term < b.term;
  });
  return hits;
}

}  // namespace linkforge::fuzzy
