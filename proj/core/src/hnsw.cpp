#include "linkforge/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>

#include "linkforge/binio.hpp"
#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"

namespace linkforge::ann {

namespace {

constexpr char kMagic[8] = {'L', 'F', 'H', 'N', 'S', 'W', 0, 0};
constexpr std::uint32_t kVersion = 1;
constexpr int kMaxLevel = 16;

}  // namespace

Hnsw::Hnsw(std::size_t dimension, HnswParams params) : dim_(dimension), params_(params) {
  if (dimension == 0) throw ValidationError("HNSW dimension must be positive");
  if (params.M < 2) throw ValidationError("HNSW M must be at least 2");
  if (params.ef_construction < 1 || params.ef_search < 1) throw ValidationError("HNSW ef values must be positive");
}

double Hnsw::dist(const float* a, const float* b) const {
  // Eight fixed lanes summed in a fixed order: vectorizes without -ffast-math
  // and gives the same result on every run.
  float lane[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= dim_; i += 8) {
    for (std::size_t j = 0; j < 8; ++j) lane[j] += a[i + j] * b[i + j];
  }
  for (; i < dim_; ++i) lane[i % 8] += a[i] * b[i];
  const float dot = ((lane[0] + lane[4]) + (lane[1] + lane[5])) + ((lane[2] + lane[6]) + (lane[3] + lane[7]));
  return 1.0 - static_cast<double>(dot);
}

std::uint32_t Hnsw::greedy(const float* q, std::uint32_t entry, int from_level, int to_level) const {
  std::uint32_t cur = entry;
  double d = dist(q, vec(cur));
  for (int level = from_level; level >= to_level; --level) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::uint32_t nb : links_[cur][static_cast<std::size_t>(level)]) {
        const double dn = dist(q, vec(nb));
        if (dn < d || (dn == d && nb < cur)) {
          d = dn;
          cur = nb;
          moved = true;
        }
      }
    }
  }
  return cur;
}

std::vector<Neighbor> Hnsw::search_layer(const float* q, std::uint32_t entry, std::size_t ef, int level) const {
  // Visit marks are stamped with a per-thread epoch so the buffer is cleared
  // only when the epoch counter wraps.
  thread_local std::vector<std::uint32_t> marks;
  thread_local std::uint32_t epoch = 0;
  if (marks.size() < size()) marks.resize(size(), 0);
  if (++epoch == 0) {
    std::fill(marks.begin(), marks.end(), 0);
    epoch = 1;
  }

  std::vector<MaxHeapEntry> frontier;  // min-heap
  std::vector<MaxHeapEntry> best;      // max-heap
  frontier.reserve(ef + 1);
  best.reserve(ef + 1);
  const MaxHeapEntry start{dist(q, vec(entry)), entry};
  marks[entry] = epoch;
  frontier.push_back(start);
  best.push_back(start);
  while (!frontier.empty()) {
    const auto current = frontier.front();
    if (best.size() >= ef && current > best.front()) break;
    std::pop_heap(frontier.begin(), frontier.end(), std::greater<>{});
    frontier.pop_back();
    for (std::uint32_t nb : links_[current.second][static_cast<std::size_t>(level)]) {
      if (marks[nb] == epoch) continue;
      marks[nb] = epoch;
      const MaxHeapEntry e{dist(q, vec(nb)), nb};
      if (best.size() < ef || e < best.front()) {
        frontier.push_back(e);
        std::push_heap(frontier.begin(), frontier.end(), std::greater<>{});
        best.push_back(e);
        std::push_heap(best.begin(), best.end());
        if (best.size() > ef) {
          std::pop_heap(best.begin(), best.end());
          best.pop_back();
        }
      }
    }
  }
  std::sort_heap(best.begin(), best.end());
  std::vector<Neighbor> out;
  out.reserve(best.size());
  for (const auto& [d, id] : best) out.push_back({d, id});
  return out;
}

// Keeps a candidate only if it is closer to the base point than to every
// neighbor already kept, which spreads links across directions.
std::vector<std::uint32_t> Hnsw::select(const std::vector<Neighbor>& candidates, std::size_t m) const {
  std::vector<std::uint32_t> kept;
  for (const auto& c : candidates) {
    if (kept.size() >= m) break;
    const bool diverse = std::none_of(kept.begin(), kept.end(), [&](std::uint32_t r) {
      return dist(vec(c.id), vec(r)) < c.distance;
    });
    if (diverse) kept.push_back(c.id);
  }
  return kept;
}

std::uint32_t Hnsw::add(std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw ValidationError("HNSW expects dimension " + std::to_string(dim_) + ", got " + std::to_string(vector.size()));
  }
  double norm = 0.0;
  for (float x : vector) norm += static_cast<double>(x) * x;
  if (norm == 0.0 || !std::isfinite(norm)) throw ValidationError("HNSW cannot index a zero or non-finite vector");
  norm = std::sqrt(norm);

  const auto id = static_cast<std::uint32_t>(size());
  for (float x : vector) data_.push_back(static_cast<float>(x / norm));

  rng::SplitMix64 gen(rng::derive_seed(params_.seed, id));
  const double ml = 1.0 / std::log(static_cast<double>(params_.M));
  const int level = std::min(kMaxLevel, static_cast<int>(std::floor(-std::log(1.0 - rng::uniform01(gen)) * ml)));
  levels_.push_back(level);
  links_.emplace_back(static_cast<std::size_t>(level) + 1);

  if (id == 0) {
    entry_ = 0;
    max_level_ = level;
    return id;
  }

  const float* q = vec(id);
  std::uint32_t cur = entry_;
  if (level < max_level_) cur = greedy(q, cur, max_level_, level + 1);
  for (int l = std::min(level, max_level_); l >= 0; --l) {
    const auto found = search_layer(q, cur, params_.ef_construction, l);
    const auto lvl = static_cast<std::size_t>(l);
    links_[id][lvl] = select(found, params_.M);
    for (std::uint32_t nb : links_[id][lvl]) {
      auto& back = links_[nb][lvl];
      back.push_back(id);
      if (back.size() > max_degree(l)) {
        std::vector<Neighbor> cands;
        cands.reserve(back.size());
        for (std::uint32_t x : back) cands.push_back({dist(vec(nb), vec(x)), x});
        std::sort(cands.begin(), cands.end());
        back = select(cands, max_degree(l));
      }
    }
    cur = found.front().id;
  }
  if (level > max_level_) {
    max_level_ = level;
    entry_ = id;
  }
  return id;
}

std::vector<Neighbor> Hnsw::search(std::span<const float> query, std::size_t k, std::size_t ef) const {
  if (query.size() != dim_) {
    throw ValidationError("HNSW expects dimension " + std::to_string(dim_) + ", got " + std::to_string(query.size()));
  }
  if (size() == 0 || k == 0) return {};
  double norm = 0.0;
  for (float x : query) norm += static_cast<double>(x) * x;
  if (norm == 0.0) throw ValidationError("HNSW query is a zero vector");
  norm = std::sqrt(norm);
  std::vector<float> q(dim_);
  for (std::size_t i = 0; i < dim_; ++i) q[i] = static_cast<float>(query[i] / norm);

  const std::uint32_t start = greedy(q.data(), entry_, max_level_, 1);
  auto found = search_layer(q.data(), start, std::max(ef == 0 ? params_.ef_search : ef, k), 0);
  if (found.size() > k) found.resize(k);
  return found;
}

void Hnsw::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  binio::write(out, kVersion);
  binio::write<std::uint64_t>(out, dim_);
  binio::write<std::uint64_t>(out, params_.M);
  binio::write<std::uint64_t>(out, params_.ef_construction);
  binio::write<std::uint64_t>(out, params_.ef_search);
  binio::write<std::uint64_t>(out, params_.seed);
  binio::write<std::int32_t>(out, max_level_);
  binio::write<std::uint32_t>(out, entry_);
  binio::write_array(out, data_);
  binio::write<std::uint64_t>(out, levels_.size());
  for (std::size_t node = 0; node < levels_.size(); ++node) {
    binio::write<std::int32_t>(out, levels_[node]);
    for (const auto& adj : links_[node]) binio::write_array(out, adj);
  }
  if (!out) throw IoError("failed writing HNSW graph");
}

Hnsw Hnsw::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError("not an HNSW graph (bad magic)");
  }
  const auto version = binio::read<std::uint32_t>(in);
  if (version != kVersion) {
    throw FormatError("HNSW graph version " + std::to_string(version) + " unsupported, expected " +
                      std::to_string(kVersion));
  }
  Hnsw h;
  h.dim_ = binio::read<std::uint64_t>(in);
  h.params_.M = binio::read<std::uint64_t>(in);
  h.params_.ef_construction = binio::read<std::uint64_t>(in);
  h.params_.ef_search = binio::read<std::uint64_t>(in);
  h.params_.seed = binio::read<std::uint64_t>(in);
  h.max_level_ = binio::read<std::int32_t>(in);
  h.entry_ = binio::read<std::uint32_t>(in);
  h.data_ = binio::read_array<float>(in);
  const auto n = binio::read<std::uint64_t>(in);
  if (h.dim_ == 0 || h.data_.size() != n * h.dim_) throw FormatError("HNSW graph vector block has the wrong size");
  h.levels_.resize(n);
  h.links_.resize(n);
  for (std::size_t node = 0; node < n; ++node) {
    const int level = binio::read<std::int32_t>(in);
    if (level < 0 || level > kMaxLevel) throw FormatError("HNSW node level out of range");
    h.levels_[node] = level;
    for (int l = 0; l <= level; ++l) {
      auto adj = binio::read_array<std::uint32_t>(in);
      for (auto nb : adj) {
        if (nb >= n) throw FormatError("HNSW link points past the last node");
      }
      h.links_[node].push_back(std::move(adj));
    }
  }
  if (n > 0 && (h.entry_ >= n || h.levels_[h.entry_] != h.max_level_)) throw FormatError("HNSW entry point invalid");
  return h;
}

}  // namespace linkforge::ann
