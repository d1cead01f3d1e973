#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace linkforge::ann {

struct HnswParams {
  std::size_t M = 16;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 384;
  std::uint64_t seed = 42;

  friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

struct Neighbor {
  double distance;
  std::uint32_t id;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
  friend auto operator<=>(const Neighbor&, const Neighbor&) = default;
};

/// Hierarchical navigable small-world graph over cosine distance.
///
/// Vectors are stored unit-normalized. Insertion is sequential and every
/// comparison breaks distance ties by id, so a given (params, insertion order)
/// always yields the same graph.
class Hnsw {
 public:
  Hnsw() = default;
  Hnsw(std::size_t dimension, HnswParams params);

  /// Inserts a vector and returns its id (ids are 0, 1, 2, ... in insertion order).
  std::uint32_t add(std::span<const float> vector);

  /// Up to k nearest ids, ascending by (distance, id). `ef` of 0 uses params().ef_search.
  [[nodiscard]] std::vector<Neighbor> search(std::span<const float> query, std::size_t k, std::size_t ef = 0) const;

  [[nodiscard]] std::size_t size() const noexcept { return levels_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] const HnswParams& params() const noexcept { return params_; }
  [[nodiscard]] int max_level() const noexcept { return max_level_; }

  void save(std::ostream& out) const;
  /// Throws FormatError on bad magic, version or truncated data.
  static Hnsw load(std::istream& in);

  friend bool operator==(const Hnsw&, const Hnsw&) = default;

 private:
  using MaxHeapEntry = std::pair<double, std::uint32_t>;

  [[nodiscard]] const float* vec(std::uint32_t id) const { return data_.data() + static_cast<std::size_t>(id) * dim_; }
  [[nodiscard]] double dist(const float* a, const float* b) const;
  [[nodiscard]] std::uint32_t greedy(const float* q, std::uint32_t entry, int from_level, int to_level) const;
  [[nodiscard]] std::vector<Neighbor> search_layer(const float* q, std::uint32_t entry, std::size_t ef,
                                                   int level) const;
  [[nodiscard]] std::vector<std::uint32_t> select(const std::vector<Neighbor>& candidates, std::size_t m) const;
  [[nodiscard]] std::size_t max_degree(int level) const { return level == 0 ? 2 * params_.M : params_.M; }

  std::size_t dim_ = 0;
  HnswParams params_;
  std::vector<float> data_;
  std::vector<int> levels_;
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // [node][level] -> neighbor ids
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
};

}  // namespace linkforge::ann
