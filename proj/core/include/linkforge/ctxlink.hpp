#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linkforge/corpus.hpp"
#include "linkforge/embed.hpp"
#include "linkforge/encoder.hpp"
#include "linkforge/hnsw.hpp"

namespace linkforge::ctx {

enum class Method { heuristic, bi, cross };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

struct RankedEntity {
  std::string entity_id;
  /// Edit distance (heuristic), cosine distance (bi) or match probability (cross).
  double score = 0.0;
  std::string best_record;  // reference record behind the score; empty for heuristic
  Method method = Method::bi;
  std::optional<std::size_t> stage;  // cascade stage of a heuristic match
};

/// Ranked candidates for one mention. Distances ascend, probabilities
/// descend; each entity appears at most once.
struct LinkResult {
  std::vector<RankedEntity> ranked;
  Method method = Method::bi;
  /// Heuristic outcome kind ("unique", "tie", "none") when the heuristic ran.
  std::string heuristic_outcome;

  [[nodiscard]] const RankedEntity* top() const { return ranked.empty() ? nullptr : &ranked.front(); }
};

nlohmann::json to_json(const LinkResult& result);

enum class IndexMode { exact, approximate };

std::string_view to_string(IndexMode mode);
std::optional<IndexMode> parse_index_mode(std::string_view text);

struct ReferenceEntry {
  std::string record_id;
  std::string entity_id;
  std::string sentence;
  CharSpan span;
  embed::Vector vector;

  friend bool operator==(const ReferenceEntry&, const ReferenceEntry&) = default;
};

struct SkippedRecord {
  std::string record_id;
  std::string reason;
};

/// Pooled mention vectors of every reference record, searchable by cosine distance.
class ReferenceIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  ReferenceIndex() = default;

  /// Encodes every reference-role record (every record when no roles are
  /// assigned). Records the encoder fails on are skipped and reported.
  static ReferenceIndex build(const corpus::Corpus& corpus, const embed::EncoderPort& encoder, IndexMode mode,
                              ann::HnswParams params = {});

  /// Builds from precomputed entries; `entities` lists the full target set.
  static ReferenceIndex from_entries(std::vector<ReferenceEntry> entries, std::vector<std::string> entities,
                                     IndexMode mode, ann::HnswParams params = {});

  [[nodiscard]] const std::vector<ReferenceEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] IndexMode mode() const noexcept { return mode_; }
  [[nodiscard]] const ann::HnswParams& params() const noexcept { return params_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<std::string>& entities() const noexcept { return entities_; }
  /// Target entities without a single indexed reference.
  [[nodiscard]] const std::vector<std::string>& unlinkable() const noexcept { return unlinkable_; }
  /// Position of entry `i`'s entity in entities().
  [[nodiscard]] std::uint32_t entity_ordinal(std::size_t i) const { return entity_ordinals_[i]; }
  [[nodiscard]] const std::vector<SkippedRecord>& skipped() const noexcept { return skipped_; }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

  /// Up to k nearest entries, ascending by (distance, entry position). Exact
  /// mode scans every entry; approximate mode searches the graph.
  [[nodiscard]] std::vector<ann::Neighbor> nearest(std::span<const float> query, std::size_t k) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static ReferenceIndex load(std::istream& in);
  static ReferenceIndex load(const std::filesystem::path& path);

  friend bool operator==(const ReferenceIndex& a, const ReferenceIndex& b);

 private:
  void finalize();

  IndexMode mode_ = IndexMode::exact;
  ann::HnswParams params_;
  std::size_t dim_ = 0;
  std::vector<ReferenceEntry> entries_;
  std::vector<std::string> entities_;
  std::vector<std::string> unlinkable_;
  std::vector<std::uint32_t> entity_ordinals_;
  std::vector<SkippedRecord> skipped_;
  std::optional<ann::Hnsw> graph_;
};

/// Mention vector of `span` in `sentence`.
embed::Vector encode_mention(const embed::EncoderPort& encoder, std::string_view sentence, CharSpan span);

/// Nearest-reference linking: each entity scores the minimum cosine distance
/// over its references; entities rank ascending, ties by smaller id.
/// `allowed`, when given, restricts the search to those entities.
LinkResult link_bi(std::string_view sentence, CharSpan span, const ReferenceIndex& index,
                   const embed::EncoderPort& encoder, std::size_t top_k,
                   const std::vector<std::string>* allowed = nullptr);
LinkResult link_bi_vector(std::span<const float> query, const ReferenceIndex& index, std::size_t top_k,
                          const std::vector<std::string>* allowed = nullptr);

/// Pair scoring: each candidate reference is scored sigmoid(W . v + b) on the
/// joint pair embedding, each entity keeps its best probability, entities rank
/// descending, ties by smaller id. Throws EncoderError when the encoder cannot
/// encode pairs and ValidationError when `candidates` is empty.
LinkResult link_cross(std::string_view sentence, CharSpan span, const std::vector<const ReferenceEntry*>& candidates,
                      const embed::EncoderPort& encoder, const embed::CrossHead& head, std::size_t top_k);

/// The `k` reference entries nearest to the mention, as cross candidates.
std::vector<const ReferenceEntry*> rerank_candidates(std::string_view sentence, CharSpan span,
                                                     const ReferenceIndex& index, const embed::EncoderPort& encoder,
                                                     std::size_t k);
std::vector<const ReferenceEntry*> all_candidates(const ReferenceIndex& index,
                                                  const std::vector<std::string>* allowed = nullptr);

/// Bundles what the contextual methods need so callers can switch between them.
struct ContextualLinker {
  const ReferenceIndex* index = nullptr;
  const embed::EncoderPort* encoder = nullptr;
  Method method = Method::bi;
  /// Required for Method::cross.
  const embed::CrossHead* head = nullptr;
  /// Cross candidates: the rerank_k nearest references, or every reference when cross_all is set.
  std::size_t rerank_k = 64;
  bool cross_all = false;

  [[nodiscard]] LinkResult link(std::string_view sentence, CharSpan span, std::size_t top_k,
                                const std::vector<std::string>* allowed = nullptr) const;
};

}  // namespace linkforge::ctx
