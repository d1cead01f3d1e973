#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkforge/corpus.hpp"
#include "linkforge/types.hpp"

namespace linkforge::embed {

using Vector = std::vector<float>;

/// Per-token vectors of one encoded sentence, each aligned to the code point
/// span of the sentence it came from.
struct TokenEmbeddingSeq {
  std::vector<Vector> vectors;
  std::vector<CharSpan> token_spans;

  [[nodiscard]] std::size_t size() const noexcept { return vectors.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
};

struct MentionEmbedding {
  Vector vector;
  std::optional<std::string> entity_id;
  std::string record_ref;
};

struct PairSample {
  std::string left;
  std::string right;
  int label = 0;

  friend bool operator==(const PairSample&, const PairSample&) = default;
};

/// Logistic scoring head over a pair vector.
struct CrossHead {
  Vector weights;
  double bias = 0.0;

  static CrossHead zeros(std::size_t dimension) { return {Vector(dimension, 0.0f), 0.0}; }
  static CrossHead load(const std::filesystem::path& path);  // JSON {"weights": [...], "bias": b}
};

inline constexpr double kDefaultMargin = 0.5;
inline constexpr double kProbabilityClamp = 1e-7;

/// Mean of the token vectors whose span overlaps `span`.
/// Throws ValidationError when no token overlaps or the sequence is malformed.
Vector pool_mention(const TokenEmbeddingSeq& seq, CharSpan span);

/// 1 - cos(u, v). Throws ValidationError on zero vectors or dimension mismatch.
double cosine_distance(std::span<const float> u, std::span<const float> v);

/// y * dist^2 + (1 - y) * max(margin - dist, 0)^2
double max_margin_loss(double dist, int y, double margin = kDefaultMargin);
/// d/d(dist) of max_margin_loss.
double max_margin_loss_grad(double dist, int y, double margin = kDefaultMargin);

double cross_logit(std::span<const float> pair_vec, const CrossHead& head);
/// sigmoid(W . v + b). Throws ValidationError on dimension mismatch.
double cross_probability(std::span<const float> pair_vec, const CrossHead& head);

/// Binary cross entropy with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int y);
/// d/dp of bce_loss at the clamped p.
double bce_loss_grad(double p, int y);

struct PairSampling {
  std::vector<PairSample> pairs;
  std::vector<std::string> warnings;
};

/// Every unordered same-entity record pair as a positive, each followed by
/// `negatives_per_positive` cross-entity pairs drawn uniformly at random.
/// Throws ValidationError when the corpus has fewer than two entities with records.
PairSampling sample_pairs(const corpus::Corpus& corpus, std::size_t negatives_per_positive, std::uint64_t seed);

/// JSONL lines {"left_record", "right_record", "label"}.
void write_pairs_jsonl(const std::vector<PairSample>& pairs, std::ostream& out);
std::vector<PairSample> read_pairs_jsonl(std::istream& in);

}  // namespace linkforge::embed
