#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "linkforge/embed.hpp"

namespace linkforge::embed {

struct EncoderInfo {
  std::size_t dimension = 0;
  bool supports_pair_encoding = false;
  /// Callers must not issue concurrent requests when set.
  bool single_flight = false;
  std::string name;
};

/// Source of contextual token embeddings. Spans are code point offsets into
/// the NFC sentence; implementations must be deterministic for a fixed model.
class EncoderPort {
 public:
  virtual ~EncoderPort() = default;

  [[nodiscard]] virtual const EncoderInfo& info() const = 0;
  virtual TokenEmbeddingSeq encode(std::string_view sentence, CharSpan span) const = 0;
  /// Joint embedding of two mentions in context. Throws EncoderError when unsupported.
  virtual Vector encode_pair(std::string_view sentence_a, CharSpan span_a, std::string_view sentence_b,
                             CharSpan span_b) const = 0;
};

/// Context-free test double. Tokens are whitespace-separated with edge
/// punctuation trimmed; each case-folded token maps to a fixed random unit
/// vector seeded from (seed, token). The pair embedding is the mean of the two
/// pooled mention vectors.
class StubEncoder final : public EncoderPort {
 public:
  static constexpr std::size_t kDefaultDimension = 128;

  explicit StubEncoder(std::uint64_t seed, std::size_t dimension = kDefaultDimension);

  [[nodiscard]] const EncoderInfo& info() const override { return info_; }
  TokenEmbeddingSeq encode(std::string_view sentence, CharSpan span) const override;
  Vector encode_pair(std::string_view sentence_a, CharSpan span_a, std::string_view sentence_b,
                     CharSpan span_b) const override;

  [[nodiscard]] Vector token_vector(std::u32string_view token) const;

 private:
  std::uint64_t seed_;
  EncoderInfo info_;
};

/// Client for the JSON-over-HTTP encoder protocol (see docs/encoder_protocol.md).
/// The handshake runs in the constructor; failures raise EncoderError.
class HttpEncoder final : public EncoderPort {
 public:
  explicit HttpEncoder(std::string base_url, double timeout_seconds = 60.0);
  ~HttpEncoder() override;

  [[nodiscard]] const EncoderInfo& info() const override { return info_; }
  TokenEmbeddingSeq encode(std::string_view sentence, CharSpan span) const override;
  Vector encode_pair(std::string_view sentence_a, CharSpan span_a, std::string_view sentence_b,
                     CharSpan span_b) const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  EncoderInfo info_;
};

/// "stub:<seed>" or "stub:<seed>:<dimension>" for the stub, "http://host:port" for the HTTP client.
std::unique_ptr<EncoderPort> make_encoder(std::string_view endpoint);

}  // namespace linkforge::embed
