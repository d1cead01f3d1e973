#include "linkforge/encoder.hpp"

#include <charconv>
#include <cmath>

#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::embed {

StubEncoder::StubEncoder(std::uint64_t seed, std::size_t dimension) : seed_(seed) {
  if (dimension == 0) throw ValidationError("stub encoder dimension must be positive");
  info_ = {dimension, true, false, "stub:" + std::to_string(seed)};
}

Vector StubEncoder::token_vector(std::u32string_view token) const {
  const std::string key = text::to_utf8(text::to_lower(token));
  rng::SplitMix64 gen(rng::derive_seed(seed_, rng::fnv1a64(key)));
  std::vector<double> draw(info_.dimension);
  double norm = 0.0;
  for (auto& x : draw) {
    x = rng::normal(gen);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  Vector out(info_.dimension);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(draw[i] / norm);
  return out;
}

TokenEmbeddingSeq StubEncoder::encode(std::string_view sentence, CharSpan) const {
  TokenEmbeddingSeq seq;
  for (const auto& token : text::split_whitespace(text::to_u32(text::nfc(sentence)))) {
    std::size_t lo = 0, hi = token.text.size();
    while (lo < hi && !text::is_alnum(token.text[lo])) ++lo;
    while (hi > lo && !text::is_alnum(token.text[hi - 1])) --hi;
    if (lo == hi) continue;
    seq.vectors.push_back(token_vector(std::u32string_view(token.text).substr(lo, hi - lo)));
    seq.token_spans.push_back({token.span.begin + lo, token.span.begin + hi});
  }
  return seq;
}

Vector StubEncoder::encode_pair(std::string_view sentence_a, CharSpan span_a, std::string_view sentence_b,
                                CharSpan span_b) const {
  const Vector a = pool_mention(encode(sentence_a, span_a), span_a);
  const Vector b = pool_mention(encode(sentence_b, span_b), span_b);
  Vector out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>((static_cast<double>(a[i]) + b[i]) / 2.0);
  return out;
}

namespace {

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw ValidationError("bad " + std::string(what) + " '" + std::string(s) + "' in encoder endpoint");
  }
  return value;
}

}  // namespace

std::unique_ptr<EncoderPort> make_encoder(std::string_view endpoint) {
  if (endpoint.starts_with("stub:")) {
    std::string_view rest = endpoint.substr(5);
    const auto colon = rest.find(':');
    const auto seed = parse_u64(rest.substr(0, colon), "seed");
    std::size_t dimension = StubEncoder::kDefaultDimension;
    if (colon != std::string_view::npos) dimension = parse_u64(rest.substr(colon + 1), "dimension");
    return std::make_unique<StubEncoder>(seed, dimension);
  }
  if (endpoint.starts_with("http://")) return std::make_unique<HttpEncoder>(std::string(endpoint));
  throw ValidationError("encoder endpoint must be 'stub:<seed>' or an http:// URL, got '" + std::string(endpoint) + "'");
}

}  // namespace linkforge::embed
