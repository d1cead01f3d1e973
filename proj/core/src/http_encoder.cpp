#include <cmath>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "linkforge/encoder.hpp"
#include "linkforge/error.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::embed {

using nlohmann::json;

struct HttpEncoder::Impl {
  std::string host;    // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
  std::unique_ptr<httplib::Client> client;
  std::mutex mutex;
  std::uint64_t next_id = 1;

  json get(const std::string& path) {
    std::lock_guard lock(mutex);
    auto res = client->Get(prefix + path);
    return check(res, path);
  }

  json post(const std::string& path, json body, std::uint64_t& id) {
    std::lock_guard lock(mutex);
    id = next_id++;
    body["id"] = id;
    auto res = client->Post(prefix + path, body.dump(), "application/json");
    return check(res, path);
  }

  json check(const httplib::Result& res, const std::string& path) const {
    if (!res) throw EncoderError("encoder " + host + prefix + path + ": " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw EncoderError("encoder " + host + prefix + path + " returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200));
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw EncoderError("encoder " + host + prefix + path + " sent invalid JSON: " + e.what());
    }
  }
};

namespace {

Vector to_vector(const json& j, std::size_t dimension) {
  auto v = j.get<Vector>();
  if (v.size() != dimension) {
    throw EncoderError("encoder vector has dimension " + std::to_string(v.size()) + ", handshake said " +
                       std::to_string(dimension));
  }
  for (float x : v) {
    if (!std::isfinite(x)) throw EncoderError("encoder returned a non-finite value");
  }
  return v;
}

json span_json(CharSpan s) { return json::array({s.begin, s.end}); }

}  // namespace

HttpEncoder::HttpEncoder(std::string base_url, double timeout_seconds) : impl_(std::make_unique<Impl>()) {
  constexpr std::string_view scheme = "http://";
  if (!std::string_view(base_url).starts_with(scheme)) throw ValidationError("encoder URL must start with http://");
  const auto slash = base_url.find('/', scheme.size());
  impl_->host = base_url.substr(0, slash);
  if (slash != std::string::npos) {
    impl_->prefix = base_url.substr(slash);
    while (!impl_->prefix.empty() && impl_->prefix.back() == '/') impl_->prefix.pop_back();
  }
  impl_->client = std::make_unique<httplib::Client>(impl_->host);
  const auto secs = static_cast<time_t>(timeout_seconds);
  const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  impl_->client->set_connection_timeout(secs, usecs);
  impl_->client->set_read_timeout(secs, usecs);

  const json hs = impl_->get("/handshake");
  try {
    info_.dimension = hs.at("dimension").get<std::size_t>();
    info_.supports_pair_encoding = hs.at("supports_pair_encoding").get<bool>();
    info_.single_flight = hs.value("single_flight", false);
  } catch (const json::exception& e) {
    throw EncoderError(std::string("bad encoder handshake: ") + e.what());
  }
  if (info_.dimension == 0) throw EncoderError("encoder handshake reports dimension 0");
  info_.name = base_url;
}

HttpEncoder::~HttpEncoder() = default;

TokenEmbeddingSeq HttpEncoder::encode(std::string_view sentence, CharSpan span) const {
  const std::string text = text::nfc(sentence);
  std::uint64_t id = 0;
  const json res = impl_->post("/encode", {{"mode", "single"}, {"texts", {text}}, {"spans", {span_json(span)}}}, id);
  TokenEmbeddingSeq seq;
  try {
    if (res.at("id").get<std::uint64_t>() != id) throw EncoderError("encoder response id does not match request");
    if (res.at("dimension").get<std::size_t>() != info_.dimension) {
      throw EncoderError("encoder response dimension differs from handshake");
    }
    const auto& vectors = res.at("vectors");
    const auto& spans = res.at("token_spans");
    if (vectors.size() != spans.size()) throw EncoderError("encoder returned mismatched vectors and token_spans");
    const std::size_t length = text::length(text);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      seq.vectors.push_back(to_vector(vectors[i], info_.dimension));
      const CharSpan s{spans[i].at(0).get<std::size_t>(), spans[i].at(1).get<std::size_t>()};
      if (s.begin > s.end || s.end > length) throw EncoderError("encoder token span out of sentence bounds");
      if (!seq.token_spans.empty() && s.begin < seq.token_spans.back().begin) {
        throw EncoderError("encoder token spans are not non-decreasing");
      }
      seq.token_spans.push_back(s);
    }
  } catch (const json::exception& e) {
    throw EncoderError(std::string("malformed encoder response: ") + e.what());
  }
  return seq;
}

Vector HttpEncoder::encode_pair(std::string_view sentence_a, CharSpan span_a, std::string_view sentence_b,
                                CharSpan span_b) const {
  if (!info_.supports_pair_encoding) {
    throw EncoderError("encoder " + info_.name + " does not support pair encoding; use the bi-encoder method");
  }
  std::uint64_t id = 0;
  const json res = impl_->post("/encode",
                               {{"mode", "pair"},
                                {"texts", {text::nfc(sentence_a), text::nfc(sentence_b)}},
                                {"spans", {span_json(span_a), span_json(span_b)}}},
                               id);
  try {
    if (res.at("id").get<std::uint64_t>() != id) throw EncoderError("encoder response id does not match request");
    const auto& vectors = res.at("vectors");
    if (vectors.size() != 1) throw EncoderError("pair mode must return exactly one vector");
    return to_vector(vectors[0], info_.dimension);
  } catch (const json::exception& e) {
    throw EncoderError(std::string("malformed encoder response: ") + e.what());
  }
}

}  // namespace linkforge::embed
