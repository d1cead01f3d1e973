#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "linkforge/encoder.hpp"
#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::embed {
namespace {

using nlohmann::json;

TEST(StubEncoder, Deterministic) {
  const StubEncoder a(7), b(7);
  const std::string s = "Der Motorflansch ist undicht.";
  const auto x = a.encode(s, {4, 16});
  const auto y = b.encode(s, {4, 16});
  EXPECT_EQ(x.vectors, y.vectors);
  EXPECT_EQ(x.token_spans, y.token_spans);
  EXPECT_EQ(x.dimension(), StubEncoder::kDefaultDimension);
  EXPECT_NE(StubEncoder(8).token_vector(U"motor"), a.token_vector(U"motor"));
}

TEST(StubEncoder, TokensAreContextFreeAndCaseFolded) {
  const StubEncoder enc(3, 32);
  const auto first = enc.encode("Neuer flansch montiert", {6, 13});
  const auto second = enc.encode("Der Flansch, gestern", {4, 11});
  ASSERT_EQ(first.size(), 3u);
  ASSERT_EQ(second.size(), 3u);
  EXPECT_EQ(first.vectors[1], second.vectors[1]);
  // Edge punctuation is trimmed from the token span.
  EXPECT_EQ(second.token_spans[1], (CharSpan{4, 11}));
  double norm = 0;
  for (float x : first.vectors[0]) norm += static_cast<double>(x) * x;
  EXPECT_NEAR(norm, 1.0, 1e-6);
}

TEST(StubEncoder, SpansAlignWithSentence) {
  const StubEncoder enc(1, 8);
  const std::string s = "Ölaustritt (stark) an der Spindel!";
  const auto seq = enc.encode(s, {0, 10});
  std::vector<std::string> words;
  for (const auto& span : seq.token_spans) words.push_back(text::substr(s, span));
  EXPECT_EQ(words, (std::vector<std::string>{"Ölaustritt", "stark", "an", "der", "Spindel"}));
}

// Two mentions built from disjoint random vocabularies are close to orthogonal.
TEST(StubEncoder, DisjointVocabulariesAreFarApart) {
  const StubEncoder enc(11);
  rng::SplitMix64 gen(1);
  double sum = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::string a, b;
    for (int i = 0; i < 3; ++i) {
      a += "a" + std::to_string(gen() % 100000) + " ";
      b += "b" + std::to_string(gen() % 100000) + " ";
    }
    a.pop_back();
    b.pop_back();
    const auto va = pool_mention(enc.encode(a, {0, text::length(a)}), {0, text::length(a)});
    const auto vb = pool_mention(enc.encode(b, {0, text::length(b)}), {0, text::length(b)});
    sum += cosine_distance(va, vb);
  }
  // One draw has standard deviation about 1/sqrt(128); the mean of 400 is within 0.02 of 1.
  EXPECT_NEAR(sum / trials, 1.0, 0.02);
}

TEST(StubEncoder, PairIsMeanOfPooledMentions) {
  const StubEncoder enc(5, 16);
  const std::string a = "Leck am Ventil", b = "starker Ölverlust heute";
  const auto pa = pool_mention(enc.encode(a, {0, 4}), {0, 4});
  const auto pb = pool_mention(enc.encode(b, {8, 17}), {8, 17});
  const auto pair = enc.encode_pair(a, {0, 4}, b, {8, 17});
  ASSERT_EQ(pair.size(), 16u);
  for (std::size_t i = 0; i < pair.size(); ++i) EXPECT_NEAR(pair[i], (pa[i] + pb[i]) / 2.0, 1e-7);
  EXPECT_TRUE(enc.info().supports_pair_encoding);
}

TEST(MakeEncoder, ParsesEndpoints) {
  EXPECT_EQ(make_encoder("stub:7")->info().dimension, StubEncoder::kDefaultDimension);
  EXPECT_EQ(make_encoder("stub:7:24")->info().dimension, 24u);
  EXPECT_THROW((void)make_encoder("stub:"), ValidationError);
  EXPECT_THROW((void)make_encoder("stub:x"), ValidationError);
  EXPECT_THROW((void)make_encoder("grpc://host"), ValidationError);
}

// In-process encoder service speaking the wire protocol, backed by the stub.
class MockEncoderServer {
 public:
  enum class Fault { none, wrong_id, wrong_dimension, http_error, bad_json, no_pairs, bad_span, truncated };

  explicit MockEncoderServer(std::size_t dimension = 16) : stub_(42, dimension) {
    server_.Get("/handshake", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"dimension", stub_.info().dimension},
                           {"supports_pair_encoding", fault_ != Fault::no_pairs},
                           {"model", "mock"}}
                          .dump(),
                      "application/json");
    });
    server_.Post("/encode", [this](const httplib::Request& req, httplib::Response& res) { handle(req, res); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockEncoderServer() {
    server_.stop();
    thread_.join();
  }

  [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  void set_fault(Fault f) { fault_ = f; }
  [[nodiscard]] std::size_t requests() const { return requests_; }
  [[nodiscard]] const StubEncoder& stub() const { return stub_; }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    const Fault fault = fault_;
    if (fault == Fault::http_error) {
      res.status = 500;
      res.set_content("boom", "text/plain");
      return;
    }
    if (fault == Fault::bad_json) {
      res.set_content("{\"id\":", "application/json");
      return;
    }
    const auto body = json::parse(req.body);
    json out{{"id", body.at("id").get<std::uint64_t>() + (fault == Fault::wrong_id ? 1 : 0)},
             {"dimension", stub_.info().dimension}};
    const auto span = [](const json& s) { return CharSpan{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()}; };
    const auto& texts = body.at("texts");
    const auto& spans = body.at("spans");
    if (body.at("mode") == "pair") {
      out["vectors"] = {stub_.encode_pair(texts[0].get<std::string>(), span(spans[0]), texts[1].get<std::string>(),
                                          span(spans[1]))};
    } else {
      const auto seq = stub_.encode(texts[0].get<std::string>(), span(spans[0]));
      json vectors = json::array(), token_spans = json::array();
      for (std::size_t i = 0; i < seq.size(); ++i) {
        auto v = seq.vectors[i];
        if (fault == Fault::wrong_dimension) v.push_back(0.0f);
        vectors.push_back(v);
        token_spans.push_back({seq.token_spans[i].begin, seq.token_spans[i].end + (fault == Fault::bad_span ? 1000 : 0)});
      }
      out["vectors"] = vectors;
      out["token_spans"] = token_spans;
    }
    if (fault == Fault::truncated) out["truncated"] = true;
    res.set_content(out.dump(), "application/json");
  }

  StubEncoder stub_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<Fault> fault_{Fault::none};
  std::atomic<std::size_t> requests_{0};
};

TEST(HttpEncoder, HandshakeAndParityWithBackingModel) {
  MockEncoderServer server;
  HttpEncoder enc(server.url());
  EXPECT_EQ(enc.info().dimension, 16u);
  EXPECT_TRUE(enc.info().supports_pair_encoding);

  const std::string s = "Der Kunde hat erheblichen Ölaustritt direkt an der Frässpindel.";
  const CharSpan span{26, 36};
  const auto remote = enc.encode(s, span);
  const auto local = server.stub().encode(s, span);
  EXPECT_EQ(remote.token_spans, local.token_spans);
  EXPECT_EQ(remote.vectors, local.vectors);
  const auto pooled = pool_mention(remote, span);
  const auto expected = pool_mention(local, span);
  for (std::size_t i = 0; i < pooled.size(); ++i) EXPECT_NEAR(pooled[i], expected[i], 1e-5);

  EXPECT_EQ(enc.encode_pair(s, span, "Ein Leck am Ventil", {4, 8}),
            server.stub().encode_pair(s, span, "Ein Leck am Ventil", {4, 8}));
  // Repeated requests give identical vectors.
  EXPECT_EQ(enc.encode(s, span).vectors, remote.vectors);
}

TEST(HttpEncoder, UrlPrefixAndFactory) {
  MockEncoderServer server;
  auto enc = make_encoder(server.url());
  EXPECT_EQ(enc->info().dimension, 16u);
  EXPECT_THROW(HttpEncoder("https://example.org"), ValidationError);
}

TEST(HttpEncoder, TruncationFlagIsAccepted) {
  MockEncoderServer server;
  HttpEncoder enc(server.url());
  server.set_fault(MockEncoderServer::Fault::truncated);
  EXPECT_EQ(enc.encode("Ein Leck", {4, 8}).size(), 2u);
}

TEST(HttpEncoder, ProtocolViolationsRaiseEncoderError) {
  using Fault = MockEncoderServer::Fault;
  MockEncoderServer server;
  HttpEncoder enc(server.url());
  for (const Fault f : {Fault::wrong_id, Fault::wrong_dimension, Fault::http_error, Fault::bad_json, Fault::bad_span}) {
    server.set_fault(f);
    EXPECT_THROW((void)enc.encode("Ein Leck am Ventil", {4, 8}), EncoderError) << static_cast<int>(f);
  }
  server.set_fault(Fault::wrong_id);
  EXPECT_THROW((void)enc.encode_pair("Ein Leck", {4, 8}, "Ein Leck", {4, 8}), EncoderError);
}

TEST(HttpEncoder, PairEncodingUnsupported) {
  MockEncoderServer server;
  server.set_fault(MockEncoderServer::Fault::no_pairs);
  HttpEncoder enc(server.url());
  EXPECT_FALSE(enc.info().supports_pair_encoding);
  const auto before = server.requests();
  try {
    (void)enc.encode_pair("Ein Leck", {4, 8}, "Ein Leck", {4, 8});
    FAIL() << "expected EncoderError";
  } catch (const EncoderError& e) {
    EXPECT_NE(std::string(e.what()).find("bi-encoder"), std::string::npos);
  }
  EXPECT_EQ(server.requests(), before);
}

TEST(HttpEncoder, UnreachableServer) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  EXPECT_THROW(HttpEncoder("http://127.0.0.1:" + std::to_string(port), 2.0), EncoderError);
}

}  // namespace
}  // namespace linkforge::embed
