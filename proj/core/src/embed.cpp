#include "linkforge/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"

namespace linkforge::embed {

Vector pool_mention(const TokenEmbeddingSeq& seq, CharSpan span) {
  if (seq.vectors.size() != seq.token_spans.size()) {
    throw ValidationError("token embedding sequence has " + std::to_string(seq.vectors.size()) + " vectors but " +
                          std::to_string(seq.token_spans.size()) + " spans");
  }
  const std::size_t d = seq.dimension();
  std::vector<double> sum(d, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!seq.token_spans[i].overlaps(span)) continue;
    if (seq.vectors[i].size() != d) throw ValidationError("token vectors differ in dimension");
    for (std::size_t j = 0; j < d; ++j) sum[j] += seq.vectors[i][j];
    ++count;
  }
  if (count == 0) {
    std::string spans;
    for (const auto& s : seq.token_spans) spans += " [" + std::to_string(s.begin) + "," + std::to_string(s.end) + ")";
    throw ValidationError("no token overlaps mention span [" + std::to_string(span.begin) + "," +
                          std::to_string(span.end) + "); token spans:" + (spans.empty() ? " none" : spans));
  }
  Vector out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(sum[j] / static_cast<double>(count));
  return out;
}

double cosine_distance(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw ValidationError("dimension mismatch: " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<double>(u[i]) * v[i];
    nu += static_cast<double>(u[i]) * u[i];
    nv += static_cast<double>(v[i]) * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine distance of a zero vector");
  const double cos = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
  return 1.0 - cos;
}

double max_margin_loss(double dist, int y, double margin) {
  if (y == 1) return dist * dist;
  const double gap = std::max(margin - dist, 0.0);
  return gap * gap;
}

double max_margin_loss_grad(double dist, int y, double margin) {
  if (y == 1) return 2.0 * dist;
  return dist < margin ? -2.0 * (margin - dist) : 0.0;
}

double cross_logit(std::span<const float> pair_vec, const CrossHead& head) {
  if (pair_vec.size() != head.weights.size()) {
    throw ValidationError("cross head expects dimension " + std::to_string(head.weights.size()) + ", got " +
                          std::to_string(pair_vec.size()));
  }
  double z = head.bias;
  for (std::size_t i = 0; i < pair_vec.size(); ++i) z += static_cast<double>(head.weights[i]) * pair_vec[i];
  return z;
}

double cross_probability(std::span<const float> pair_vec, const CrossHead& head) {
  const double z = cross_logit(pair_vec, head);
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_loss(double p, int y) {
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -std::log(p) : -std::log1p(-p);
}

double bce_loss_grad(double p, int y) {
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -1.0 / p : 1.0 / (1.0 - p);
}

CrossHead CrossHead::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    return {doc.at("weights").get<Vector>(), doc.value("bias", 0.0)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("bad cross head file " + path.string() + ": " + e.what());
  }
}

PairSampling sample_pairs(const corpus::Corpus& corpus, std::size_t negatives_per_positive, std::uint64_t seed) {
  PairSampling out;
  const auto& records = corpus.records();
  std::size_t populated = 0;
  for (const auto& e : corpus.entities()) {
    const auto& idx = corpus.records_of(e.id);
    if (!idx.empty()) ++populated;
    if (idx.size() == 1) out.warnings.push_back("entity '" + e.id + "' has one record and yields no positive pairs");
  }
  if (populated < 2) {
    throw ValidationError("pair sampling needs at least two entities with records, found " + std::to_string(populated));
  }

  rng::SplitMix64 gen(seed);
  auto draw_negative = [&]() -> PairSample {
    while (true) {
      const auto& a = records[rng::uniform_below(gen, records.size())];
      const auto& b = records[rng::uniform_below(gen, records.size())];
      if (a.entity_id != b.entity_id) return {a.record_id, b.record_id, 0};
    }
  };
  for (const auto& e : corpus.entities()) {
    const auto& idx = corpus.records_of(e.id);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        out.pairs.push_back({records[idx[i]].record_id, records[idx[j]].record_id, 1});
        for (std::size_t k = 0; k < negatives_per_positive; ++k) out.pairs.push_back(draw_negative());
      }
    }
  }
  return out;
}

void write_pairs_jsonl(const std::vector<PairSample>& pairs, std::ostream& out) {
  for (const auto& p : pairs) {
    out << nlohmann::json{{"left_record", p.left}, {"right_record", p.right}, {"label", p.label}}.dump() << '\n';
  }
  if (!out) throw IoError("failed writing pair samples");
}

std::vector<PairSample> read_pairs_jsonl(std::istream& in) {
  std::vector<PairSample> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      PairSample p{j.at("left_record").get<std::string>(), j.at("right_record").get<std::string>(),
                   j.at("label").get<int>()};
      if (p.label != 0 && p.label != 1) {
        throw ValidationError("pair sample line " + std::to_string(lineno) + ": label must be 0 or 1");
      }
      pairs.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("pair sample line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pairs;
}

}  // namespace linkforge::embed
