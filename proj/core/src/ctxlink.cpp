#include "linkforge/ctxlink.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "linkforge/binio.hpp"
#include "linkforge/error.hpp"

namespace linkforge::ctx {

namespace {

constexpr char kMagic[8] = {'L', 'F', 'R', 'E', 'F', 'I', 'D', 'X'};

struct Scored {
  double score;
  std::uint32_t entity;  // ordinal into the sorted entity list
  std::size_t entry;
};

// Keeps each entity's best (lowest score, then lowest entry) and returns the
// top_k entities ascending; equal scores fall back to entity id order.
std::vector<RankedEntity> rank_ascending(std::vector<Scored> scored, const ReferenceIndex& index, std::size_t top_k) {
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.entity != b.entity) return a.entity < b.entity;
    return a.score != b.score ? a.score < b.score : a.entry < b.entry;
  });
  scored.erase(std::unique(scored.begin(), scored.end(),
                           [](const Scored& a, const Scored& b) { return a.entity == b.entity; }),
               scored.end());
  const auto keep = std::min(top_k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const Scored& a, const Scored& b) {
                      return a.score != b.score ? a.score < b.score : a.entity < b.entity;
                    });
  std::vector<RankedEntity> ranked;
  ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const auto& entry = index.entries()[scored[i].entry];
    ranked.push_back({entry.entity_id, scored[i].score, entry.record_id, Method::bi, std::nullopt});
  }
  return ranked;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::heuristic: return "heuristic";
    case Method::bi: return "bi";
    case Method::cross: return "cross";
  }
  return "bi";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "heuristic") return Method::heuristic;
  if (text == "bi") return Method::bi;
  if (text == "cross") return Method::cross;
  return std::nullopt;
}

std::string_view to_string(IndexMode mode) { return mode == IndexMode::exact ? "exact" : "approximate"; }

std::optional<IndexMode> parse_index_mode(std::string_view text) {
  if (text == "exact") return IndexMode::exact;
  if (text == "approximate" || text == "ann") return IndexMode::approximate;
  return std::nullopt;
}

nlohmann::json to_json(const LinkResult& result) {
  nlohmann::json ranked = nlohmann::json::array();
  for (const auto& r : result.ranked) {
    nlohmann::json item{{"entity_id", r.entity_id}, {"score", r.score}, {"method", to_string(r.method)}};
    if (!r.best_record.empty()) item["best_record"] = r.best_record;
    if (r.stage) item["stage"] = *r.stage;
    ranked.push_back(std::move(item));
  }
  nlohmann::json out{{"method", to_string(result.method)}, {"ranked", std::move(ranked)}};
  if (!result.heuristic_outcome.empty()) out["heuristic_outcome"] = result.heuristic_outcome;
  return out;
}

// ---------------------------------------------------------------------------
// ReferenceIndex

embed::Vector encode_mention(const embed::EncoderPort& encoder, std::string_view sentence, CharSpan span) {
  return embed::pool_mention(encoder.encode(sentence, span), span);
}

ReferenceIndex ReferenceIndex::build(const corpus::Corpus& corpus, const embed::EncoderPort& encoder, IndexMode mode,
                                     ann::HnswParams params) {
  const bool use_roles = corpus.has_assigned_roles();
  const std::size_t dim = encoder.info().dimension;
  std::vector<ReferenceEntry> entries;
  std::vector<SkippedRecord> skipped;
  for (const auto& r : corpus.records()) {
    if (use_roles && r.role != corpus::Role::reference) continue;
    try {
      auto v = encode_mention(encoder, r.sentence, r.span);
      if (v.size() != dim) {
        throw EncoderError("vector dimension " + std::to_string(v.size()) + " differs from handshake " +
                           std::to_string(dim));
      }
      if (std::none_of(v.begin(), v.end(), [](float x) { return x != 0.0f; })) throw EncoderError("zero vector");
      entries.push_back({r.record_id, r.entity_id, r.sentence, r.span, std::move(v)});
    } catch (const Error& e) {
      skipped.push_back({r.record_id, e.what()});
    }
  }
  std::vector<std::string> entities;
  for (const auto& e : corpus.entities()) entities.push_back(e.id);
  auto index = from_entries(std::move(entries), std::move(entities), mode, params);
  index.skipped_ = std::move(skipped);
  return index;
}

ReferenceIndex ReferenceIndex::from_entries(std::vector<ReferenceEntry> entries, std::vector<std::string> entities,
                                            IndexMode mode, ann::HnswParams params) {
  ReferenceIndex index;
  index.mode_ = mode;
  index.params_ = params;
  index.entries_ = std::move(entries);
  index.entities_ = std::move(entities);
  std::sort(index.entities_.begin(), index.entities_.end());
  index.entities_.erase(std::unique(index.entities_.begin(), index.entities_.end()), index.entities_.end());
  index.finalize();
  return index;
}

void ReferenceIndex::finalize() {
  dim_ = entries_.empty() ? 0 : entries_.front().vector.size();
  std::set<std::string_view> covered;
  entity_ordinals_.clear();
  for (const auto& e : entries_) {
    if (e.vector.size() != dim_ || dim_ == 0) throw ValidationError("reference vectors differ in dimension");
    const auto it = std::lower_bound(entities_.begin(), entities_.end(), e.entity_id);
    if (it == entities_.end() || *it != e.entity_id) {
      throw ValidationError("reference '" + e.record_id + "' belongs to entity '" + e.entity_id +
                            "' outside the target set");
    }
    entity_ordinals_.push_back(static_cast<std::uint32_t>(it - entities_.begin()));
    covered.insert(e.entity_id);
  }
  unlinkable_.clear();
  for (const auto& id : entities_) {
    if (!covered.contains(id)) unlinkable_.push_back(id);
  }
  graph_.reset();
  if (mode_ == IndexMode::approximate && !entries_.empty()) {
    graph_.emplace(dim_, params_);
    for (const auto& e : entries_) graph_->add(e.vector);
  }
}

std::vector<ann::Neighbor> ReferenceIndex::nearest(std::span<const float> query, std::size_t k) const {
  if (query.size() != dim_) {
    throw ValidationError("query dimension " + std::to_string(query.size()) + " differs from index dimension " +
                          std::to_string(dim_));
  }
  if (graph_) return graph_->search(query, k);
  std::vector<ann::Neighbor> all;
  all.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    all.push_back({embed::cosine_distance(query, entries_[i].vector), static_cast<std::uint32_t>(i)});
  }
  const auto keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end());
  all.resize(keep);
  return all;
}

void ReferenceIndex::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  binio::write(out, kFormatVersion);
  binio::write<std::uint8_t>(out, mode_ == IndexMode::exact ? 0 : 1);
  binio::write<std::uint64_t>(out, params_.M);
  binio::write<std::uint64_t>(out, params_.ef_construction);
  binio::write<std::uint64_t>(out, params_.ef_search);
  binio::write<std::uint64_t>(out, params_.seed);
  binio::write<std::uint64_t>(out, entities_.size());
  for (const auto& id : entities_) binio::write_string(out, id);
  binio::write<std::uint64_t>(out, entries_.size());
  for (const auto& e : entries_) {
    binio::write_string(out, e.record_id);
    binio::write_string(out, e.entity_id);
    binio::write_string(out, e.sentence);
    binio::write<std::uint64_t>(out, e.span.begin);
    binio::write<std::uint64_t>(out, e.span.end);
    binio::write_array(out, e.vector);
  }
  binio::write<std::uint64_t>(out, skipped_.size());
  for (const auto& s : skipped_) {
    binio::write_string(out, s.record_id);
    binio::write_string(out, s.reason);
  }
  binio::write<std::uint8_t>(out, graph_ ? 1 : 0);
  if (graph_) graph_->save(out);
  if (!out) throw IoError("failed writing reference index");
}

void ReferenceIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save(out);
}

ReferenceIndex ReferenceIndex::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a linkforge reference index (bad magic)");
  }
  const auto version = binio::read<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw FormatError("reference index version " + std::to_string(version) + " unsupported, expected " +
                      std::to_string(kFormatVersion));
  }
  ReferenceIndex index;
  const auto mode = binio::read<std::uint8_t>(in);
  if (mode > 1) throw FormatError("reference index mode out of range");
  index.mode_ = mode == 0 ? IndexMode::exact : IndexMode::approximate;
  index.params_.M = binio::read<std::uint64_t>(in);
  index.params_.ef_construction = binio::read<std::uint64_t>(in);
  index.params_.ef_search = binio::read<std::uint64_t>(in);
  index.params_.seed = binio::read<std::uint64_t>(in);
  const auto n_entities = binio::read<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_entities; ++i) index.entities_.push_back(binio::read_string(in));
  const auto n_entries = binio::read<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_entries; ++i) {
    ReferenceEntry e;
    e.record_id = binio::read_string(in);
    e.entity_id = binio::read_string(in);
    e.sentence = binio::read_string(in);
    e.span.begin = binio::read<std::uint64_t>(in);
    e.span.end = binio::read<std::uint64_t>(in);
    e.vector = binio::read_array<float>(in);
    index.entries_.push_back(std::move(e));
  }
  const auto n_skipped = binio::read<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_skipped; ++i) {
    SkippedRecord s;
    s.record_id = binio::read_string(in);
    s.reason = binio::read_string(in);
    index.skipped_.push_back(std::move(s));
  }
  const bool has_graph = binio::read<std::uint8_t>(in) != 0;
  std::optional<ann::Hnsw> graph;
  if (has_graph) graph = ann::Hnsw::load(in);

  // Validate and recompute derived fields without rebuilding the stored graph.
  const auto mode_saved = index.mode_;
  index.mode_ = IndexMode::exact;
  try {
    index.finalize();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("inconsistent reference index: ") + e.what());
  }
  index.mode_ = mode_saved;
  if ((index.mode_ == IndexMode::approximate && !index.entries_.empty()) != has_graph) {
    throw FormatError("reference index graph does not match its mode");
  }
  if (graph && (graph->size() != index.entries_.size() || graph->dimension() != index.dim_)) {
    throw FormatError("reference index graph does not match its entries");
  }
  index.graph_ = std::move(graph);
  return index;
}

ReferenceIndex ReferenceIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load(in);
}

bool operator==(const ReferenceIndex& a, const ReferenceIndex& b) {
  if (a.skipped_.size() != b.skipped_.size()) return false;
  for (std::size_t i = 0; i < a.skipped_.size(); ++i) {
    if (a.skipped_[i].record_id != b.skipped_[i].record_id || a.skipped_[i].reason != b.skipped_[i].reason) {
      return false;
    }
  }
  return a.mode_ == b.mode_ && a.params_ == b.params_ && a.dim_ == b.dim_ && a.entries_ == b.entries_ &&
         a.entities_ == b.entities_ && a.unlinkable_ == b.unlinkable_ && a.graph_ == b.graph_;
}

// ---------------------------------------------------------------------------
// Linking

LinkResult link_bi_vector(std::span<const float> query, const ReferenceIndex& index, std::size_t top_k,
                          const std::vector<std::string>* allowed) {
  if (index.empty()) throw ValidationError("reference index is empty");
  std::vector<Scored> scored;
  auto consider = [&](std::size_t entry, double distance) {
    scored.push_back({distance, index.entity_ordinal(entry), entry});
  };
  if (allowed) {
    const std::unordered_set<std::string> keep(allowed->begin(), allowed->end());
    for (std::size_t i = 0; i < index.entries().size(); ++i) {
      if (keep.contains(index.entries()[i].entity_id)) {
        consider(i, embed::cosine_distance(query, index.entries()[i].vector));
      }
    }
  } else if (index.mode() == IndexMode::exact) {
    scored.reserve(index.entries().size());
    for (std::size_t i = 0; i < index.entries().size(); ++i) {
      consider(i, embed::cosine_distance(query, index.entries()[i].vector));
    }
  } else {
    for (const auto& nb : index.nearest(query, std::max(index.params().ef_search, top_k))) consider(nb.id, nb.distance);
  }
  LinkResult result;
  result.method = Method::bi;
  result.ranked = rank_ascending(std::move(scored), index, top_k);
  return result;
}

LinkResult link_bi(std::string_view sentence, CharSpan span, const ReferenceIndex& index,
                   const embed::EncoderPort& encoder, std::size_t top_k, const std::vector<std::string>* allowed) {
  if (index.empty()) throw ValidationError("reference index is empty");
  return link_bi_vector(encode_mention(encoder, sentence, span), index, top_k, allowed);
}

LinkResult link_cross(std::string_view sentence, CharSpan span, const std::vector<const ReferenceEntry*>& candidates,
                      const embed::EncoderPort& encoder, const embed::CrossHead& head, std::size_t top_k) {
  if (!encoder.info().supports_pair_encoding) {
    throw EncoderError("encoder " + encoder.info().name + " cannot encode sentence pairs; use the bi method instead");
  }
  if (candidates.empty()) throw ValidationError("cross linking needs at least one candidate reference");
  if (head.weights.size() != encoder.info().dimension) {
    throw ValidationError("cross head dimension " + std::to_string(head.weights.size()) +
                          " differs from encoder dimension " + std::to_string(encoder.info().dimension));
  }
  struct Best {
    double p;
    const ReferenceEntry* entry;
  };
  std::map<std::string, Best> best;
  for (const auto* c : candidates) {
    const double p = embed::cross_probability(encoder.encode_pair(sentence, span, c->sentence, c->span), head);
    auto [it, inserted] = best.try_emplace(c->entity_id, Best{p, c});
    if (!inserted && p > it->second.p) it->second = {p, c};
  }
  LinkResult result;
  result.method = Method::cross;
  for (const auto& [entity, b] : best) {
    result.ranked.push_back({entity, b.p, b.entry->record_id, Method::cross, std::nullopt});
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const RankedEntity& a, const RankedEntity& b) { return a.score > b.score; });
  if (result.ranked.size() > top_k) result.ranked.resize(top_k);
  return result;
}

std::vector<const ReferenceEntry*> rerank_candidates(std::string_view sentence, CharSpan span,
                                                     const ReferenceIndex& index, const embed::EncoderPort& encoder,
                                                     std::size_t k) {
  if (index.empty()) throw ValidationError("reference index is empty");
  std::vector<const ReferenceEntry*> out;
  for (const auto& nb : index.nearest(encode_mention(encoder, sentence, span), k)) {
    out.push_back(&index.entries()[nb.id]);
  }
  return out;
}

std::vector<const ReferenceEntry*> all_candidates(const ReferenceIndex& index, const std::vector<std::string>* allowed) {
  std::unordered_set<std::string> keep;
  if (allowed) keep.insert(allowed->begin(), allowed->end());
  std::vector<const ReferenceEntry*> out;
  for (const auto& e : index.entries()) {
    if (!allowed || keep.contains(e.entity_id)) out.push_back(&e);
  }
  return out;
}

LinkResult ContextualLinker::link(std::string_view sentence, CharSpan span, std::size_t top_k,
                                  const std::vector<std::string>* allowed) const {
  if (!index || !encoder) throw ValidationError("contextual linker needs a reference index and an encoder");
  switch (method) {
    case Method::bi:
      return link_bi(sentence, span, *index, *encoder, top_k, allowed);
    case Method::cross: {
      if (!head) throw ValidationError("cross linking needs a cross head");
      const auto candidates = cross_all || allowed ? all_candidates(*index, allowed)
                                                   : rerank_candidates(sentence, span, *index, *encoder, rerank_k);
      return link_cross(sentence, span, candidates, *encoder, *head, top_k);
    }
    case Method::heuristic:
      break;
  }
  throw ValidationError("contextual linker method must be bi or cross");
}

}  // namespace linkforge::ctx
