#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "linkforge/corpus.hpp"
#include "linkforge/ctxlink.hpp"
#include "linkforge/embed.hpp"
#include "linkforge/encoder.hpp"
#include "linkforge/error.hpp"
#include "linkforge/evalkit.hpp"
#include "linkforge/heuristic.hpp"
#include "linkforge/hybrid.hpp"
#include "linkforge/normalize.hpp"
#include "linkforge/synonyms.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared plumbing

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot open " + path + " for writing");
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }
  void close(const std::string& what) {
    stream_->flush();
    if (!*stream_) throw IoError("failed writing " + what);
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

corpus::Corpus load_corpus(const std::string& path, const std::string& entities, std::ostream& err) {
  auto result = corpus::ingest_jsonl(std::filesystem::path(path),
                                     entities.empty() ? std::nullopt : std::optional<std::filesystem::path>(entities));
  for (const auto& r : result.report.rejected) err << path << ":" << r.line << ": rejected: " << r.reason << '\n';
  return std::move(result.corpus);
}

normalize::NormalizerConfig make_normalizer(const std::string& language, const std::string& resources) {
  const auto lang = normalize::parse_language(language);
  if (!lang) throw ValidationError("unknown language '" + language + "' (use de or en)");
  if (!resources.empty()) return normalize::NormalizerConfig::load(resources, *lang);
  return *lang == normalize::Language::english ? normalize::NormalizerConfig::english()
                                               : normalize::NormalizerConfig::defaults();
}

std::vector<const corpus::MentionRecord*> query_records(const corpus::Corpus& c) {
  if (c.has_assigned_roles()) return c.records_with_role(corpus::Role::query);
  std::vector<const corpus::MentionRecord*> out;
  for (const auto& r : c.records()) out.push_back(&r);
  return out;
}

struct NormalizerOptions {
  std::string language = "de";
  std::string resources;

  void add(CLI::App* app) {
    app->add_option("--language", language, "Stemmer language: de or en")->capture_default_str();
    app->add_option("--resources", resources, "Directory with stopwords.txt, corporate_suffixes.txt, compound_scores.tsv");
  }
};

// Everything needed to run one of the four linking methods.
struct LinkOptions {
  std::string method = "hybrid";
  std::string contextual = "bi";
  std::string fuzzy_index;
  std::string ref_index;
  std::string encoder;
  std::string head;
  std::size_t top_k = 10;
  std::size_t rerank_k = 64;
  std::size_t max_edit = 2;
  bool cross_all = false;
  bool restrict_to_ties = false;
  NormalizerOptions norm;

  void add(CLI::App* app) {
    app->add_option("--method", method, "heuristic, bi, cross or hybrid")
        ->check(CLI::IsMember({"heuristic", "bi", "cross", "hybrid"}))
        ->capture_default_str();
    app->add_option("--contextual", contextual, "Fallback method for hybrid: bi or cross")
        ->check(CLI::IsMember({"bi", "cross"}))
        ->capture_default_str();
    app->add_option("--fuzzy-index", fuzzy_index, "Name index file (index-fuzzy output)");
    app->add_option("--ref-index", ref_index, "Reference index file (index-ref output)");
    app->add_option("--encoder", encoder, "stub:<seed>[:<dim>] or http://host:port")->envname("LINKFORGE_ENCODER");
    app->add_option("--head", head, "Cross head JSON {weights, bias}; zeros when omitted");
    app->add_option("--top-k", top_k, "Entities per result")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--rerank-k", rerank_k, "Nearest references scored by cross")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--max-edit", max_edit, "Heuristic edit radius (clamped to the index radius)")
        ->check(CLI::Range(0, 3))
        ->capture_default_str();
    app->add_flag("--all", cross_all, "Cross scores every reference instead of reranking");
    app->add_flag("--restrict-to-ties", restrict_to_ties, "Hybrid fallback searches only the tied entities");
    norm.add(app);
  }
};

class LinkSetup {
 public:
  explicit LinkSetup(const LinkOptions& o) : opts_(o) {
    const bool heuristic = o.method == "heuristic" || o.method == "hybrid";
    const bool contextual = o.method != "heuristic";
    const bool cross = o.method == "cross" || (o.method == "hybrid" && o.contextual == "cross");
    if (heuristic) {
      if (o.fuzzy_index.empty()) throw ValidationError("--method " + o.method + " needs --fuzzy-index");
      config_.emplace(make_normalizer(o.norm.language, o.norm.resources));
      names_.emplace(fuzzy::NameIndex::load(std::filesystem::path(o.fuzzy_index)));
    }
    if (contextual) {
      if (o.ref_index.empty()) throw ValidationError("--method " + o.method + " needs --ref-index");
      if (o.encoder.empty()) throw ValidationError("--method " + o.method + " needs --encoder or LINKFORGE_ENCODER");
      refs_.emplace(ctx::ReferenceIndex::load(std::filesystem::path(o.ref_index)));
      encoder_ = embed::make_encoder(o.encoder);
      if (!refs_->empty() && refs_->dimension() != encoder_->info().dimension) {
        throw ValidationError("reference index dimension " + std::to_string(refs_->dimension()) +
                              " differs from encoder dimension " + std::to_string(encoder_->info().dimension));
      }
      if (cross) {
        head_ = o.head.empty() ? embed::CrossHead::zeros(encoder_->info().dimension)
                               : embed::CrossHead::load(o.head);
      }
      contextual_.index = &*refs_;
      contextual_.encoder = encoder_.get();
      contextual_.head = head_ ? &*head_ : nullptr;
      contextual_.rerank_k = o.rerank_k;
      contextual_.cross_all = o.cross_all;
      contextual_.method = o.method == "cross" || (o.method == "hybrid" && o.contextual == "cross")
                               ? ctx::Method::cross
                               : ctx::Method::bi;
    }
    hybrid_.contextual_method = contextual_.method;
    hybrid_.max_edit = o.max_edit;
    hybrid_.top_k = o.top_k;
    hybrid_.restrict_to_ties = o.restrict_to_ties;
  }

  ctx::LinkResult link(std::string_view mention, std::string_view sentence, CharSpan span) const {
    if (opts_.method == "heuristic") {
      return hybrid::heuristic_result(fuzzy::heuristic_link(mention, *names_, *config_, opts_.max_edit), opts_.top_k);
    }
    if (opts_.method == "hybrid") {
      return hybrid::link_hybrid(mention, sentence, span, *names_, *config_, contextual_, hybrid_);
    }
    return contextual_.link(sentence, span, opts_.top_k);
  }

  [[nodiscard]] std::vector<std::string> unlinkable() const { return refs_ ? refs_->unlinkable() : std::vector<std::string>{}; }
  [[nodiscard]] const ctx::ReferenceIndex* refs() const { return refs_ ? &*refs_ : nullptr; }
  [[nodiscard]] const embed::EncoderPort* encoder() const { return encoder_.get(); }

 private:
  LinkOptions opts_;
  std::optional<normalize::NormalizerConfig> config_;
  std::optional<fuzzy::NameIndex> names_;
  std::optional<ctx::ReferenceIndex> refs_;
  std::unique_ptr<embed::EncoderPort> encoder_;
  std::optional<embed::CrossHead> head_;
  ctx::ContextualLinker contextual_;
  hybrid::HybridConfig hybrid_;
};

// ---------------------------------------------------------------------------
// Subcommands

struct IngestCmd {
  std::string mentions, entities, out, entities_out;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("ingest", "Validate a mention JSONL file and write the normalized corpus");
    sub->add_option("--mentions", mentions, "Mention JSONL")->required();
    sub->add_option("--entities", entities, "Entities JSONL (id, canonical_name)");
    sub->add_option("--out", out, "Corpus JSONL output")->required();
    sub->add_option("--entities-out", entities_out, "Entities JSONL output");
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    auto result = corpus::ingest_jsonl(std::filesystem::path(mentions),
                                       entities.empty() ? std::nullopt : std::optional<std::filesystem::path>(entities));
    Output o(out, out_stream);
    corpus::write_jsonl(result.corpus, *o);
    o.close(out);
    if (!entities_out.empty()) {
      Output e(entities_out, out_stream);
      corpus::write_entities_jsonl(result.corpus, *e);
      e.close(entities_out);
    }
    json rejected = json::array();
    for (const auto& r : result.report.rejected) rejected.push_back({{"line", r.line}, {"reason", r.reason}});
    json report{{"accepted", result.report.accepted},
                {"duplicates", result.report.duplicates},
                {"entities", result.corpus.entities().size()},
                {"rejected", rejected}};
    (out == "-" ? err : out_stream) << report.dump() << '\n';
    return 0;
  }
  bool run_ = false;
};

struct SplitCmd {
  std::string in, entities, mode = "roles", out, train, validation, test;
  std::vector<double> fractions{0.8, 0.1, 0.1};
  double ref_fraction = 0.5;
  std::uint64_t seed = 0;
  bool force = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("split", "Split a corpus by entity or into reference/query roles");
    sub->add_option("--in", in, "Corpus JSONL")->required();
    sub->add_option("--entities", entities, "Entities JSONL");
    sub->add_option("--mode", mode, "entities or roles")->check(CLI::IsMember({"entities", "roles"}))
        ->capture_default_str();
    sub->add_option("--fractions", fractions, "Train,validation,test fractions")->delimiter(',')->expected(3);
    sub->add_option("--ref-fraction", ref_fraction, "Reference share per entity")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_flag("--force", force, "Reassign roles already present in the input");
    sub->add_option("--out", out, "Output corpus (roles mode)");
    sub->add_option("--train", train, "Train corpus output (entities mode)");
    sub->add_option("--validation", validation, "Validation corpus output (entities mode)");
    sub->add_option("--test", test, "Test corpus output (entities mode)");
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    const auto c = load_corpus(in, entities, err);
    if (mode == "roles") {
      if (out.empty()) throw ValidationError("split --mode roles needs --out");
      auto result = corpus::split_reference_query(c, ref_fraction, seed, force);
      for (const auto& w : result.warnings) err << "warning: " << w << '\n';
      Output o(out, out_stream);
      corpus::write_jsonl(result.corpus, *o);
      o.close(out);
      return 0;
    }
    if (train.empty() || validation.empty() || test.empty()) {
      throw ValidationError("split --mode entities needs --train, --validation and --test");
    }
    if (fractions.size() != 3) throw ValidationError("--fractions takes three values");
    const auto parts = corpus::split_entities(c, {fractions[0], fractions[1], fractions[2]}, seed);
    for (const auto& [path, part] : {std::pair{&train, &parts.train}, {&validation, &parts.validation},
                                     {&test, &parts.test}}) {
      Output o(*path, out_stream);
      corpus::write_jsonl(*part, *o);
      o.close(*path);
    }
    return 0;
  }
  bool run_ = false;
};

struct IndexFuzzyCmd {
  std::string entities, corpus_path, out;
  std::size_t max_edit = 2;
  NormalizerOptions norm;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("index-fuzzy", "Build the cascade name index over entity names");
    sub->add_option("--entities", entities, "Entities JSONL (id, canonical_name)");
    sub->add_option("--corpus", corpus_path, "Corpus JSONL; its entities are indexed");
    sub->add_option("--max-edit", max_edit, "Index radius")->check(CLI::Range(0, 3))->capture_default_str();
    sub->add_option("--out", out, "Index file")->required();
    norm.add(sub);
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    if (entities.empty() == corpus_path.empty()) throw ValidationError("index-fuzzy needs exactly one of --entities, --corpus");
    corpus::Corpus c;
    if (!corpus_path.empty()) {
      c = load_corpus(corpus_path, "", err);
    } else {
      std::istringstream none;
      std::ifstream ents(entities);
      if (!ents) throw IoError("cannot open " + entities);
      auto result = corpus::ingest_jsonl(none, &ents);
      for (const auto& r : result.report.rejected) err << entities << ":" << r.line << ": rejected: " << r.reason << '\n';
      c = std::move(result.corpus);
    }
    const auto index = fuzzy::NameIndex::build(c.entities(), make_normalizer(norm.language, norm.resources), max_edit);
    Output o(out, out_stream);
    index.save(*o);
    o.close(out);
    return 0;
  }
  bool run_ = false;
};

struct IndexRefCmd {
  std::string corpus_path, entities, encoder, mode = "approximate", out;
  ann::HnswParams params;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("index-ref", "Encode reference mentions into a searchable index");
    sub->add_option("--corpus", corpus_path, "Corpus JSONL with reference records")->required();
    sub->add_option("--entities", entities, "Entities JSONL (adds entities without mentions)");
    sub->add_option("--encoder", encoder, "stub:<seed>[:<dim>] or http://host:port")->envname("LINKFORGE_ENCODER");
    sub->add_option("--mode", mode, "exact or approximate")->check(CLI::IsMember({"exact", "approximate"}))
        ->capture_default_str();
    sub->add_option("--M", params.M, "Graph degree")->capture_default_str();
    sub->add_option("--ef-construction", params.ef_construction, "Build beam width")->capture_default_str();
    sub->add_option("--ef-search", params.ef_search, "Query beam width")->capture_default_str();
    sub->add_option("--seed", params.seed, "Graph level seed")->capture_default_str();
    sub->add_option("--out", out, "Index file")->required();
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    if (encoder.empty()) throw ValidationError("index-ref needs --encoder or LINKFORGE_ENCODER");
    const auto c = load_corpus(corpus_path, entities, err);
    const auto enc = embed::make_encoder(encoder);
    const auto index = ctx::ReferenceIndex::build(c, *enc, *ctx::parse_index_mode(mode), params);
    for (const auto& s : index.skipped()) err << "skipped " << s.record_id << ": " << s.reason << '\n';
    for (const auto& u : index.unlinkable()) err << "unlinkable entity: " << u << '\n';
    Output o(out, out_stream);
    index.save(*o);
    o.close(out);
    return 0;
  }
  bool run_ = false;
};

struct LinkCmd {
  std::string queries, out;
  LinkOptions link;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("link", "Link query mentions and write LinkResult JSONL");
    sub->add_option("--queries", queries, "Mention JSONL; query-role records when roles are set")->required();
    sub->add_option("--out", out, "LinkResult JSONL output (stdout when omitted)");
    link.add(sub);
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    const auto c = load_corpus(queries, "", err);
    const LinkSetup setup(link);
    Output o(out, out_stream);
    for (const auto* q : query_records(c)) {
      const auto result = setup.link(q->surface, q->sentence, q->span);
      *o << json{{"record_id", q->record_id}, {"entity_id", q->entity_id}, {"surface", q->surface},
                 {"result", ctx::to_json(result)}}
                .dump()
         << '\n';
    }
    o.close(out.empty() ? "stdout" : out);
    return 0;
  }
  bool run_ = false;
};

struct EvalCmd {
  std::string links, queries, report;
  LinkOptions link;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "Top-1 accuracy of a link run or of a linker over queries");
    sub->add_option("--links", links, "LinkResult JSONL from `link` to score");
    sub->add_option("--queries", queries, "Mention JSONL to link and score");
    sub->add_option("--report", report, "EvalReport JSON output");
    link.add(sub);
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    if (links.empty() == queries.empty()) throw ValidationError("eval needs exactly one of --links, --queries");
    eval::EvalReport r;
    std::string name;
    if (!links.empty()) {
      name = "links";
      r = score_links(err);
    } else {
      const auto c = load_corpus(queries, "", err);
      const LinkSetup setup(link);
      name = link.method;
      r = eval::evaluate_top1(
          [&](const corpus::MentionRecord& q) { return setup.link(q.surface, q.sentence, q.span); }, query_records(c),
          setup.unlinkable());
    }
    out_stream << eval::render_table({{name, &r}});
    for (const auto& [method, stats] : r.by_method) {
      out_stream << "  via " << method << ": " << stats.correct << "/" << stats.count << '\n';
    }
    if (!r.excluded.empty()) out_stream << "  excluded (unlinkable gold): " << r.excluded.size() << '\n';
    if (!report.empty()) {
      Output o(report, out_stream);
      *o << eval::to_json(r).dump(2) << '\n';
      o.close(report);
    }
    return 0;
  }

  // Scores precomputed results; each line needs entity_id (gold) and result.ranked.
  eval::EvalReport score_links(std::ostream& err) const {
    std::ifstream in(links);
    if (!in) throw IoError("cannot open " + links);
    std::vector<corpus::MentionRecord> records;
    std::map<std::string, ctx::LinkResult> results;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = json::parse(line);
        corpus::MentionRecord rec;
        rec.record_id = j.at("record_id").get<std::string>();
        rec.entity_id = j.at("entity_id").get<std::string>();
        ctx::LinkResult res;
        const auto& rj = j.at("result");
        res.method = ctx::parse_method(rj.value("method", "bi")).value_or(ctx::Method::bi);
        res.heuristic_outcome = rj.value("heuristic_outcome", "");
        for (const auto& item : rj.at("ranked")) {
          ctx::RankedEntity e;
          e.entity_id = item.at("entity_id").get<std::string>();
          e.score = item.value("score", 0.0);
          e.method = ctx::parse_method(item.value("method", "bi")).value_or(res.method);
          res.ranked.push_back(std::move(e));
        }
        if (!results.emplace(rec.record_id, std::move(res)).second) {
          throw ValidationError("duplicate record_id '" + rec.record_id + "'");
        }
        records.push_back(std::move(rec));
      } catch (const json::exception& e) {
        err << links << ":" << lineno << ": skipped: " << e.what() << '\n';
      }
    }
    std::vector<const corpus::MentionRecord*> qs;
    for (const auto& r : records) qs.push_back(&r);
    return eval::evaluate_top1([&](const corpus::MentionRecord& q) { return results.at(q.record_id); }, qs);
  }
  bool run_ = false;
};

struct PairsCmd {
  std::string corpus_path, out, encoder;
  std::size_t negatives = 1;
  std::uint64_t seed = 0;
  double margin = embed::kDefaultMargin;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("pairs", "Export positive/negative record pairs as JSONL");
    sub->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
    sub->add_option("--negatives", negatives, "Negatives per positive")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--out", out, "PairSample JSONL output")->required();
    sub->add_option("--encoder", encoder, "Also report the max-margin loss of the pairs under this encoder");
    sub->add_option("--margin", margin, "Margin for the loss report")->check(CLI::PositiveNumber)->capture_default_str();
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    const auto c = load_corpus(corpus_path, "", err);
    const auto sampling = embed::sample_pairs(c, negatives, seed);
    for (const auto& w : sampling.warnings) err << "warning: " << w << '\n';
    Output o(out, out_stream);
    embed::write_pairs_jsonl(sampling.pairs, *o);
    o.close(out);

    std::size_t positives = 0;
    for (const auto& p : sampling.pairs) positives += p.label == 1 ? 1 : 0;
    json summary{{"pairs", sampling.pairs.size()},
                 {"positives", positives},
                 {"negatives", sampling.pairs.size() - positives}};
    if (!encoder.empty()) {
      const auto enc = embed::make_encoder(encoder);
      std::map<std::string, embed::Vector> pooled;
      auto vec = [&](const std::string& id) -> const embed::Vector& {
        auto it = pooled.find(id);
        if (it == pooled.end()) {
          const auto* r = c.find_record(id);
          it = pooled.emplace(id, ctx::encode_mention(*enc, r->sentence, r->span)).first;
        }
        return it->second;
      };
      double total = 0.0;
      for (const auto& p : sampling.pairs) {
        total += embed::max_margin_loss(embed::cosine_distance(vec(p.left), vec(p.right)), p.label, margin);
      }
      summary["margin"] = margin;
      summary["mean_max_margin_loss"] = sampling.pairs.empty() ? 0.0 : total / static_cast<double>(sampling.pairs.size());
    }
    (out == "-" ? err : out_stream) << summary.dump() << '\n';
    return 0;
  }
  bool run_ = false;
};

struct SynonymsCmd {
  std::string corpus_path, entity, out, judgments;
  std::vector<std::string> known;
  bool maybe_relevant = false;
  LinkOptions link;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("synonyms", "Rank corpus nouns that link to an entity");
    sub->add_option("--corpus", corpus_path, "Corpus JSONL whose sentences are mined")->required();
    sub->add_option("--entity", entity, "Entity id to mine synonyms for")->required();
    sub->add_option("--known", known, "Extra names to flag as already known");
    sub->add_option("--judgments", judgments, "JSONL {noun, judgment} to score average precision");
    sub->add_flag("--maybe-relevant", maybe_relevant, "Count 'maybe' judgments as relevant");
    sub->add_option("--out", out, "SynonymSuggestion JSONL output (stdout when omitted)");
    link.add(sub);
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    const auto c = load_corpus(corpus_path, "", err);
    const auto* e = c.find_entity(entity);
    if (!e) throw ValidationError("entity '" + entity + "' is not in the corpus");
    const LinkSetup setup(link);
    std::vector<std::string> names = known;
    names.push_back(e->canonical_name);
    for (std::size_t i : c.records_of(e->id)) names.push_back(c.records()[i].surface);
    const synonyms::CapitalizationTagger tagger;
    auto suggestions = synonyms::discover_synonyms(
        *e, c, [&](std::string_view m, std::string_view s, CharSpan sp) { return setup.link(m, s, sp); }, tagger,
        names);

    if (!judgments.empty()) {
      std::ifstream in(judgments);
      if (!in) throw IoError("cannot open " + judgments);
      std::map<std::string, synonyms::Judgment> labels;
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto j = json::parse(line);
        const auto label = synonyms::parse_judgment(j.at("judgment").get<std::string>());
        if (!label) throw ValidationError("unknown judgment '" + j.at("judgment").get<std::string>() + "'");
        labels[text::to_lower(j.at("noun").get<std::string>())] = *label;
      }
      for (auto& s : suggestions) {
        if (auto it = labels.find(text::to_lower(s.noun)); it != labels.end()) s.judgment = it->second;
      }
    }
    Output o(out, out_stream);
    for (const auto& s : suggestions) *o << synonyms::to_json(s).dump() << '\n';
    o.close(out.empty() ? "stdout" : out);
    if (!judgments.empty()) {
      (out.empty() ? err : out_stream) << json{{"average_precision", synonyms::average_precision(suggestions, maybe_relevant)}}.dump()
                                       << '\n';
    }
    return 0;
  }
  bool run_ = false;
};

struct BenchCmd {
  std::string queries, ref_index, encoder, out;
  std::size_t repetitions = 3;
  std::size_t candidates = 0;
  std::size_t top_k = 10;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("bench", "Per-query latency of bi versus cross linking");
    sub->add_option("--queries", queries, "Mention JSONL")->required();
    sub->add_option("--ref-index", ref_index, "Reference index file")->required();
    sub->add_option("--encoder", encoder, "stub:<seed>[:<dim>] or http://host:port")->envname("LINKFORGE_ENCODER");
    sub->add_option("--repetitions", repetitions, "Timed passes")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--candidates", candidates, "Cross candidates per query; 0 scores every reference")
        ->capture_default_str();
    sub->add_option("--out", out, "Report JSON output (stdout when omitted)");
    sub->final_callback([this] { run_ = true; });
  }
  int run(std::ostream& out_stream, std::ostream& err) {
    if (encoder.empty()) throw ValidationError("bench needs --encoder or LINKFORGE_ENCODER");
    const auto c = load_corpus(queries, "", err);
    const auto index = ctx::ReferenceIndex::load(std::filesystem::path(ref_index));
    const auto enc = embed::make_encoder(encoder);
    const auto head = embed::CrossHead::zeros(enc->info().dimension);
    auto refs = ctx::all_candidates(index);
    if (candidates > 0 && candidates < refs.size()) refs.resize(candidates);
    const auto cmp = eval::time_linkers(
        [&](const corpus::MentionRecord& q) { return ctx::link_bi(q.sentence, q.span, index, *enc, top_k); },
        [&](const corpus::MentionRecord& q) { return ctx::link_cross(q.sentence, q.span, refs, *enc, head, top_k); },
        query_records(c), repetitions);
    auto j = eval::to_json(cmp);
    j["cross_candidates"] = refs.size();
    j["references"] = index.entries().size();
    Output o(out, out_stream);
    *o << j.dump(2) << '\n';
    o.close(out.empty() ? "stdout" : out);
    return 0;
  }
  bool run_ = false;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"linkforge: link entity mentions with a normalization cascade and contextual embeddings"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.require_subcommand(1);

  IngestCmd ingest;
  SplitCmd split;
  IndexFuzzyCmd index_fuzzy;
  IndexRefCmd index_ref;
  LinkCmd link;
  EvalCmd evaluate;
  PairsCmd pairs;
  SynonymsCmd synonyms_cmd;
  BenchCmd bench;
  ingest.add(app);
  split.add(app);
  index_fuzzy.add(app);
  index_ref.add(app);
  link.add(app);
  evaluate.add(app);
  pairs.add(app);
  synonyms_cmd.add(app);
  bench.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "linkforge\n";
    return 0;
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (ingest.run_) return ingest.run(out, err);
    if (split.run_) return split.run(out, err);
    if (index_fuzzy.run_) return index_fuzzy.run(out, err);
    if (index_ref.run_) return index_ref.run(out, err);
    if (link.run_) return link.run(out, err);
    if (evaluate.run_) return evaluate.run(out, err);
    if (pairs.run_) return pairs.run(out, err);
    if (synonyms_cmd.run_) return synonyms_cmd.run(out, err);
    if (bench.run_) return bench.run(out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const EncoderError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const hybrid::HybridFallbackError& e) {
    err << "error: " << e.what() << "; heuristic outcome " << fuzzy::to_string(e.heuristic().kind);
    for (const auto& id : e.heuristic().entity_ids) err << ' ' << id;
    err << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 1;
}

}  // namespace linkforge::cli
