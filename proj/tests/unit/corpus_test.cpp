#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "linkforge/corpus.hpp"
#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::corpus {
namespace {

using testing::make_record;

IngestResult ingest_text(const std::string& mentions) {
  std::istringstream in(mentions);
  return ingest_jsonl(in);
}

Corpus toy_corpus(std::size_t entities, std::size_t records_per_entity) {
  std::vector<Entity> es;
  std::vector<MentionRecord> rs;
  for (std::size_t e = 0; e < entities; ++e) {
    const std::string id = "E" + std::to_string(e);
    es.push_back({id, "Name " + id});
    for (std::size_t r = 0; r < records_per_entity; ++r) {
      rs.push_back(make_record(id + "-" + std::to_string(r), id, "Name " + id,
                               "Satz " + std::to_string(r) + " über Name " + id));
    }
  }
  return Corpus(std::move(es), std::move(rs));
}

TEST(Ingest, SpanArrayExample) {
  const auto result = ingest_jsonl(testing::data_dir() / "oelaustritt.jsonl");
  EXPECT_TRUE(result.report.rejected.empty());
  ASSERT_EQ(result.corpus.records().size(), 1u);
  ASSERT_EQ(result.corpus.entities().size(), 1u);
  const auto& r = result.corpus.records().front();
  EXPECT_EQ(r.entity_id, "E1");
  EXPECT_EQ(result.corpus.entities().front().canonical_name, "Leck");
  EXPECT_EQ(r.span, (CharSpan{26, 36}));
  EXPECT_EQ(text::substr(r.sentence, r.span), "Ölaustritt");
}

TEST(Ingest, EmptyInput) {
  const auto result = ingest_text("");
  EXPECT_TRUE(result.corpus.entities().empty());
  EXPECT_TRUE(result.corpus.records().empty());
}

TEST(Ingest, RejectsSurfaceMismatchAndKeepsGoing) {
  const auto result = ingest_text(
      R"({"entity_id":"E1","canonical_name":"Leck","surface":"Öl","sentence":"Der Ölaustritt","span_start":0,"span_end":3})"
      "\n"
      R"({"entity_id":"E1","canonical_name":"Leck","surface":"Ölaustritt","sentence":"Der Ölaustritt","span_start":4,"span_end":14})"
      "\n");
  ASSERT_EQ(result.report.rejected.size(), 1u);
  EXPECT_EQ(result.report.rejected[0].line, 1u);
  EXPECT_NE(result.report.rejected[0].reason.find("surface"), std::string::npos);
  EXPECT_EQ(result.corpus.records().size(), 1u);
}

TEST(Ingest, ReportsMalformedLinesWithLineNumbers) {
  const auto result = ingest_text(
      "{not json\n"
      "\n"
      "[1,2]\n"
      R"({"entity_id":"E1","canonical_name":"Leck","surface":"Leck","sentence":"Ein Leck","span_start":9,"span_end":13})"
      "\n"
      R"({"entity_id":"E1","canonical_name":"Leck","surface":"Leck","sentence":"Ein Leck","span_start":4,"span_end":8,"role":"boss"})"
      "\n"
      R"({"entity_id":"E1","canonical_name":"Leck","sentence":"Ein Leck","span_start":4,"span_end":8})"
      "\n");
  std::vector<std::size_t> lines;
  for (const auto& r : result.report.rejected) lines.push_back(r.line);
  EXPECT_EQ(lines, (std::vector<std::size_t>{1, 3, 4, 5, 6}));
  EXPECT_TRUE(result.corpus.records().empty());
}

TEST(Ingest, NormalizesToNfcBeforeCheckingSpans) {
  // Decomposed "Ö" in both fields: the span counts composed code points.
  const auto result = ingest_text(
      "{\"entity_id\":\"E1\",\"canonical_name\":\"Leck\",\"surface\":\"O\xCC\x88l\","
      "\"sentence\":\"Das O\xCC\x88l tropft\",\"span_start\":4,\"span_end\":6}\n");
  ASSERT_TRUE(result.report.rejected.empty());
  EXPECT_EQ(result.corpus.records().front().surface, "Öl");
}

TEST(Ingest, DuplicateMentionsCounted) {
  const std::string line =
      R"({"entity_id":"E1","canonical_name":"Leck","surface":"Leck","sentence":"Ein Leck","span_start":4,"span_end":8})";
  const auto result = ingest_text(line + "\n" + line + "\n");
  EXPECT_EQ(result.report.duplicates, 1u);
  EXPECT_EQ(result.corpus.records().size(), 1u);
}

TEST(Ingest, ConflictingCanonicalNamesRejected) {
  const auto result = ingest_text(
      R"({"entity_id":"E1","canonical_name":"Leck","surface":"Leck","sentence":"Ein Leck","span_start":4,"span_end":8})"
      "\n"
      R"({"entity_id":"E1","canonical_name":"Loch","surface":"Loch","sentence":"Ein Loch","span_start":4,"span_end":8})"
      "\n");
  EXPECT_EQ(result.report.rejected.size(), 1u);
  EXPECT_EQ(result.corpus.records().size(), 1u);
}

TEST(Ingest, FazFixtureWithEntitiesFile) {
  const auto result = ingest_jsonl(testing::data_dir() / "faz_mentions.jsonl", testing::data_dir() / "faz_entities.jsonl");
  EXPECT_TRUE(result.report.rejected.empty());
  EXPECT_EQ(result.corpus.entities().size(), 6u);
  EXPECT_TRUE(result.corpus.has_assigned_roles());
  const auto* faz = result.corpus.find_record("faz-q1");
  ASSERT_NE(faz, nullptr);
  EXPECT_EQ(faz->surface, "FAZ");
  EXPECT_EQ(faz->role, Role::query);
}

TEST(Ingest, MissingFileIsIoError) {
  EXPECT_THROW((void)ingest_jsonl(std::filesystem::path("/nonexistent/mentions.jsonl")), IoError);
}

TEST(Corpus, RejectsBrokenInvariants) {
  EXPECT_THROW(Corpus({{"E1", "A"}, {"E1", "B"}}, {}), ValidationError);
  EXPECT_THROW(Corpus({{"E1", ""}}, {}), ValidationError);
  EXPECT_THROW(Corpus({{"E1", "A"}}, {make_record("r", "E2", "A", "A")}), ValidationError);
  EXPECT_THROW(Corpus({{"E1", "A"}}, {make_record("r", "E1", "A", "A"), make_record("r", "E1", "A", "A b")}),
               ValidationError);
}

TEST(Corpus, JsonlRoundTrip) {
  const auto original = ingest_jsonl(testing::data_dir() / "faz_mentions.jsonl").corpus;
  std::stringstream buf;
  write_jsonl(original, buf);
  const auto again = ingest_jsonl(buf);
  EXPECT_TRUE(again.report.rejected.empty());
  EXPECT_TRUE(again.corpus.equivalent(original));
  EXPECT_EQ(again.corpus.records(), original.records());
}

TEST(Corpus, UnlinkableEntitiesHaveNoReferences) {
  std::vector<MentionRecord> rs = {make_record("a", "A", "Alpha", "Alpha hier", Role::reference),
                                   make_record("b", "B", "Beta", "Beta dort", Role::query)};
  const Corpus c({{"A", "Alpha"}, {"B", "Beta"}, {"C", "Gamma"}}, rs);
  EXPECT_EQ(c.unlinkable_entities(), (std::vector<std::string>{"B", "C"}));
  EXPECT_EQ(c.records_with_role(Role::query).size(), 1u);
}

TEST(SplitEntities, TenEntities) {
  const auto c = toy_corpus(10, 2);
  const auto s = split_entities(c, {0.8, 0.1, 0.1}, 7);
  EXPECT_EQ(s.train.entities().size(), 8u);
  EXPECT_EQ(s.validation.entities().size(), 1u);
  EXPECT_EQ(s.test.entities().size(), 1u);
  EXPECT_EQ(s.train.split_tag(), SplitTag::train);
  const auto again = split_entities(c, {0.8, 0.1, 0.1}, 7);
  EXPECT_EQ(again.train.entities(), s.train.entities());
  EXPECT_EQ(again.test.entities(), s.test.entities());
}

TEST(SplitEntities, Errors) {
  EXPECT_THROW((void)split_entities(toy_corpus(10, 1), {1.0, 0.0, 0.0}, 7), ValidationError);
  EXPECT_THROW((void)split_entities(toy_corpus(10, 1), {0.5, 0.2, 0.2}, 7), ValidationError);
  try {
    (void)split_entities(toy_corpus(2, 1), {0.4, 0.3, 0.3}, 7);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("short by 1"), std::string::npos);
  }
}

TEST(SplitEntities, PartitionPropertyOverRandomCorpora) {
  rng::SplitMix64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = toy_corpus(3 + rng::uniform_below(gen, 40), 1 + rng::uniform_below(gen, 3));
    const double a = 0.1 + 0.6 * rng::uniform01(gen);
    const double b = (1.0 - a) * (0.1 + 0.8 * rng::uniform01(gen));
    const auto s = split_entities(c, {a, b, 1.0 - a - b}, gen());
    std::multiset<std::string> ids;
    std::size_t records = 0;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      EXPECT_FALSE(part->entities().empty());
      for (const auto& e : part->entities()) ids.insert(e.id);
      records += part->records().size();
      for (const auto& r : part->records()) EXPECT_NE(part->find_entity(r.entity_id), nullptr);
    }
    std::multiset<std::string> all;
    for (const auto& e : c.entities()) all.insert(e.id);
    EXPECT_EQ(ids, all);  // disjoint and covering
    EXPECT_EQ(records, c.records().size());
  }
}

TEST(SplitReferenceQuery, Fractions) {
  const auto c = toy_corpus(1, 10);
  for (const auto& [fraction, refs] : {std::pair{0.5, 5u}, std::pair{0.3, 3u}}) {
    const auto s = split_reference_query(c, fraction, 1);
    EXPECT_EQ(s.corpus.records_with_role(Role::reference).size(), refs);
    EXPECT_EQ(s.corpus.records_with_role(Role::query).size(), 10u - refs);
    EXPECT_TRUE(s.warnings.empty());
  }
}

TEST(SplitReferenceQuery, SingleRecordWarns) {
  const auto s = split_reference_query(toy_corpus(1, 1), 0.5, 1);
  EXPECT_EQ(s.corpus.records_with_role(Role::reference).size(), 1u);
  EXPECT_TRUE(s.corpus.records_with_role(Role::query).empty());
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(SplitReferenceQuery, RefusesToReassignWithoutForce) {
  const auto once = split_reference_query(toy_corpus(2, 4), 0.5, 1).corpus;
  EXPECT_THROW((void)split_reference_query(once, 0.5, 2), ValidationError);
  EXPECT_NO_THROW((void)split_reference_query(once, 0.5, 2, true));
  EXPECT_THROW((void)split_reference_query(toy_corpus(2, 4), 1.0, 1), ValidationError);
}

TEST(Roles, ParseAndPrint) {
  EXPECT_EQ(parse_role("reference"), Role::reference);
  EXPECT_EQ(parse_role("query"), Role::query);
  EXPECT_FALSE(parse_role("other").has_value());
  EXPECT_EQ(to_string(Role::query), "query");
}

}  // namespace
}  // namespace linkforge::corpus
