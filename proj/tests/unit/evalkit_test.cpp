#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "linkforge/evalkit.hpp"
#include "linkforge/hybrid.hpp"
#include "linkforge/rng.hpp"

namespace linkforge::eval {
namespace {

using corpus::Role;

ctx::LinkResult answer(const std::string& entity, ctx::Method method = ctx::Method::bi) {
  ctx::LinkResult r;
  r.method = method;
  r.ranked.push_back({entity, 0.0, {}, method, std::nullopt});
  return r;
}

std::vector<const corpus::MentionRecord*> queries_of(const corpus::Corpus& c) { return c.records_with_role(Role::query); }

TEST(EvaluateTop1, OracleAndWrongLinkers) {
  const auto fx = testing::hybrid_fixture(10, 0.3, 1);
  const auto qs = queries_of(fx.corpus);
  const auto oracle = evaluate_top1([](const corpus::MentionRecord& q) { return answer(q.entity_id); }, qs);
  EXPECT_DOUBLE_EQ(oracle.top1_accuracy, 1.0);
  EXPECT_EQ(oracle.queries, qs.size());
  const auto wrong = evaluate_top1([](const corpus::MentionRecord&) { return answer("nobody"); }, qs);
  EXPECT_DOUBLE_EQ(wrong.top1_accuracy, 0.0);
  const auto silent = evaluate_top1([](const corpus::MentionRecord&) { return ctx::LinkResult{}; }, qs);
  EXPECT_DOUBLE_EQ(silent.top1_accuracy, 0.0);
  EXPECT_FALSE(silent.outcomes.front().predicted.has_value());
}

TEST(EvaluateTop1, UnlinkableGoldExcluded) {
  const auto fx = testing::hybrid_fixture(10, 0.3, 2);
  const auto qs = queries_of(fx.corpus);
  const auto r = evaluate_top1([](const corpus::MentionRecord& q) { return answer(q.entity_id); }, qs, {"E000", "E001"});
  EXPECT_EQ(r.excluded.size(), 8u);
  EXPECT_EQ(r.queries, qs.size() - 8);
  EXPECT_DOUBLE_EQ(r.top1_accuracy, 1.0);
}

TEST(EvaluateTop1, PermutationInvariant) {
  const auto fx = testing::hybrid_fixture(12, 0.3, 3);
  auto qs = queries_of(fx.corpus);
  // Deterministic linker that is right on some queries and wrong on others.
  const Linker linker = [](const corpus::MentionRecord& q) {
    return rng::fnv1a64(q.record_id) % 3 == 0 ? answer("nobody", ctx::Method::cross) : answer(q.entity_id);
  };
  const auto base = evaluate_top1(linker, qs);
  rng::SplitMix64 gen(5);
  for (int i = 0; i < 10; ++i) {
    rng::shuffle(qs.begin(), qs.end(), gen);
    const auto r = evaluate_top1(linker, qs);
    EXPECT_EQ(r.correct, base.correct);
    EXPECT_EQ(r.by_method.size(), base.by_method.size());
    ASSERT_EQ(r.outcomes.size(), base.outcomes.size());
    for (std::size_t k = 0; k < r.outcomes.size(); ++k) {
      EXPECT_EQ(r.outcomes[k].record_id, base.outcomes[k].record_id);
      EXPECT_EQ(r.outcomes[k].correct, base.outcomes[k].correct);
    }
  }
}

TEST(EvaluateTop1, HybridAccuracyEqualsRecount) {
  const auto fx = testing::hybrid_fixture(50, 0.3, 17);
  const auto config = normalize::NormalizerConfig::defaults();
  const auto names = fuzzy::NameIndex::build(fx.corpus.entities(), config);
  const embed::StubEncoder enc(7);
  const auto index = ctx::ReferenceIndex::build(fx.corpus, enc, ctx::IndexMode::exact);
  const ctx::ContextualLinker contextual{&index, &enc, ctx::Method::bi, nullptr, 64, false};
  const Linker linker = [&](const corpus::MentionRecord& q) {
    return hybrid::link_hybrid(q.surface, q.sentence, q.span, names, config, contextual);
  };
  const auto qs = queries_of(fx.corpus);
  const auto report = evaluate_top1(linker, qs);

  std::size_t correct = 0;
  std::map<std::string, std::size_t> per_method;
  for (const auto* q : qs) {
    const auto r = linker(*q);
    correct += r.top() && r.top()->entity_id == q->entity_id;
    ++per_method[std::string(ctx::to_string(r.top()->method))];
  }
  EXPECT_EQ(report.correct, correct);
  EXPECT_DOUBLE_EQ(report.top1_accuracy, static_cast<double>(correct) / static_cast<double>(qs.size()));
  std::size_t total = 0;
  for (const auto& [method, stats] : report.by_method) {
    EXPECT_EQ(stats.count, per_method[method]);
    total += stats.count;
  }
  EXPECT_EQ(total, report.queries);
}

TEST(Summarize, Quantiles) {
  const auto s = summarize({4, 1, 3, 2, 5});
  EXPECT_EQ(s.samples, 5u);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.p90, 4.6);
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 5.0);
  EXPECT_EQ(summarize({}).samples, 0u);
}

TEST(TimeLinkers, SingleQuerySingleRepetition) {
  const auto fx = testing::hybrid_fixture(3, 0.3, 4);
  const auto qs = queries_of(fx.corpus);
  const std::vector<const corpus::MentionRecord*> one{qs.front()};
  const Linker fast = [](const corpus::MentionRecord& q) { return answer(q.entity_id); };
  const auto cmp = time_linkers(fast, fast, one, 1);
  EXPECT_EQ(cmp.bi.samples, 1u);
  EXPECT_EQ(cmp.cross.samples, 1u);
  EXPECT_THROW((void)time_linkers(fast, fast, one, 0), ValidationError);
}

TEST(TimeLinkers, SelfComparisonNearOne) {
  const auto fx = testing::hybrid_fixture(5, 0.3, 5);
  const auto qs = queries_of(fx.corpus);
  const Linker sleepy = [](const corpus::MentionRecord& q) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    return answer(q.entity_id);
  };
  const auto cmp = time_linkers(sleepy, sleepy, qs, 1);
  EXPECT_GT(cmp.median_ratio, 0.5);
  EXPECT_LT(cmp.median_ratio, 2.0);
}

TEST(RenderTable, FormatsPercentages) {
  EvalReport a;
  a.queries = 4;
  a.correct = 4;
  a.top1_accuracy = 1.0;
  EvalReport b;
  b.queries = 3;
  b.correct = 2;
  b.top1_accuracy = 2.0 / 3.0;
  const auto table = render_table({{"hybrid", &a}, {"heuristic", &b}});
  EXPECT_NE(table.find("100.00"), std::string::npos);
  EXPECT_NE(table.find("66.67"), std::string::npos);
  EXPECT_EQ(table.substr(0, 6), "Method");
}

TEST(EvalJson, CarriesBreakdown) {
  const auto fx = testing::hybrid_fixture(3, 0.3, 6);
  const auto r = evaluate_top1([](const corpus::MentionRecord& q) { return answer(q.entity_id); }, queries_of(fx.corpus));
  const auto j = to_json(r);
  EXPECT_EQ(j.at("queries"), 12);
  EXPECT_EQ(j.at("by_method").at("bi").at("count"), 12);
  EXPECT_EQ(j.at("outcomes").size(), 12u);
  EXPECT_FALSE(to_json(r, false).contains("outcomes"));
}

}  // namespace
}  // namespace linkforge::eval
