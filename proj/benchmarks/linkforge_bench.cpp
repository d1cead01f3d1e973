#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "linkforge/ctxlink.hpp"
#include "linkforge/encoder.hpp"
#include "linkforge/fuzzy.hpp"
#include "linkforge/heuristic.hpp"
#include "linkforge/hnsw.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/unicode.hpp"

namespace {

using namespace linkforge;

std::string random_word(rng::SplitMix64& gen, std::size_t len) {
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('a' + rng::uniform_below(gen, 26));
  return w;
}

std::vector<float> random_vector(rng::SplitMix64& gen, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(rng::normal(gen));
  return v;
}

void BM_DlDistance(benchmark::State& state) {
  rng::SplitMix64 gen(1);
  const auto a = text::to_u32(random_word(gen, static_cast<std::size_t>(state.range(0))));
  const auto b = text::to_u32(random_word(gen, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(fuzzy::dl_distance(a, b));
}
BENCHMARK(BM_DlDistance)->Arg(8)->Arg(16)->Arg(32);

void BM_DeletionIndexLookup(benchmark::State& state) {
  rng::SplitMix64 gen(2);
  fuzzy::DeletionIndex index(2);
  for (std::int64_t i = 0; i < state.range(0); ++i) index.add(text::to_u32(random_word(gen, 10)));
  std::vector<std::u32string> queries;
  for (int i = 0; i < 64; ++i) queries.push_back(text::to_u32(random_word(gen, 10)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(index.lookup(queries[i++ % queries.size()], 2));
}
BENCHMARK(BM_DeletionIndexLookup)->Arg(1000)->Arg(10000);

void BM_HeuristicLink(benchmark::State& state) {
  rng::SplitMix64 gen(3);
  std::vector<corpus::Entity> entities;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    entities.push_back({"E" + std::to_string(i), random_word(gen, 6) + " " + random_word(gen, 7)});
  }
  const auto config = normalize::NormalizerConfig::defaults();
  const auto index = fuzzy::NameIndex::build(entities, config);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzzy::heuristic_link(entities[i++ % entities.size()].canonical_name, index, config));
  }
}
BENCHMARK(BM_HeuristicLink)->Arg(100)->Arg(1000);

void BM_HnswSearch(benchmark::State& state) {
  constexpr std::size_t dim = 128;
  rng::SplitMix64 gen(4);
  ann::Hnsw graph(dim, {});
  for (std::int64_t i = 0; i < state.range(0); ++i) graph.add(random_vector(gen, dim));
  std::vector<std::vector<float>> queries;
  for (int i = 0; i < 32; ++i) queries.push_back(random_vector(gen, dim));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(graph.search(queries[i++ % queries.size()], 10));
}
BENCHMARK(BM_HnswSearch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

ctx::ReferenceIndex reference_index(std::size_t n, const embed::EncoderPort& encoder) {
  rng::SplitMix64 gen(5);
  std::vector<ctx::ReferenceEntry> entries;
  std::vector<std::string> entities;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string surface = random_word(gen, 8);
    const std::string sentence = "Heute meldet " + surface + " einen Fehler";
    const CharSpan span{13, 13 + surface.size()};
    const std::string id = "E" + std::to_string(i);
    entries.push_back({"r" + std::to_string(i), id, sentence, span, ctx::encode_mention(encoder, sentence, span)});
    entities.push_back(id);
  }
  return ctx::ReferenceIndex::from_entries(std::move(entries), std::move(entities), ctx::IndexMode::approximate);
}

void BM_LinkBi(benchmark::State& state) {
  const embed::StubEncoder encoder(7);
  const auto index = reference_index(static_cast<std::size_t>(state.range(0)), encoder);
  const std::string sentence = "Gestern fiel Pumpenkopf aus";
  const CharSpan span{13, 23};
  for (auto _ : state) benchmark::DoNotOptimize(ctx::link_bi(sentence, span, index, encoder, 10));
}
BENCHMARK(BM_LinkBi)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_LinkCross(benchmark::State& state) {
  const embed::StubEncoder encoder(7);
  const auto index = reference_index(static_cast<std::size_t>(state.range(0)), encoder);
  std::vector<const ctx::ReferenceEntry*> candidates;
  for (const auto& e : index.entries()) candidates.push_back(&e);
  const auto head = embed::CrossHead::zeros(encoder.info().dimension);
  const std::string sentence = "Gestern fiel Pumpenkopf aus";
  const CharSpan span{13, 23};
  for (auto _ : state) benchmark::DoNotOptimize(ctx::link_cross(sentence, span, candidates, encoder, head, 10));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LinkCross)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
