#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "linkforge/corpus.hpp"
#include "linkforge/ctxlink.hpp"

namespace linkforge::eval {

/// Any linking procedure applied to one query record.
using Linker = std::function<ctx::LinkResult(const corpus::MentionRecord&)>;

struct LatencySummary {
  std::size_t samples = 0;
  double mean = 0.0;  // seconds
  double median = 0.0;
  double p90 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

LatencySummary summarize(std::vector<double> seconds);

struct QueryOutcome {
  std::string record_id;
  std::string gold;
  std::optional<std::string> predicted;
  bool correct = false;
  ctx::Method method = ctx::Method::bi;
  std::string heuristic_outcome;
  double seconds = 0.0;
};

struct PathStats {
  std::size_t count = 0;
  std::size_t correct = 0;

  [[nodiscard]] double accuracy() const { return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0; }
};

struct EvalReport {
  std::size_t queries = 0;  // evaluated, excluding unlinkable gold entities
  std::size_t correct = 0;
  double top1_accuracy = 0.0;
  /// Keyed by the method that produced the rank-1 answer; counts sum to `queries`.
  std::map<std::string, PathStats> by_method;
  LatencySummary latency;
  std::vector<QueryOutcome> outcomes;  // sorted by record id
  std::vector<std::string> excluded;   // record ids whose gold entity is unlinkable
};

/// Fraction of queries whose rank-1 entity is the gold entity. Queries whose
/// gold entity is in `unlinkable` are excluded and listed separately.
EvalReport evaluate_top1(const Linker& linker, const std::vector<const corpus::MentionRecord*>& queries,
                         const std::vector<std::string>& unlinkable = {});

nlohmann::json to_json(const EvalReport& report, bool include_outcomes = true);
nlohmann::json to_json(const LatencySummary& latency);

/// Plain-text accuracy table, one row per named report.
std::string render_table(const std::vector<std::pair<std::string, const EvalReport*>>& rows);

struct LatencyComparison {
  LatencySummary bi;
  LatencySummary cross;
  /// cross median over bi median.
  double median_ratio = 0.0;
  double mean_ratio = 0.0;
};

/// Per-query wall time of two linkers over the same queries, query phase only.
/// One untimed warm-up pass precedes `repetitions` timed passes.
LatencyComparison time_linkers(const Linker& bi, const Linker& cross,
                               const std::vector<const corpus::MentionRecord*>& queries, std::size_t repetitions);

nlohmann::json to_json(const LatencyComparison& cmp);

}  // namespace linkforge::eval
