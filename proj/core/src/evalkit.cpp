#include "linkforge/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "linkforge/error.hpp"

namespace linkforge::eval {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

LatencySummary summarize(std::vector<double> seconds) {
  LatencySummary s;
  s.samples = seconds.size();
  if (seconds.empty()) return s;
  std::sort(seconds.begin(), seconds.end());
  s.mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(seconds.size());
  s.median = quantile(seconds, 0.5);
  s.p90 = quantile(seconds, 0.9);
  s.min = seconds.front();
  s.max = seconds.back();
  return s;
}

EvalReport evaluate_top1(const Linker& linker, const std::vector<const corpus::MentionRecord*>& queries,
                         const std::vector<std::string>& unlinkable) {
  const std::set<std::string> skip(unlinkable.begin(), unlinkable.end());
  EvalReport report;
  std::vector<double> times;
  for (const auto* q : queries) {
    if (skip.contains(q->entity_id)) {
      report.excluded.push_back(q->record_id);
      continue;
    }
    const auto start = Clock::now();
    const auto result = linker(*q);
    const double t = elapsed(start);

    QueryOutcome o;
    o.record_id = q->record_id;
    o.gold = q->entity_id;
    o.method = result.method;
    o.heuristic_outcome = result.heuristic_outcome;
    o.seconds = t;
    if (const auto* top = result.top()) {
      o.predicted = top->entity_id;
      o.method = top->method;
      o.correct = top->entity_id == q->entity_id;
    }
    auto& path = report.by_method[std::string(ctx::to_string(o.method))];
    ++path.count;
    if (o.correct) {
      ++path.correct;
      ++report.correct;
    }
    times.push_back(t);
    report.outcomes.push_back(std::move(o));
  }
  report.queries = report.outcomes.size();
  report.top1_accuracy =
      report.queries ? static_cast<double>(report.correct) / static_cast<double>(report.queries) : 0.0;
  report.latency = summarize(std::move(times));
  std::sort(report.outcomes.begin(), report.outcomes.end(),
            [](const QueryOutcome& a, const QueryOutcome& b) { return a.record_id < b.record_id; });
  std::sort(report.excluded.begin(), report.excluded.end());
  return report;
}

nlohmann::json to_json(const LatencySummary& latency) {
  return {{"samples", latency.samples}, {"mean_s", latency.mean}, {"median_s", latency.median},
          {"p90_s", latency.p90},       {"min_s", latency.min},   {"max_s", latency.max}};
}

nlohmann::json to_json(const EvalReport& report, bool include_outcomes) {
  nlohmann::json j{{"queries", report.queries},
                   {"correct", report.correct},
                   {"top1_accuracy", report.top1_accuracy},
                   {"excluded", report.excluded},
                   {"latency", to_json(report.latency)}};
  auto& paths = j["by_method"] = nlohmann::json::object();
  for (const auto& [method, stats] : report.by_method) {
    paths[method] = {{"count", stats.count}, {"correct", stats.correct}, {"accuracy", stats.accuracy()}};
  }
  if (include_outcomes) {
    auto& rows = j["outcomes"] = nlohmann::json::array();
    for (const auto& o : report.outcomes) {
      nlohmann::json row{{"record_id", o.record_id},
                         {"gold", o.gold},
                         {"predicted", o.predicted ? nlohmann::json(*o.predicted) : nlohmann::json(nullptr)},
                         {"correct", o.correct},
                         {"method", ctx::to_string(o.method)}};
      if (!o.heuristic_outcome.empty()) row["heuristic_outcome"] = o.heuristic_outcome;
      rows.push_back(std::move(row));
    }
  }
  return j;
}

std::string render_table(const std::vector<std::pair<std::string, const EvalReport*>>& rows) {
  std::size_t width = std::string_view("Method").size();
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %9s  %8s  %8s\n", static_cast<int>(width), "Method", "Top1 [%]", "Queries",
                "Correct");
  out += line;
  out += std::string(width + 33, '-') + '\n';
  for (const auto& [name, report] : rows) {
    std::snprintf(line, sizeof line, "%-*s  %9.2f  %8zu  %8zu\n", static_cast<int>(width), name.c_str(),
                  100.0 * report->top1_accuracy, report->queries, report->correct);
    out += line;
  }
  return out;
}

LatencyComparison time_linkers(const Linker& bi, const Linker& cross,
                               const std::vector<const corpus::MentionRecord*>& queries, std::size_t repetitions) {
  if (repetitions == 0) throw ValidationError("repetitions must be at least 1");
  auto run = [&](const Linker& linker) {
    for (const auto* q : queries) (void)linker(*q);
    std::vector<double> samples;
    samples.reserve(queries.size() * repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
      for (const auto* q : queries) {
        const auto start = Clock::now();
        (void)linker(*q);
        samples.push_back(elapsed(start));
      }
    }
    return summarize(std::move(samples));
  };
  LatencyComparison cmp;
  cmp.bi = run(bi);
  cmp.cross = run(cross);
  cmp.median_ratio = cmp.bi.median > 0 ? cmp.cross.median / cmp.bi.median : 0.0;
  cmp.mean_ratio = cmp.bi.mean > 0 ? cmp.cross.mean / cmp.bi.mean : 0.0;
  return cmp;
}

nlohmann::json to_json(const LatencyComparison& cmp) {
  return {{"bi", to_json(cmp.bi)},
          {"cross", to_json(cmp.cross)},
          {"median_ratio", cmp.median_ratio},
          {"mean_ratio", cmp.mean_ratio}};
}

}  // namespace linkforge::eval
