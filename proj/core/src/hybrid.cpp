#include "linkforge/hybrid.hpp"

namespace linkforge::hybrid {

ctx::LinkResult heuristic_result(const fuzzy::HeuristicOutcome& outcome, std::size_t top_k) {
  ctx::LinkResult result;
  result.method = ctx::Method::heuristic;
  result.heuristic_outcome = std::string(fuzzy::to_string(outcome.kind));
  for (const auto& m : outcome.matches) {
    if (result.ranked.size() >= top_k) break;
    result.ranked.push_back({m.entity_id, static_cast<double>(m.distance), {}, ctx::Method::heuristic, m.stage});
  }
  return result;
}

ctx::LinkResult link_hybrid(std::string_view mention, std::string_view sentence, CharSpan span,
                            const fuzzy::NameIndex& names, const normalize::NormalizerConfig& config,
                            const ctx::ContextualLinker& contextual, const HybridConfig& hybrid) {
  if (hybrid.top_k == 0) throw ValidationError("top_k must be at least 1");
  auto outcome = fuzzy::heuristic_link(mention, names, config, hybrid.max_edit);
  if (outcome.kind == fuzzy::HeuristicOutcome::Kind::unique) return heuristic_result(outcome, hybrid.top_k);

  ctx::ContextualLinker linker = contextual;
  linker.method = hybrid.contextual_method;
  const bool restrict = hybrid.restrict_to_ties && outcome.kind == fuzzy::HeuristicOutcome::Kind::tie;
  try {
    auto result = linker.link(sentence, span, hybrid.top_k, restrict ? &outcome.entity_ids : nullptr);
    result.heuristic_outcome = std::string(fuzzy::to_string(outcome.kind));
    return result;
  } catch (const Error& e) {
    throw HybridFallbackError(std::string("contextual fallback failed: ") + e.what(), std::move(outcome));
  }
}

}  // namespace linkforge::hybrid
