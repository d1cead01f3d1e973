#pragma once

#include <string>
#include <vector>

#include "linkforge/ctxlink.hpp"
#include "linkforge/error.hpp"
#include "linkforge/heuristic.hpp"

namespace linkforge::hybrid {

struct HybridConfig {
  ctx::Method contextual_method = ctx::Method::bi;
  /// Heuristic radius, clamped to the name index radius.
  std::size_t max_edit = 2;
  std::size_t top_k = 10;
  /// Restrict the contextual fallback to the tied entities. Off by default:
  /// a tie or a miss hands the query to the contextual linker unconstrained.
  bool restrict_to_ties = false;
};

/// Raised when the contextual fallback fails; carries what the heuristic found.
class HybridFallbackError : public Error {
 public:
  HybridFallbackError(const std::string& what, fuzzy::HeuristicOutcome heuristic)
      : Error(what), heuristic_(std::move(heuristic)) {}

  [[nodiscard]] const fuzzy::HeuristicOutcome& heuristic() const noexcept { return heuristic_; }

 private:
  fuzzy::HeuristicOutcome heuristic_;
};

/// Heuristic outcome as a LinkResult (matches within the radius, best first).
ctx::LinkResult heuristic_result(const fuzzy::HeuristicOutcome& outcome, std::size_t top_k);

/// Heuristic answer when it is unique, the contextual linker's answer otherwise.
ctx::LinkResult link_hybrid(std::string_view mention, std::string_view sentence, CharSpan span,
                            const fuzzy::NameIndex& names, const normalize::NormalizerConfig& config,
                            const ctx::ContextualLinker& contextual, const HybridConfig& hybrid = {});

}  // namespace linkforge::hybrid
