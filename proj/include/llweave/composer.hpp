#pragma once

// Backward proof search over service hypotheses.

#include <atomic>
#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "llweave/error.hpp"
#include "llweave/kernel.hpp"
#include "llweave/services.hpp"

namespace llweave::composer {

struct SearchLimits {
  // Bound on non-invertible steps (⊕, ⊗, Cut, leaves) along any branch.
  int max_depth = 12;
  // Bound on cuts along any branch.
  int max_cuts = 6;
  std::chrono::milliseconds timeout{30000};
  // Checked once per node expansion.
  const std::atomic<bool>* cancel = nullptr;
};

struct SearchStats {
  std::size_t nodes_expanded = 0;
  int cuts_introduced = 0;
  std::chrono::duration<double> elapsed{0};
};

// Not provable within the limits, or out of time. Carries the deepest
// subgoal the search failed on.
class SearchError : public Error {
 public:
  SearchError(ErrorCode code, const std::string& what, std::string deepest)
      : Error(code, what), deepest_(std::move(deepest)) {}
  const std::string& deepest_subgoal() const { return deepest_; }

 private:
  std::string deepest_;
};

struct CompositionResult {
  kernel::Theorem theorem;
  std::vector<std::string> services_used;
  SearchStats stats;
  // Goal channel -> theorem channel; empty because replay reuses the goal's
  // own channels.
  std::vector<std::pair<ChannelName, ChannelName>> renaming;
};

kernel::Theorem prove(const cll::AnnotatedSequent& goal, const std::vector<kernel::Theorem>& axioms,
                      const SearchLimits& limits = {}, SearchStats* stats = nullptr);

CompositionResult compose(const std::vector<services::ServiceSpec>& available, const services::ServiceSpec& goal,
                          const SearchLimits& limits = {});

// Formulas tried as cut formulas: each hypothesis's positive formulas and
// their subformulas, then tensors of whole outputs that exactly supply the
// inputs of another hypothesis.
std::vector<cll::Formula> cut_candidates(const std::vector<kernel::Theorem>& axioms);

}  // namespace llweave::composer
