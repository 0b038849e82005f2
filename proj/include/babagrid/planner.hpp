#pragma once

#include <atomic>
#include <functional>
#include <future>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "babagrid/oracle.hpp"

namespace babagrid {

inline constexpr int kInfiniteCost = std::numeric_limits<int>::max();

// Manhattan distance from the nearest YOU entity to the nearest WIN entity, or
// to the nearest text block when no WIN entity is on the grid. kInfiniteCost
// when there is nothing to control (or nothing to approach).
int heuristic(const GridState& s, const AlphabetConfig& alphabet = AlphabetConfig::standard());

struct PlanBudget {
  int max_expansions = 2000;  // counted in pops
  int max_depth = 60;
  double weight = 1.0;  // priority = g + weight * h
};

struct PlannerConfig {
  PlanBudget budget;
  DynamicsConfig dynamics;  // ground truth used for replay verification
};

enum class PlanStatus { Solved, Fail, BudgetExhausted };

std::string_view plan_status_name(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::Fail;
  std::vector<Action> actions;
  int expansions = 0;
  int resyntheses = 0;
  int cache_hits = 0;
  int distinct_signatures = 0;
  bool replay_verified = false;

  bool solved() const noexcept { return status == PlanStatus::Solved; }
};

PlanResult plan(const GridState& start, TransitionOracle& oracle, const PlannerConfig& config = {});

// Rule signature -> oracle store shared by any number of concurrent plans.
// Synthesis happens at most once per signature; concurrent askers wait on it.
class KernelCache {
 public:
  using Synthesizer =
      std::function<std::shared_ptr<TransitionOracle>(const RuleSignature&, const RuleSet&, const GridState&)>;

  struct Lookup {
    std::shared_ptr<TransitionOracle> oracle;
    bool hit = false;
  };

  // Throws Error(SynthesisFailure) if the synthesizer throws or returns null;
  // the failed entry is dropped so a later call may retry.
  Lookup get_or_synthesize(const RuleSignature& sig, const RuleSet& rules, const GridState& context,
                           const Synthesizer& synthesize);

  std::shared_ptr<TransitionOracle> lookup(const RuleSignature& sig) const;
  void store(const RuleSignature& sig, std::shared_ptr<TransitionOracle> oracle);

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::unordered_map<RuleSignature, std::shared_future<std::shared_ptr<TransitionOracle>>> entries_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

// Synthesizer producing native fixed-rule kernels.
KernelCache::Synthesizer native_synthesizer(DynamicsConfig cfg = {});

// Search where every node's rule signature picks its oracle from the cache.
PlanResult reactive_plan(const GridState& start, KernelCache& cache, const KernelCache::Synthesizer& synthesize,
                         const PlannerConfig& config = {});

// Replays on the ground-truth engine: true iff every step stays within the
// grid semantics and the final state wins.
bool replay_wins(const GridState& start, const std::vector<Action>& actions, const DynamicsConfig& cfg = {});

}  // namespace babagrid
