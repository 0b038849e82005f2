#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "babagrid/kernel_template.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/protocol.hpp"

namespace babagrid {

struct EvalOptions {
  PlannerConfig planner;
  // Native fixed-rule kernels unless an external endpoint is given.
  std::optional<EndpointSpec> external;
  std::shared_ptr<const KernelTemplate> kernel_template;  // for {kernel} endpoints
  std::filesystem::path work_dir;                         // rendered kernels
  std::chrono::milliseconds timeout = kDefaultCallTimeout;
  // Overrides the oracle entirely (plain plan(), no cache) when set.
  std::function<std::shared_ptr<TransitionOracle>(const Level&)> oracle_factory;
  bool frozen_text = false;
  int jobs = 1;
};

struct LevelEval {
  std::string id;
  int tier = 1;
  PlanStatus status = PlanStatus::Fail;
  std::vector<Action> actions;
  int expansions = 0;
  int resyntheses = 0;
  int cache_hits = 0;
  int distinct_signatures = 0;
  double seconds = 0.0;
  std::optional<std::string> error;  // failure to load or to talk to the oracle

  bool solved() const noexcept { return status == PlanStatus::Solved && !error; }
};

struct TierSummary {
  int tier = 1;
  int total = 0;
  int solved = 0;
  double mean_plan_length = 0.0;  // over solved levels
  double mean_expansions = 0.0;
  double mean_resyntheses = 0.0;
  double mean_seconds = 0.0;

  double success_rate() const noexcept { return total ? 100.0 * solved / total : 0.0; }
  std::string rational() const { return std::to_string(solved) + "/" + std::to_string(total); }
};

struct EvalReport {
  std::vector<LevelEval> levels;
  std::vector<TierSummary> tiers;
  std::size_t cache_size = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

std::vector<TierSummary> summarize(const std::vector<LevelEval>& levels);

EvalReport evaluate_levels(const std::vector<Level>& levels, const EvalOptions& options);

// Loads every manifest entry; entries that fail to load count as failures.
EvalReport evaluate_suite(const std::filesystem::path& manifest_path, const EvalOptions& options,
                          const AlphabetConfig& alphabet = AlphabetConfig::standard());

}  // namespace babagrid
