#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "babagrid/dynamics.hpp"
#include "babagrid/level.hpp"
#include "babagrid/planner.hpp"

namespace babagrid {

std::vector<Pivot> default_pivots();

struct GenParams {
  int min_size = 7;
  int max_size = 12;
  int min_nouns = 2;
  int max_nouns = 5;
  double max_wall_density = 0.3;
  int max_attempts = 500;
  PlanBudget budget;
  DynamicsConfig dynamics;
  PriorTable priors = PriorTable::standard();
  std::vector<Pivot> pivots = default_pivots();

  const AlphabetConfig& alpha() const noexcept { return dynamics.alpha(); }
  // Throws SchemaViolation when a bound is outside the supported range.
  void validate() const;
};

// Result of re-checking a level against its tier post-condition.
struct LevelCheck {
  bool ok = false;
  std::string reason;
  PlanResult plan;
  std::optional<PlanResult> frozen_plan;  // tier 3 only
  bool rules_changed_on_path = false;
};

LevelCheck validate_level(const Level& level, const GenParams& params);

// Throws GenerationExhausted after params.max_attempts rejected candidates.
Level generate_level(int tier, std::uint64_t seed, const GenParams& params);

struct CounterfactualPair {
  std::string pair_id;
  Pivot pivot;
  GridState base_grid;  // member grids with the pivot property slot emptied
  Pos pivot_slot;       // the property-text cell that differs
  RuleSet plus_rules;
  RuleSet minus_rules;
  Level plus_level;
  Level minus_level;
  std::vector<Action> witness;  // last action is the first whose outcomes differ
};

CounterfactualPair generate_pair(int tier, std::uint64_t seed, const GenParams& params);

// Grid with every non-icon char removed.
GridState icon_projection(const GridState& g, const AlphabetConfig& alphabet = AlphabetConfig::standard());

// Shortest action sequence (prefix of at most max_prefix steps, then one more)
// after which the two grids' icon projections differ when stepped in lockstep.
std::optional<std::vector<Action>> divergence_witness(const GridState& a, const GridState& b,
                                                      const DynamicsConfig& cfg, int max_prefix = 3);

struct SuitePart {
  int tier = 1;
  int count = 0;
  bool pairs = false;  // count pairs, two level files each
};

struct SuiteSpec {
  std::uint64_t master_seed = 0;
  std::vector<SuitePart> parts;
  GenParams params;

  // 45 tier-1, 45 tier-2 and 50 tier-3 levels.
  static SuiteSpec standard(std::uint64_t master_seed);
};

struct ManifestEntry {
  std::string id;
  std::string file;  // relative to the manifest directory
  int tier = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> pair_id;
  std::string checksum;
};

struct Manifest {
  std::uint64_t master_seed = 0;
  std::vector<ManifestEntry> entries;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& doc);
};

inline constexpr const char* kManifestFile = "manifest.json";

std::uint64_t level_seed(std::uint64_t master_seed, std::size_t part, int tier, bool pairs, std::size_t index);

// Levels of the suite in manifest order, generated with up to `jobs` threads.
std::vector<Level> generate_suite(const SuiteSpec& spec, int jobs = 1);

// Writes one level file per level plus manifest.json; returns the manifest path.
std::filesystem::path export_suite(const SuiteSpec& spec, const std::filesystem::path& out_dir, int jobs = 1);

Manifest read_manifest(const std::filesystem::path& manifest_path);

// Loads one manifest entry; throws SchemaViolation on a checksum mismatch.
Level load_manifest_level(const std::filesystem::path& manifest_path, const ManifestEntry& entry,
                          const AlphabetConfig& alphabet = AlphabetConfig::standard());

}  // namespace babagrid
