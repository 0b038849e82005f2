#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "babagrid/level.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/planner.hpp"

namespace babagrid {

enum class Modality { NaturalLanguage, CodeGrounded };

std::string_view modality_name(Modality m);  // "natural-language" / "code-grounded"
Modality parse_modality(std::string_view name);

// Two phrasings of the natural-language prompt: a terse rule statement and a
// fuller description of the scene.
enum class NlTemplate { RuleStatement, SceneDescription };

struct ProbeOptions {
  std::uint64_t seed = 0;
  int scenarios = 45;
  PlannerConfig planner;
  PriorTable priors = PriorTable::standard();
  NlTemplate nl_template = NlTemplate::RuleStatement;
  // Line-delimited {level_id, logic_action?, prior_action?} annotations that
  // replace the computed ones.
  std::optional<std::filesystem::path> overrides;
};

struct ProbeScenario {
  std::string scenario_id;
  std::string level_id;
  GridState grid;
  RuleSet rules;
  Action logic_action = Action::Up;
  Action prior_action = Action::Up;
};

struct ProbeRecord {
  std::string scenario_id;
  std::string level_id;
  Modality modality = Modality::NaturalLanguage;
  std::string prompt_text;
  std::vector<Action> candidate_actions;  // presentation order
  std::vector<int> permutation;           // candidate i = UP/DOWN/LEFT/RIGHT index permutation[i]
  Action logic_action = Action::Up;
  Action prior_action = Action::Up;
  std::vector<std::string> rules;
  std::string grid_ascii;

  nlohmann::json to_json() const;
  static ProbeRecord from_json(const nlohmann::json& doc);
};

// The grid as a prior-driven reader sees it: each rule that contradicts the
// prior table is rewritten. A YOU or WIN rule moves to the noun whose prior it
// is (when that noun's sprite is on the grid); any other rule gets the
// subject's prior property.
GridState prior_reading(const GridState& g, const PriorTable& priors,
                        const AlphabetConfig& alphabet = AlphabetConfig::standard());

// logic = first action of the plan on the level; prior = first action of the
// plan on its prior reading. nullopt when either plan fails or they coincide.
std::optional<ProbeScenario> annotate_level(const Level& level, const ProbeOptions& options);

// Levels with prior conflicts to draw scenarios from: tier-2 levels and the
// minus members of tier-1 pairs, alternating.
std::vector<Level> probe_candidates(std::uint64_t master_seed, int count, const GenParams& params, int jobs = 1);

// First options.scenarios levels that annotate cleanly, in input order.
// Throws AnnotationConflict when too few qualify.
std::vector<ProbeScenario> select_scenarios(const std::vector<Level>& candidates, const ProbeOptions& options);

std::vector<ProbeRecord> build_probe_records(const std::vector<ProbeScenario>& scenarios, const ProbeOptions& options,
                                             const AlphabetConfig& alphabet = AlphabetConfig::standard());

// Two records (one per modality) per scenario, line-delimited; returns the count.
std::size_t export_probes(const std::vector<Level>& candidates, const ProbeOptions& options,
                          const std::filesystem::path& out_file);

std::vector<ProbeRecord> read_probe_records(const std::filesystem::path& path);

// --- scoring -------------------------------------------------------------

inline double delta_p(double p_logic, double p_prior) { return p_logic - p_prior; }

struct ProbeScore {
  std::string scenario_id;
  Modality modality = Modality::NaturalLanguage;
  std::string model_tag;
  double p_logic = 0.0;
  double p_prior = 0.0;
  double delta_p = 0.0;
};

struct ProbeAggregate {
  std::string model_tag;
  Modality modality = Modality::NaturalLanguage;
  std::size_t count = 0;
  double mean_delta_p = 0.0;
};

struct ScoreResult {
  std::vector<ProbeScore> scores;
  std::vector<ProbeAggregate> aggregates;  // sorted by (model_tag, modality)

  nlohmann::json to_json() const;
  std::string to_table() const;  // means printed with 3 decimals
};

// Each logprob line: {scenario_id, modality, model_tag?, and one of
// probabilities {ACTION: p}, logprobs {ACTION: log p}, or
// position_probabilities [p per presented candidate]}. Values are
// renormalized over the record's candidates.
ScoreResult score_probes(const std::vector<ProbeRecord>& records, const std::vector<nlohmann::json>& logprobs);
ScoreResult score_probe_files(const std::filesystem::path& records_file, const std::filesystem::path& logprobs_file);

std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path);

}  // namespace babagrid
