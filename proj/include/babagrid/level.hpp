#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "babagrid/grid.hpp"
#include "babagrid/rules.hpp"
#include "json.hpp"

namespace babagrid {

inline constexpr int kLevelFormatVersion = 1;

// Noun -> the property its sprite suggests (WALL -> STOP, LAVA -> DEFEAT...).
class PriorTable {
 public:
  PriorTable() = default;
  explicit PriorTable(std::map<std::string, Property> priors) : priors_(std::move(priors)) {}

  static const PriorTable& standard();

  std::optional<Property> prior(std::string_view noun) const;
  bool aligned(const Rule& rule) const;  // rule property equals the noun's prior
  RuleSet contradictions(const RuleSet& rules) const;
  const std::map<std::string, Property>& entries() const noexcept { return priors_; }

  // Throws SchemaViolation unless every alphabet noun has exactly one entry.
  void validate(const AlphabetConfig& alphabet) const;

  nlohmann::json to_json() const;
  static PriorTable from_json(const nlohmann::json& doc);

 private:
  std::map<std::string, Property> priors_;
};

// The noun whose rule differs between the members of a counterfactual pair.
struct Pivot {
  std::string noun;
  Property plus = Property::Stop;
  Property minus = Property::Pass;
  bool operator==(const Pivot&) const = default;
};

struct Level {
  std::string id;
  GridState grid;
  int tier = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> pair_id;
  std::optional<Pivot> pivot;
  nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json encode_level(const Level& level, const AlphabetConfig& alphabet = AlphabetConfig::standard());
Level decode_level(const nlohmann::json& doc, const AlphabetConfig& alphabet = AlphabetConfig::standard());

// Pretty-printed, newline-terminated level document.
std::string level_file_text(const Level& level, const AlphabetConfig& alphabet = AlphabetConfig::standard());
Level read_level_file(const std::filesystem::path& path, const AlphabetConfig& alphabet = AlphabetConfig::standard());

}  // namespace babagrid
