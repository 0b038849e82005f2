#include "babagrid/level.hpp"

#include "babagrid/error.hpp"
#include "babagrid/io.hpp"

namespace babagrid {

const PriorTable& PriorTable::standard() {
  static const PriorTable table({
      {"BABA", Property::You},
      {"FLAG", Property::Win},
      {"ROCK", Property::Push},
      {"WALL", Property::Stop},
      {"LAVA", Property::Defeat},
      {"KEY", Property::Open},
      {"DOOR", Property::Shut},
      {"WATER", Property::Sink},
      {"SKULL", Property::Defeat},
  });
  return table;
}

std::optional<Property> PriorTable::prior(std::string_view noun) const {
  auto it = priors_.find(std::string(noun));
  if (it == priors_.end()) return std::nullopt;
  return it->second;
}

bool PriorTable::aligned(const Rule& rule) const {
  auto p = prior(rule.subject);
  return p && *p == rule.property;
}

RuleSet PriorTable::contradictions(const RuleSet& rules) const {
  RuleSet out;
  for (const auto& r : rules)
    if (!aligned(r)) out.insert(r);
  return out;
}

void PriorTable::validate(const AlphabetConfig& alphabet) const {
  for (const auto& n : alphabet.nouns()) {
    if (!priors_.count(n.name)) throw Error(ErrorKind::SchemaViolation, "prior table: no entry for noun " + n.name);
  }
  for (const auto& [noun, _] : priors_) {
    if (!alphabet.noun_by_name(noun)) throw Error(ErrorKind::SchemaViolation, "prior table: unknown noun " + noun);
  }
}

nlohmann::json PriorTable::to_json() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [noun, p] : priors_) doc[noun] = std::string(property_name(p));
  return doc;
}

PriorTable PriorTable::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaViolation, "prior table must be an object");
  std::map<std::string, Property> priors;
  for (const auto& [noun, value] : doc.items()) {
    if (!value.is_string()) throw Error(ErrorKind::SchemaViolation, "prior for " + noun + " must be a string");
    auto p = property_from_name(value.get<std::string>());
    if (!p) throw Error(ErrorKind::SchemaViolation, "prior for " + noun + ": unknown property");
    priors[noun] = *p;
  }
  return PriorTable(std::move(priors));
}

nlohmann::json encode_level(const Level& level, const AlphabetConfig& alphabet) {
  auto doc = encode_structured(level.grid, alphabet);
  doc["format_version"] = kLevelFormatVersion;
  doc["id"] = level.id;
  doc["tier"] = level.tier;
  doc["seed"] = level.seed;
  doc["pair_id"] = level.pair_id ? nlohmann::json(*level.pair_id) : nlohmann::json(nullptr);
  doc["active_rules"] = parse_rules(level.grid, alphabet).to_strings();
  if (level.pivot) {
    doc["pivot"] = {{"noun", level.pivot->noun},
                    {"plus", std::string(property_name(level.pivot->plus))},
                    {"minus", std::string(property_name(level.pivot->minus))}};
  } else {
    doc["pivot"] = nullptr;
  }
  doc["metadata"] = level.metadata.is_null() ? nlohmann::json::object() : level.metadata;
  return doc;
}

Level decode_level(const nlohmann::json& doc, const AlphabetConfig& alphabet) {
  auto violation = [](const std::string& what) { return Error(ErrorKind::SchemaViolation, what); };
  if (!doc.is_object()) throw violation("level document must be an object");
  if (!doc.contains("format_version") || doc["format_version"] != kLevelFormatVersion)
    throw violation("unsupported or missing format_version");
  Level level;
  level.grid = decode_structured(doc, alphabet);
  try {
    level.id = doc.value("id", std::string{});
    if (!doc.contains("tier") || !doc["tier"].is_number_integer()) throw violation("missing integer 'tier'");
    level.tier = doc["tier"].get<int>();
    if (level.tier < 1 || level.tier > 3) throw violation("tier must be 1, 2 or 3");
    if (!doc.contains("seed") || !doc["seed"].is_number_integer()) throw violation("missing integer 'seed'");
    level.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("pair_id") && !doc["pair_id"].is_null()) {
      if (!doc["pair_id"].is_string()) throw violation("'pair_id' must be a string or null");
      level.pair_id = doc["pair_id"].get<std::string>();
    }
    if (doc.contains("pivot") && !doc["pivot"].is_null()) {
      const auto& p = doc["pivot"];
      auto plus = property_from_name(p.at("plus").get<std::string>());
      auto minus = property_from_name(p.at("minus").get<std::string>());
      if (!plus || !minus) throw violation("pivot properties unknown");
      level.pivot = Pivot{p.at("noun").get<std::string>(), *plus, *minus};
    }
    if (doc.contains("active_rules") && !doc["active_rules"].is_array()) throw violation("'active_rules' must be an array");
    if (doc.contains("metadata")) {
      if (!doc["metadata"].is_object()) throw violation("'metadata' must be an object");
      level.metadata = doc["metadata"];
    }
  } catch (const nlohmann::json::exception& e) {
    throw violation(e.what());
  }
  return level;
}

std::string level_file_text(const Level& level, const AlphabetConfig& alphabet) {
  return encode_level(level, alphabet).dump(2) + "\n";
}

Level read_level_file(const std::filesystem::path& path, const AlphabetConfig& alphabet) {
  auto text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, path.string() + ": " + e.what());
  }
  return decode_level(doc, alphabet);
}

}  // namespace babagrid
