#include "babagrid/alphabet.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

#include "babagrid/error.hpp"

namespace babagrid {

namespace {

constexpr std::array<std::string_view, kPropertyCount> kPropertyNames = {
    "YOU", "WIN", "STOP", "PUSH", "DEFEAT", "SINK", "MELT", "HOT", "OPEN", "SHUT", "SAFE", "PASS"};

bool printable(char ch) { return std::isprint(static_cast<unsigned char>(ch)) && ch != ' '; }

}  // namespace

std::string_view property_name(Property p) { return kPropertyNames[static_cast<std::size_t>(p)]; }

std::optional<Property> property_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPropertyCount; ++i) {
    if (kPropertyNames[i] == name) return static_cast<Property>(i);
  }
  return std::nullopt;
}

AlphabetConfig::AlphabetConfig(std::vector<NounEntry> nouns, std::array<char, kPropertyCount> property_chars,
                               char is_char, char empty_char)
    : nouns_(std::move(nouns)), property_chars_(property_chars), is_(is_char), empty_(empty_char) {
  build();
}

void AlphabetConfig::build() {
  classes_.fill(EntityClass::Invalid);
  noun_by_text_.fill(-1);
  noun_by_icon_.fill(-1);
  property_by_text_.fill(-1);
  text_chars_.clear();

  auto claim = [&](char ch, EntityClass cls, const std::string& what) {
    if (!printable(ch)) throw Error(ErrorKind::SchemaViolation, "alphabet: non-printable char for " + what);
    auto& slot = classes_[static_cast<unsigned char>(ch)];
    if (slot != EntityClass::Invalid)
      throw Error(ErrorKind::SchemaViolation, std::string("alphabet: char '") + ch + "' assigned twice (" + what + ")");
    slot = cls;
  };

  claim(empty_, EntityClass::Empty, "EMPTY");
  claim(is_, EntityClass::OperatorText, "IS");
  for (std::size_t i = 0; i < nouns_.size(); ++i) {
    const auto& n = nouns_[i];
    if (n.name.empty()) throw Error(ErrorKind::SchemaViolation, "alphabet: noun with empty name");
    claim(n.text, EntityClass::NounText, n.name + " text");
    claim(n.icon, EntityClass::Icon, n.name + " icon");
    noun_by_text_[static_cast<unsigned char>(n.text)] = static_cast<std::int16_t>(i);
    noun_by_icon_[static_cast<unsigned char>(n.icon)] = static_cast<std::int16_t>(i);
  }
  for (std::size_t i = 0; i < kPropertyCount; ++i) {
    claim(property_chars_[i], EntityClass::PropertyText, std::string(kPropertyNames[i]));
    property_by_text_[static_cast<unsigned char>(property_chars_[i])] = static_cast<std::int8_t>(i);
  }
  for (int ch = 0; ch < 256; ++ch) {
    if (is_text(static_cast<char>(ch))) text_chars_.push_back(static_cast<char>(ch));
  }
}

const AlphabetConfig& AlphabetConfig::standard() {
  static const AlphabetConfig config(
      {
          {"BABA", 'B', 'b'},
          {"FLAG", 'F', 'f'},
          {"ROCK", 'O', 'r'},
          {"WALL", '#', 'w'},
          {"LAVA", 'L', 'l'},
          {"KEY", 'K', 'k'},
          {"DOOR", 'D', 'd'},
          {"WATER", 'A', 'a'},
          {"SKULL", 'X', 'x'},
      },
      // YOU WIN STOP PUSH DEFEAT SINK MELT HOT OPEN SHUT SAFE PASS
      {'Y', 'W', 'S', 'P', 'E', 'N', 'M', 'H', 'G', 'C', 'V', 'Z'});
  return config;
}

std::optional<Property> AlphabetConfig::property_of(char text) const noexcept {
  auto idx = property_by_text_[static_cast<unsigned char>(text)];
  if (idx < 0) return std::nullopt;
  return static_cast<Property>(idx);
}

const NounEntry* AlphabetConfig::noun_by_name(std::string_view name) const noexcept {
  for (const auto& n : nouns_) {
    if (n.name == name) return &n;
  }
  return nullptr;
}

const NounEntry* AlphabetConfig::noun_by_text(char text) const noexcept {
  auto idx = noun_by_text_[static_cast<unsigned char>(text)];
  return idx < 0 ? nullptr : &nouns_[static_cast<std::size_t>(idx)];
}

const NounEntry* AlphabetConfig::noun_by_icon(char icon) const noexcept {
  auto idx = noun_by_icon_[static_cast<unsigned char>(icon)];
  return idx < 0 ? nullptr : &nouns_[static_cast<std::size_t>(idx)];
}

nlohmann::json AlphabetConfig::to_json() const {
  nlohmann::json doc;
  doc["empty"] = std::string(1, empty_);
  doc["is"] = std::string(1, is_);
  auto& nouns = doc["nouns"] = nlohmann::json::array();
  for (const auto& n : nouns_) {
    nouns.push_back({{"name", n.name}, {"text", std::string(1, n.text)}, {"icon", std::string(1, n.icon)}});
  }
  auto& props = doc["properties"] = nlohmann::json::object();
  for (std::size_t i = 0; i < kPropertyCount; ++i) props[std::string(kPropertyNames[i])] = std::string(1, property_chars_[i]);
  return doc;
}

AlphabetConfig AlphabetConfig::from_json(const nlohmann::json& doc) {
  auto one_char = [](const nlohmann::json& v, const char* field) {
    if (!v.is_string() || v.get<std::string>().size() != 1)
      throw Error(ErrorKind::SchemaViolation, std::string("alphabet: field '") + field + "' must be a 1-char string");
    return v.get<std::string>()[0];
  };
  try {
    const auto& base = standard();
    char empty = doc.contains("empty") ? one_char(doc["empty"], "empty") : base.empty_char();
    char is = doc.contains("is") ? one_char(doc["is"], "is") : base.is_char();
    std::vector<NounEntry> nouns;
    if (!doc.contains("nouns") || !doc["nouns"].is_array())
      throw Error(ErrorKind::SchemaViolation, "alphabet: 'nouns' array required");
    for (const auto& n : doc["nouns"]) {
      NounEntry e;
      e.name = n.at("name").get<std::string>();
      std::transform(e.name.begin(), e.name.end(), e.name.begin(), [](unsigned char c) { return std::toupper(c); });
      e.text = one_char(n.at("text"), "text");
      e.icon = one_char(n.at("icon"), "icon");
      nouns.push_back(std::move(e));
    }
    std::array<char, kPropertyCount> props{};
    for (std::size_t i = 0; i < kPropertyCount; ++i) props[i] = base.property_char(static_cast<Property>(i));
    if (doc.contains("properties")) {
      for (const auto& [key, value] : doc["properties"].items()) {
        auto p = property_from_name(key);
        if (!p) throw Error(ErrorKind::SchemaViolation, "alphabet: unknown property '" + key + "'");
        props[static_cast<std::size_t>(*p)] = one_char(value, "properties");
      }
    }
    return AlphabetConfig(std::move(nouns), props, is, empty);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("alphabet: ") + e.what());
  }
}

}  // namespace babagrid
