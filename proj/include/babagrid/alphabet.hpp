#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace babagrid {

enum class Property : std::uint8_t {
  You,
  Win,
  Stop,
  Push,
  Defeat,
  Sink,
  Melt,
  Hot,
  Open,
  Shut,
  Safe,
  Pass,
};

inline constexpr std::size_t kPropertyCount = 12;

inline constexpr std::array<Property, kPropertyCount> kAllProperties = {
    Property::You,  Property::Win, Property::Stop, Property::Push, Property::Defeat, Property::Sink,
    Property::Melt, Property::Hot, Property::Open, Property::Shut, Property::Safe,   Property::Pass};

std::string_view property_name(Property p);
std::optional<Property> property_from_name(std::string_view name);

enum class EntityClass : std::uint8_t { Invalid, Empty, NounText, OperatorText, PropertyText, Icon };

struct NounEntry {
  std::string name;  // uppercase, e.g. "WALL"
  char text = 0;     // text block char, e.g. '#'
  char icon = 0;     // icon char, e.g. 'w'
};

// The symbol alphabet of a grid: which chars are text blocks, which are icons,
// and how noun text maps onto icons. Lookups are table-driven after build().
class AlphabetConfig {
 public:
  AlphabetConfig() = default;
  AlphabetConfig(std::vector<NounEntry> nouns, std::array<char, kPropertyCount> property_chars,
                 char is_char = '=', char empty_char = '.');

  // Legend of the benchmark: the Level 0-0 symbols plus the extra nouns and
  // properties the tiers use.
  static const AlphabetConfig& standard();

  EntityClass classify(char ch) const noexcept { return classes_[static_cast<unsigned char>(ch)]; }
  bool is_text(char ch) const noexcept {
    auto c = classify(ch);
    return c == EntityClass::NounText || c == EntityClass::OperatorText || c == EntityClass::PropertyText;
  }
  bool is_icon(char ch) const noexcept { return classify(ch) == EntityClass::Icon; }

  char empty_char() const noexcept { return empty_; }
  char is_char() const noexcept { return is_; }
  char property_char(Property p) const noexcept { return property_chars_[static_cast<std::size_t>(p)]; }
  std::optional<Property> property_of(char text) const noexcept;

  const std::vector<NounEntry>& nouns() const noexcept { return nouns_; }
  const NounEntry* noun_by_name(std::string_view name) const noexcept;
  const NounEntry* noun_by_text(char text) const noexcept;
  const NounEntry* noun_by_icon(char icon) const noexcept;

  // All text chars (noun text, operator, property text), ascending.
  const std::string& text_chars() const noexcept { return text_chars_; }

  nlohmann::json to_json() const;
  static AlphabetConfig from_json(const nlohmann::json& doc);

 private:
  void build();

  std::vector<NounEntry> nouns_;
  std::array<char, kPropertyCount> property_chars_{};
  char is_ = '=';
  char empty_ = '.';
  std::array<EntityClass, 256> classes_{};
  std::array<std::int16_t, 256> noun_by_text_{};
  std::array<std::int16_t, 256> noun_by_icon_{};
  std::array<std::int8_t, 256> property_by_text_{};
  std::string text_chars_;
};

}  // namespace babagrid
