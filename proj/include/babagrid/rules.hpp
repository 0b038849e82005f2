#pragma once

#include <bitset>
#include <cstdint>
#include <string>
#include <vector>

#include "babagrid/alphabet.hpp"
#include "babagrid/grid.hpp"

namespace babagrid {

struct Rule {
  std::string subject;  // noun name, e.g. "WALL"
  Property property = Property::You;

  std::string to_string() const;  // "WALL IS STOP"
  bool operator==(const Rule&) const = default;
  bool operator<(const Rule& other) const;  // by (subject, property name)
};

// Parses "NOUN IS PROPERTY"; throws SchemaViolation on anything else.
Rule parse_rule_string(std::string_view text, const AlphabetConfig& alphabet = AlphabetConfig::standard());

// Sorted, duplicate-free set of rules.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  void insert(Rule rule);
  bool contains(const Rule& rule) const;
  bool contains(std::string_view subject, Property property) const;

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  auto begin() const noexcept { return rules_.begin(); }
  auto end() const noexcept { return rules_.end(); }

  std::vector<std::string> to_strings() const;
  bool operator==(const RuleSet&) const = default;

 private:
  std::vector<Rule> rules_;
};

// Where a rule was read on the grid: the three cells of the triple.
struct RuleOccurrence {
  Rule rule;
  Pos noun;
  Pos op;
  Pos property;
  char property_char = 0;
};

RuleSet parse_rules(const GridState& g, const AlphabetConfig& alphabet = AlphabetConfig::standard());
std::vector<RuleOccurrence> locate_rules(const GridState& g, const AlphabetConfig& alphabet = AlphabetConfig::standard());

using CharSet = std::bitset<256>;

inline bool contains_char(const CharSet& set, char ch) noexcept { return set.test(static_cast<unsigned char>(ch)); }
std::string chars_of(const CharSet& set);  // ascending

// by_property[q] = icons of every noun n with (n IS q) in the rule set.
struct PropertySets {
  std::array<CharSet, kPropertyCount> by_property{};

  const CharSet& of(Property p) const noexcept { return by_property[static_cast<std::size_t>(p)]; }
  CharSet& of(Property p) noexcept { return by_property[static_cast<std::size_t>(p)]; }
  bool operator==(const PropertySets&) const = default;
};

// Throws UnknownNoun for a subject missing from the alphabet.
PropertySets property_sets(const RuleSet& rules, const AlphabetConfig& alphabet = AlphabetConfig::standard());

// Interaction sets with the negative properties applied: SAFE icons leave
// DEFEAT/SINK/HOT, PASS icons leave STOP.
PropertySets apply_negations(const PropertySets& raw);

struct RuleSignature {
  std::uint64_t digest = 0;
  auto operator<=>(const RuleSignature&) const = default;
  std::string hex() const;
};

RuleSignature rule_signature(const RuleSet& rules);

}  // namespace babagrid

template <>
struct std::hash<babagrid::RuleSignature> {
  std::size_t operator()(const babagrid::RuleSignature& s) const noexcept { return static_cast<std::size_t>(s.digest); }
};
