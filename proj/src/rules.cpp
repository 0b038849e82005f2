#include "babagrid/rules.hpp"

#include <algorithm>

#include "babagrid/error.hpp"
#include "babagrid/hash.hpp"

namespace babagrid {

std::string Rule::to_string() const { return subject + " IS " + std::string(property_name(property)); }

bool Rule::operator<(const Rule& other) const {
  if (subject != other.subject) return subject < other.subject;
  return property_name(property) < property_name(other.property);
}

Rule parse_rule_string(std::string_view text, const AlphabetConfig& alphabet) {
  auto bad = [&] { return Error(ErrorKind::SchemaViolation, "malformed rule '" + std::string(text) + "'"); };
  auto is_pos = text.find(" IS ");
  if (is_pos == std::string_view::npos) throw bad();
  auto subject = text.substr(0, is_pos);
  auto prop = property_from_name(text.substr(is_pos + 4));
  if (subject.empty() || !prop) throw bad();
  if (!alphabet.noun_by_name(subject)) throw Error(ErrorKind::UnknownNoun, std::string(subject));
  return Rule{std::string(subject), *prop};
}

RuleSet::RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
  std::sort(rules_.begin(), rules_.end());
  rules_.erase(std::unique(rules_.begin(), rules_.end()), rules_.end());
}

void RuleSet::insert(Rule rule) {
  auto it = std::lower_bound(rules_.begin(), rules_.end(), rule);
  if (it != rules_.end() && *it == rule) return;
  rules_.insert(it, std::move(rule));
}

bool RuleSet::contains(const Rule& rule) const { return std::binary_search(rules_.begin(), rules_.end(), rule); }

bool RuleSet::contains(std::string_view subject, Property property) const {
  return contains(Rule{std::string(subject), property});
}

std::vector<std::string> RuleSet::to_strings() const {
  std::vector<std::string> out;
  out.reserve(rules_.size());
  for (const auto& r : rules_) out.push_back(r.to_string());
  return out;
}

std::vector<RuleOccurrence> locate_rules(const GridState& g, const AlphabetConfig& alphabet) {
  std::vector<RuleOccurrence> found;
  constexpr Delta kReadDirections[] = {{0, 1}, {1, 0}};
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      const auto& first = g.at(r, c);
      if (first.empty()) continue;
      for (auto d : kReadDirections) {
        Pos op{r + d.drow, c + d.dcol};
        Pos prop{r + 2 * d.drow, c + 2 * d.dcol};
        if (!g.in_bounds(prop)) continue;
        if (g.at(op).find(alphabet.is_char()) == std::string::npos) continue;
        for (char noun_ch : first) {
          const auto* noun = alphabet.noun_by_text(noun_ch);
          if (!noun) continue;
          for (char prop_ch : g.at(prop)) {
            if (auto p = alphabet.property_of(prop_ch)) {
              found.push_back({Rule{noun->name, *p}, Pos{r, c}, op, prop, prop_ch});
            }
          }
        }
      }
    }
  }
  return found;
}

RuleSet parse_rules(const GridState& g, const AlphabetConfig& alphabet) {
  std::vector<Rule> rules;
  for (auto& occ : locate_rules(g, alphabet)) rules.push_back(std::move(occ.rule));
  return RuleSet(std::move(rules));
}

std::string chars_of(const CharSet& set) {
  std::string out;
  for (int ch = 0; ch < 256; ++ch) {
    if (set.test(static_cast<std::size_t>(ch))) out.push_back(static_cast<char>(ch));
  }
  return out;
}

PropertySets property_sets(const RuleSet& rules, const AlphabetConfig& alphabet) {
  PropertySets sets;
  for (const auto& rule : rules) {
    const auto* noun = alphabet.noun_by_name(rule.subject);
    if (!noun) throw Error(ErrorKind::UnknownNoun, rule.subject);
    sets.of(rule.property).set(static_cast<unsigned char>(noun->icon));
  }
  return sets;
}

PropertySets apply_negations(const PropertySets& raw) {
  PropertySets out = raw;
  const auto& safe = raw.of(Property::Safe);
  out.of(Property::Defeat) &= ~safe;
  out.of(Property::Sink) &= ~safe;
  out.of(Property::Hot) &= ~safe;
  out.of(Property::Stop) &= ~raw.of(Property::Pass);
  return out;
}

std::string RuleSignature::hex() const { return to_hex(digest); }

RuleSignature rule_signature(const RuleSet& rules) {
  // RuleSet is kept sorted, so hashing in order is permutation-invariant.
  Hasher h;
  h.update("rules:");
  for (const auto& rule : rules) {
    h.update(rule.subject);
    h.update_byte(0x1f);
    h.update(property_name(rule.property));
    h.update_byte(0x1e);
  }
  return RuleSignature{h.digest()};
}

}  // namespace babagrid
