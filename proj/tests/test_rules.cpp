#include <random>

#include "babagrid/error.hpp"
#include "babagrid/rules.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/reference_kernel.hpp"

using namespace babagrid;

namespace {

std::set<std::string> as_set(const RuleSet& r) {
  auto v = r.to_strings();
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("Level 0-0 active rules") {
  auto rules = parse_rules(fixtures::level00());
  CHECK(rules.to_strings() ==
        std::vector<std::string>{"BABA IS YOU", "FLAG IS WIN", "ROCK IS PUSH", "WALL IS STOP"});
}

TEST_CASE("parse_rules edge cases") {
  CHECK(parse_rules(GridState(5, 5)).empty());
  CHECK(as_set(parse_rules(parse_ascii("B\n=\nY"))) == std::set<std::string>{"BABA IS YOU"});
  // right-to-left and bottom-to-top do not read
  CHECK(parse_rules(parse_ascii("Y = B")).empty());
  CHECK(parse_rules(parse_ascii("Y\n=\nB")).empty());
  // no diagonal and no wrap-around
  CHECK(parse_rules(parse_ascii("B . .\n. = .\n. . Y")).empty());
  CHECK(parse_rules(parse_ascii(". B =\nY . .")).empty());
  // stacked text still forms a rule
  CHECK(as_set(parse_rules(parse_ascii("Bb =w Y"))) == std::set<std::string>{"BABA IS YOU"});
}

TEST_CASE("parse_rules agrees with the brute-force triple scanner") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> dim(1, 7);
  int non_empty = 0;
  for (int i = 0; i < 500; ++i) {
    auto g = fixtures::random_grid(rng, dim(rng), dim(rng), "BFO#LKYWSPEV===b", 0.3);
    auto expected = reference::brute_force_rules(reference::parse(encode_ascii(g)));
    auto got = as_set(parse_rules(g));
    REQUIRE(got == expected);
    non_empty += !got.empty();
  }
  CHECK(non_empty > 100);  // the corpus actually exercises rule formation
}

TEST_CASE("adding cells that form no new triple leaves rules unchanged") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    auto g = fixtures::random_play_grid(rng, 6, 6);
    auto before = parse_rules(g);
    auto h = g;
    // icons never participate in a triple
    h.at(static_cast<int>(rng() % 6), static_cast<int>(rng() % 6)) += "k";
    CHECK(parse_rules(h) == before);
  }
}

TEST_CASE("property_sets") {
  RuleSet stop({parse_rule_string("WALL IS STOP")});
  auto sets = property_sets(stop);
  CHECK(chars_of(sets.of(Property::Stop)) == "w");
  for (auto p : kAllProperties)
    if (p != Property::Stop) CHECK(sets.of(p).none());

  auto level = property_sets(parse_rules(fixtures::level00()));
  CHECK(chars_of(level.of(Property::You)) == "b");
  CHECK(chars_of(level.of(Property::Win)) == "f");
  CHECK(chars_of(level.of(Property::Push)) == "r");
  CHECK(chars_of(level.of(Property::Stop)) == "w");

  RuleSet safe({parse_rule_string("LAVA IS SAFE")});
  auto safe_sets = property_sets(safe);
  CHECK(chars_of(safe_sets.of(Property::Safe)) == "l");
  CHECK(safe_sets.of(Property::Defeat).none());

  RuleSet unknown({Rule{"GHOST", Property::You}});
  CHECK_THROWS_AS(property_sets(unknown), Error);
}

TEST_CASE("negations remove SAFE and PASS icons from interaction sets") {
  RuleSet rules({parse_rule_string("LAVA IS DEFEAT"), parse_rule_string("LAVA IS SAFE"),
                 parse_rule_string("WALL IS STOP"), parse_rule_string("WALL IS PASS"),
                 parse_rule_string("ROCK IS STOP")});
  auto raw = property_sets(rules);
  CHECK(chars_of(raw.of(Property::Defeat)) == "l");
  auto eff = apply_negations(raw);
  CHECK(eff.of(Property::Defeat).none());
  CHECK(chars_of(eff.of(Property::Stop)) == "r");
}

TEST_CASE("rule_signature") {
  CHECK(rule_signature(RuleSet{}) == rule_signature(RuleSet{}));
  auto a = parse_rule_string("ROCK IS PUSH");
  auto b = parse_rule_string("WALL IS STOP");
  CHECK(rule_signature(RuleSet({a, b})) == rule_signature(RuleSet({b, a})));
  CHECK(rule_signature(RuleSet({b})) != rule_signature(RuleSet({parse_rule_string("WALL IS PASS")})));
  CHECK(rule_signature(RuleSet{}) != rule_signature(RuleSet({a})));
}

TEST_CASE("rule signatures are pairwise distinct over all 2-rule subsets") {
  std::vector<Rule> space;
  for (const auto& n : AlphabetConfig::standard().nouns())
    for (auto p : kAllProperties) space.push_back(Rule{n.name, p});
  std::set<std::uint64_t> digests;
  std::size_t subsets = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    digests.insert(rule_signature(RuleSet({space[i]})).digest);
    ++subsets;
    for (std::size_t j = i + 1; j < space.size(); ++j) {
      digests.insert(rule_signature(RuleSet({space[i], space[j]})).digest);
      ++subsets;
    }
  }
  CHECK(digests.size() == subsets);
}

TEST_CASE("rule strings") {
  CHECK(parse_rule_string("FLAG IS WIN").to_string() == "FLAG IS WIN");
  CHECK_THROWS_AS(parse_rule_string("FLAG WIN"), Error);
  CHECK_THROWS_AS(parse_rule_string("FLAG IS ROCK"), Error);
  CHECK_THROWS_AS(parse_rule_string("GHOST IS WIN"), Error);
}
