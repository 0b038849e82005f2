#include <map>
#include <random>

#include "babagrid/dynamics.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/reference_kernel.hpp"

using namespace babagrid;

namespace {

StepSets sets_for(std::initializer_list<const char*> rules) {
  std::vector<Rule> v;
  for (auto r : rules) v.push_back(parse_rule_string(r));
  return step_sets(property_sets(RuleSet(v)), DynamicsConfig{});
}

std::map<char, int> census(const GridState& g) {
  std::map<char, int> m;
  for (const auto& cell : g.cells())
    for (char ch : cell) ++m[ch];
  return m;
}

int total(const GridState& g) {
  int n = 0;
  for (const auto& cell : g.cells()) n += static_cast<int>(cell.size());
  return n;
}

}  // namespace

TEST_CASE("Level 0-0: RIGHT pushes the rock onto the flag, second RIGHT wins") {
  auto g = fixtures::level00();
  auto one = next_state(g, Action::Right);
  CHECK(one.next.at(4, 4).empty());
  CHECK(one.next.at(4, 5) == "b");
  CHECK(one.next.at(4, 6) == "fr");
  CHECK_FALSE(one.rules_changed);
  CHECK(one.movers_destroyed == 0);
  CHECK_FALSE(check_win(one.next));

  auto two = next_state(one.next, Action::Right);
  CHECK(two.next.at(4, 6) == "fb");
  CHECK(two.next.at(4, 7) == "r");
  CHECK(check_win(two.next));
}

TEST_CASE("free move and stop") {
  auto you = sets_for({"BABA IS YOU"});
  auto moved = step(parse_ascii("b . ."), Action::Right, you);
  CHECK(encode_ascii(moved.next) == ". b .");
  CHECK(moved.movers_destroyed == 0);
  CHECK(moved.objects_sunk == 0);

  auto blocked = step(parse_ascii("b w"), Action::Right, sets_for({"BABA IS YOU", "WALL IS STOP"}));
  CHECK(encode_ascii(blocked.next) == "b w");
  // boundary
  CHECK(encode_ascii(step(parse_ascii("b . ."), Action::Left, you).next) == "b . .");
  // STOP restricts entry, not exit
  CHECK(encode_ascii(step(parse_ascii("b ."), Action::Right, sets_for({"BABA IS YOU", "BABA IS STOP"})).next) == ". b");
}

TEST_CASE("push chains") {
  auto s = sets_for({"BABA IS YOU", "ROCK IS PUSH", "WALL IS STOP"});
  CHECK(encode_ascii(step(parse_ascii("b r r ."), Action::Right, s).next) == ". b r r");
  CHECK(encode_ascii(step(parse_ascii("b r r"), Action::Right, s).next) == "b r r");    // off grid
  CHECK(encode_ascii(step(parse_ascii("b r r w"), Action::Right, s).next) == "b r r w");  // stop at end
  // non-pushable members stay behind
  CHECK(encode_ascii(step(parse_ascii("b rf ."), Action::Right, s).next) == ". fb r");
  // text is pushable without any PUSH rule
  CHECK(encode_ascii(step(parse_ascii("b Y ."), Action::Right, sets_for({"BABA IS YOU"})).next) == ". b Y");
  // a pushable STOP object inside the chain does not block, but stops the mover once left behind
  auto stop_push = sets_for({"BABA IS YOU", "ROCK IS PUSH", "ROCK IS STOP"});
  CHECK(encode_ascii(step(parse_ascii("b r ."), Action::Right, stop_push).next) == ". b r");
}

TEST_CASE("enter logic: defeat, sink, melt, dangerous text") {
  auto defeat = step(parse_ascii("b l"), Action::Right, sets_for({"BABA IS YOU", "LAVA IS DEFEAT"}));
  CHECK(encode_ascii(defeat.next) == ". l");
  CHECK(defeat.movers_destroyed == 1);

  auto safe = step(parse_ascii("b l"), Action::Right, sets_for({"BABA IS YOU", "LAVA IS DEFEAT", "LAVA IS SAFE"}));
  CHECK(encode_ascii(safe.next) == ". lb");

  auto sink = step(parse_ascii("b aa"), Action::Right, sets_for({"BABA IS YOU", "WATER IS SINK"}));
  CHECK(encode_ascii(sink.next) == ". a");
  CHECK(sink.movers_destroyed == 1);
  CHECK(sink.objects_sunk == 1);

  auto melt = step(parse_ascii("b l"), Action::Right, sets_for({"BABA IS YOU", "BABA IS MELT", "LAVA IS HOT"}));
  CHECK(encode_ascii(melt.next) == ". l");
  auto no_melt = step(parse_ascii("b l"), Action::Right, sets_for({"BABA IS YOU", "LAVA IS HOT"}));
  CHECK(encode_ascii(no_melt.next) == ". lb");

  DynamicsConfig cfg;
  cfg.dangerous_text_chars.set('Y');
  auto sets = step_sets(property_sets(RuleSet({parse_rule_string("BABA IS YOU")})), cfg);
  sets.push.reset('Y');  // keep the block in place so the mover walks into it
  auto dead = step(parse_ascii("b Y"), Action::Right, sets);
  CHECK(encode_ascii(dead.next) == ". Y");
  CHECK(dead.movers_destroyed == 1);
}

TEST_CASE("open and shut") {
  auto s = sets_for({"BABA IS YOU", "KEY IS OPEN", "KEY IS PUSH", "DOOR IS SHUT", "DOOR IS STOP"});
  auto pushed = step(parse_ascii("b k d"), Action::Right, s);
  CHECK(encode_ascii(pushed.next) == ". b .");
  CHECK(pushed.objects_unlocked == 2);

  auto no_key = step(parse_ascii("b r d"), Action::Right,
                     sets_for({"BABA IS YOU", "ROCK IS PUSH", "DOOR IS SHUT", "DOOR IS STOP"}));
  CHECK(encode_ascii(no_key.next) == "b r d");

  auto mover = step(parse_ascii("b d"), Action::Right, sets_for({"BABA IS YOU", "BABA IS OPEN", "DOOR IS SHUT", "DOOR IS STOP"}));
  CHECK(encode_ascii(mover.next) == ". .");
  CHECK(mover.movers_destroyed == 1);
  CHECK(mover.objects_unlocked == 1);

  auto off = s;
  off.unlock = false;
  CHECK(encode_ascii(step(parse_ascii("b k d"), Action::Right, off).next) == "b k d");
}

TEST_CASE("multiple YOU movers run in (row, col, char) order on the evolving grid") {
  auto s = sets_for({"BABA IS YOU", "WALL IS YOU"});
  CHECK(encode_ascii(step(parse_ascii("b w ."), Action::Right, s).next) == ". b w");
  CHECK(encode_ascii(step(parse_ascii("bw . ."), Action::Right, s).next) == ". bw .");
  CHECK(encode_ascii(step(parse_ascii(". b w"), Action::Left, s).next) == "b w .");
}

TEST_CASE("check_win and is_lost") {
  auto g = parse_ascii("B = Y\nF = W\nbf . .");
  CHECK(check_win(g));
  auto broken = parse_ascii("B . =\nY . .\nF = W\nbf . .");
  CHECK_FALSE(check_win(broken));
  CHECK(is_lost(broken));
  CHECK_FALSE(is_lost(fixtures::level00()));

  auto lava = parse_ascii("B = Y\nL = E\nb l .");
  CHECK_FALSE(is_lost(lava));
  auto after = next_state(lava, Action::Right);
  CHECK(after.movers_destroyed == 1);
  CHECK(is_lost(after.next));
}

TEST_CASE("pushing a text block out of a triple flips rules_changed") {
  auto g = parse_ascii(". b .\nB = Y\n. . .");
  auto out = next_state(g, Action::Down);
  CHECK(out.rules_changed);
  CHECK(out.next.at(1, 1) == "b");
  CHECK(out.next.at(2, 1) == "=");
  CHECK(parse_rules(out.next).empty());

  auto blocked = next_state(parse_ascii("B = Y\n. b ."), Action::Up);  // chain runs off the grid
  CHECK_FALSE(blocked.rules_changed);
}

TEST_CASE("step matches the reference interpreter on random grids") {
  std::mt19937_64 rng(31337);
  int mismatches = 0, moved = 0;
  for (int i = 0; i < 1200; ++i) {
    auto g = fixtures::random_play_grid(rng, 5, 5, 4);
    for (Action a : kAllActions) {
      auto got = encode_ascii(next_state(g, a).next);
      auto want = reference::step_ascii(encode_ascii(g), std::string(action_name(a)));
      if (got != want) ++mismatches;
      moved += got != encode_ascii(g);
    }
  }
  CHECK(mismatches == 0);
  CHECK(moved > 1000);
}

TEST_CASE("step invariants: determinism, conservation, frame") {
  std::mt19937_64 rng(2718);
  for (int i = 0; i < 800; ++i) {
    auto g = fixtures::random_play_grid(rng, 6, 6, 4);
    Action a = kAllActions[rng() % 4];
    auto out = next_state(g, a);
    CHECK(out.next.identical(next_state(g, a).next));
    CHECK(total(g) - total(out.next) == out.movers_destroyed + out.objects_sunk + out.objects_unlocked);
    if (out.movers_destroyed + out.objects_sunk + out.objects_unlocked == 0) CHECK(census(g) == census(out.next));

    // Only rows (horizontal moves) or columns (vertical moves) holding a YOU
    // char at step start can change.
    auto sets = step_sets_for(g, DynamicsConfig{});
    bool horizontal = a == Action::Left || a == Action::Right;
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) {
        bool line_has_you = false;
        for (int k = 0; k < 6; ++k) {
          const auto& cell = horizontal ? g.at(r, k) : g.at(k, c);
          for (char ch : cell) line_has_you = line_has_you || contains_char(sets.you, ch);
        }
        if (!line_has_you) CHECK(g.at(r, c) == out.next.at(r, c));
      }

    CHECK(out.rules_changed == (rule_signature(parse_rules(g)) != rule_signature(parse_rules(out.next))));
  }
}
