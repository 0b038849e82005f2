#pragma once

// Independent checks of generated levels, built on the reference interpreter
// and on hand-written tables rather than on library code.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "support/reference_kernel.hpp"

namespace oracles {

inline const std::map<std::string, std::string> kPriors = {
    {"BABA", "YOU"},  {"FLAG", "WIN"}, {"ROCK", "PUSH"},  {"WALL", "STOP"},   {"LAVA", "DEFEAT"},
    {"KEY", "OPEN"},  {"DOOR", "SHUT"}, {"WATER", "SINK"}, {"SKULL", "DEFEAT"},
};

inline bool aligned(const std::string& rule) {
  auto sp = rule.find(" IS ");
  auto it = kPriors.find(rule.substr(0, sp));
  return it != kPriors.end() && it->second == rule.substr(sp + 4);
}

inline std::set<std::string> rules_of(const std::string& ascii) {
  return reference::brute_force_rules(reference::parse(ascii));
}

inline reference::Board step(const reference::Board& b, const std::string& move) {
  return reference::next_state(b, move, reference::sets_from_rules(reference::brute_force_rules(b)));
}

inline bool wins(const reference::Board& b) {
  return reference::check_win(b, reference::sets_from_rules(reference::brute_force_rules(b)));
}

struct Replay {
  bool won = false;
  bool rules_changed = false;
};

inline Replay replay(const std::string& ascii, const std::vector<std::string>& moves) {
  Replay out;
  auto b = reference::parse(ascii);
  for (const auto& m : moves) {
    auto before = reference::brute_force_rules(b);
    b = step(b, m);
    if (reference::brute_force_rules(b) != before) out.rules_changed = true;
  }
  out.won = wins(b);
  return out;
}

inline std::string text_layout(const reference::Board& b) {
  static const std::string text = "BFO#LKDAX=YWSPENMHGCVZ";
  std::string out;
  for (const auto& row : b)
    for (const auto& cell : row) {
      std::string t;
      for (char ch : cell)
        if (text.find(ch) != std::string::npos) t.push_back(ch);
      std::sort(t.begin(), t.end());
      out += t + "|";
    }
  return out;
}

inline std::string canonical(const reference::Board& b) {
  std::string out;
  for (const auto& row : b)
    for (auto cell : row) {
      std::sort(cell.begin(), cell.end());
      out += cell + "|";
    }
  return out;
}

// Exhaustive search where any move that would shift text is a no-op.
// true = no winning state reachable, false = reachable, nullopt = state cap hit.
inline std::optional<bool> frozen_unsolvable(const std::string& ascii, std::size_t cap = 50000) {
  auto start = reference::parse(ascii);
  if (wins(start)) return false;
  const auto layout = text_layout(start);
  std::set<std::string> seen{canonical(start)};
  std::deque<reference::Board> frontier{start};
  while (!frontier.empty()) {
    auto b = frontier.front();
    frontier.pop_front();
    for (const char* m : {"UP", "DOWN", "LEFT", "RIGHT"}) {
      auto n = step(b, m);
      if (text_layout(n) != layout) continue;
      if (!seen.insert(canonical(n)).second) continue;
      if (wins(n)) return false;
      if (seen.size() > cap) return std::nullopt;
      frontier.push_back(std::move(n));
    }
  }
  return true;
}

inline std::string icons_only(const reference::Board& b) {
  static const std::string icons = "bfrwlkdax";
  std::string out;
  for (const auto& row : b)
    for (const auto& cell : row) {
      std::string t;
      for (char ch : cell)
        if (icons.find(ch) != std::string::npos) t.push_back(ch);
      std::sort(t.begin(), t.end());
      out += t + "|";
    }
  return out;
}

}  // namespace oracles
