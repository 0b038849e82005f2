#include "babagrid/dynamics.hpp"

#include <algorithm>
#include <tuple>

namespace babagrid {

StepSets step_sets(const PropertySets& raw, const DynamicsConfig& cfg) {
  const auto sets = apply_negations(raw);
  StepSets s;
  s.you = sets.of(Property::You);
  s.win = sets.of(Property::Win);
  s.stop = sets.of(Property::Stop);
  s.push = sets.of(Property::Push);
  for (char ch : cfg.alpha().text_chars()) s.push.set(static_cast<unsigned char>(ch));
  s.defeat = sets.of(Property::Defeat);
  s.sink = sets.of(Property::Sink);
  s.melt = sets.of(Property::Melt);
  s.hot = sets.of(Property::Hot);
  s.open = sets.of(Property::Open);
  s.shut = sets.of(Property::Shut);
  s.dangerous = cfg.dangerous_text_chars;
  s.unlock = cfg.open_shut_unlock;
  return s;
}

StepSets step_sets_for(const GridState& g, const DynamicsConfig& cfg) {
  return step_sets(property_sets(parse_rules(g, cfg.alpha()), cfg.alpha()), cfg);
}

namespace {

bool any_in(const std::string& cell, const CharSet& set) {
  return std::any_of(cell.begin(), cell.end(), [&](char ch) { return contains_char(set, ch); });
}

// Index of the first char of `cell` in `set`, or npos.
std::size_t first_in(const std::string& cell, const CharSet& set) {
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (contains_char(set, cell[i])) return i;
  }
  return std::string::npos;
}

void remove_one(std::string& cell, char ch) {
  auto at = cell.find(ch);
  if (at != std::string::npos) cell.erase(at, 1);
}

}  // namespace

StepOutcome step(const GridState& g, Action a, const StepSets& sets) {
  StepOutcome out{g};
  GridState& grid = out.next;
  const auto [dr, dc] = delta(a);

  std::vector<std::tuple<int, int, char>> movers;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      for (char ch : grid.at(r, c)) {
        if (contains_char(sets.you, ch)) movers.emplace_back(r, c, ch);
      }
    }
  }
  if (movers.empty()) return out;
  std::sort(movers.begin(), movers.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
    return static_cast<unsigned char>(std::get<2>(x)) < static_cast<unsigned char>(std::get<2>(y));
  });

  std::vector<Pos> chain;
  for (const auto& [r, c, me] : movers) {
    if (grid.at(r, c).find(me) == std::string::npos) continue;
    const Pos target{r + dr, c + dc};
    if (!grid.in_bounds(target)) continue;

    if (any_in(grid.at(target), sets.push)) {
      chain.clear();
      Pos cur = target;
      bool can_push = true;
      bool unlock_front = false;
      while (true) {
        if (!grid.in_bounds(cur)) {
          can_push = false;
          break;
        }
        const auto& here = grid.at(cur);
        if (!any_in(here, sets.push)) {
          // Chain terminal: a SHUT cell opens for an OPEN front, else STOP blocks.
          const auto& front = grid.at(chain.back());
          unlock_front = sets.unlock && any_in(here, sets.shut) &&
                         std::any_of(front.begin(), front.end(), [&](char ch) {
                           return contains_char(sets.push, ch) && contains_char(sets.open, ch);
                         });
          if (any_in(here, sets.stop) && !unlock_front) can_push = false;
          break;
        }
        chain.push_back(cur);
        cur = Pos{cur.row + dr, cur.col + dc};
      }
      if (!can_push) continue;

      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const Pos dest{it->row + dr, it->col + dc};
        std::string moving, staying;
        for (char ch : grid.at(*it)) (contains_char(sets.push, ch) ? moving : staying).push_back(ch);
        grid.at(*it) = std::move(staying);
        auto& dest_cell = grid.at(dest);
        dest_cell += moving;
        if (it == chain.rbegin() && unlock_front) {
          char key = moving[first_in(moving, sets.open)];
          auto door = first_in(dest_cell, sets.shut);
          dest_cell.erase(door, 1);
          remove_one(dest_cell, key);
          out.objects_unlocked += 2;
        }
      }
    }

    auto& source = grid.at(r, c);
    auto& dest = grid.at(target);
    const bool opens = sets.unlock && contains_char(sets.open, me) && any_in(dest, sets.shut);

    if (any_in(dest, sets.stop) && !opens) continue;

    if (opens) {
      remove_one(source, me);
      dest.erase(first_in(dest, sets.shut), 1);
      out.movers_destroyed += 1;
      out.objects_unlocked += 1;
      continue;
    }
    if (any_in(dest, sets.dangerous) || any_in(dest, sets.defeat)) {
      remove_one(source, me);
      out.movers_destroyed += 1;
      continue;
    }
    if (auto sink_at = first_in(dest, sets.sink); sink_at != std::string::npos) {
      remove_one(source, me);
      dest.erase(sink_at, 1);
      out.movers_destroyed += 1;
      out.objects_sunk += 1;
      continue;
    }
    if (contains_char(sets.melt, me) && any_in(dest, sets.hot)) {
      remove_one(source, me);
      out.movers_destroyed += 1;
      continue;
    }
    remove_one(source, me);
    dest.push_back(me);
  }
  return out;
}

StepOutcome next_state(const GridState& g, Action a, const DynamicsConfig& cfg) {
  const auto before = parse_rules(g, cfg.alpha());
  auto out = step(g, a, step_sets(property_sets(before, cfg.alpha()), cfg));
  out.rules_changed = rule_signature(parse_rules(out.next, cfg.alpha())) != rule_signature(before);
  return out;
}

bool check_win(const GridState& g, const StepSets& sets) {
  for (const auto& cell : g.cells()) {
    if (any_in(cell, sets.you) && any_in(cell, sets.win)) return true;
  }
  return false;
}

bool check_win(const GridState& g, const DynamicsConfig& cfg) { return check_win(g, step_sets_for(g, cfg)); }

bool is_lost(const GridState& g, const DynamicsConfig& cfg) {
  const auto sets = step_sets_for(g, cfg);
  return std::none_of(g.cells().begin(), g.cells().end(), [&](const std::string& cell) { return any_in(cell, sets.you); });
}

}  // namespace babagrid
