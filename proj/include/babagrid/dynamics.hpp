#pragma once

#include "babagrid/grid.hpp"
#include "babagrid/rules.hpp"

namespace babagrid {

struct DynamicsConfig {
  const AlphabetConfig* alphabet = &AlphabetConfig::standard();
  // Text chars that destroy a YOU mover entering their cell.
  CharSet dangerous_text_chars;
  // OPEN movers/push fronts entering a SHUT cell destroy one of each.
  bool open_shut_unlock = true;

  const AlphabetConfig& alpha() const noexcept { return *alphabet; }
};

// The char sets one transition step runs against. Built once per step from the
// rules of the state the step starts in.
struct StepSets {
  CharSet you, win, stop, push, defeat, sink, melt, hot, open, shut, dangerous;
  bool unlock = true;
};

// Negations applied; all text chars join the push set.
StepSets step_sets(const PropertySets& raw, const DynamicsConfig& cfg);
StepSets step_sets_for(const GridState& g, const DynamicsConfig& cfg);

struct StepOutcome {
  GridState next;
  int movers_destroyed = 0;
  int objects_sunk = 0;
  int objects_unlocked = 0;
  bool rules_changed = false;
};

// One transition under fixed char sets. rules_changed is left false; it only
// has meaning when the sets came from the grid itself (see next_state).
StepOutcome step(const GridState& g, Action a, const StepSets& sets);

// Ground-truth transition: rules parsed from g, snapshot for the whole step.
StepOutcome next_state(const GridState& g, Action a, const DynamicsConfig& cfg = {});

bool check_win(const GridState& g, const StepSets& sets);
bool check_win(const GridState& g, const DynamicsConfig& cfg = {});

// No cell holds a YOU char.
bool is_lost(const GridState& g, const DynamicsConfig& cfg = {});

}  // namespace babagrid
