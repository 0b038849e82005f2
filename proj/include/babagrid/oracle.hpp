#pragma once

#include <memory>
#include <string_view>

#include "babagrid/dynamics.hpp"

namespace babagrid {

enum class Provenance { Native, ExternalKernel, Cached };

std::string_view provenance_name(Provenance p);

// Anything the planner can query for (next_state, check_win).
class TransitionOracle {
 public:
  virtual ~TransitionOracle() = default;
  virtual GridState next_state(const GridState& g, Action a) = 0;
  virtual bool check_win(const GridState& g) = 0;
  virtual Provenance provenance() const = 0;
};

// The ground-truth engine; rules re-parsed on every call.
class NativeOracle final : public TransitionOracle {
 public:
  explicit NativeOracle(DynamicsConfig cfg = {}) : cfg_(std::move(cfg)) {}
  GridState next_state(const GridState& g, Action a) override { return babagrid::next_state(g, a, cfg_).next; }
  bool check_win(const GridState& g) override { return babagrid::check_win(g, cfg_); }
  Provenance provenance() const override { return Provenance::Native; }

 private:
  DynamicsConfig cfg_;
};

// Physics compiled for one rule set, like a synthesized kernel: the char sets
// are constants and are not re-derived from the grid.
class FixedRulesOracle final : public TransitionOracle {
 public:
  FixedRulesOracle(const RuleSet& rules, const DynamicsConfig& cfg, Provenance provenance = Provenance::Cached);
  GridState next_state(const GridState& g, Action a) override { return step(g, a, sets_).next; }
  bool check_win(const GridState& g) override { return babagrid::check_win(g, sets_); }
  Provenance provenance() const override { return provenance_; }

 private:
  StepSets sets_;
  Provenance provenance_;
};

// Wraps another oracle and turns every transition that would move a text
// block into a no-op.
class FrozenTextOracle final : public TransitionOracle {
 public:
  FrozenTextOracle(std::shared_ptr<TransitionOracle> inner, const AlphabetConfig& alphabet = AlphabetConfig::standard())
      : inner_(std::move(inner)), alphabet_(&alphabet) {}
  GridState next_state(const GridState& g, Action a) override;
  bool check_win(const GridState& g) override { return inner_->check_win(g); }
  Provenance provenance() const override { return inner_->provenance(); }

 private:
  std::shared_ptr<TransitionOracle> inner_;
  const AlphabetConfig* alphabet_;
};

// Ignores the action and hands back its input. Useful as a degenerate baseline.
class StuckOracle final : public TransitionOracle {
 public:
  GridState next_state(const GridState& g, Action) override { return g; }
  bool check_win(const GridState& g) override { return babagrid::check_win(g); }
  Provenance provenance() const override { return Provenance::ExternalKernel; }
};

}  // namespace babagrid
