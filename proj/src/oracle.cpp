#include "babagrid/oracle.hpp"

#include <algorithm>

namespace babagrid {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Native: return "native";
    case Provenance::ExternalKernel: return "external-kernel";
    case Provenance::Cached: return "cached";
  }
  return "?";
}

FixedRulesOracle::FixedRulesOracle(const RuleSet& rules, const DynamicsConfig& cfg, Provenance provenance)
    : sets_(step_sets(property_sets(rules, cfg.alpha()), cfg)), provenance_(provenance) {}

namespace {

bool same_text_layout(const GridState& a, const GridState& b, const AlphabetConfig& alphabet) {
  std::string ta, tb;
  for (std::size_t i = 0; i < a.cells().size(); ++i) {
    ta.clear();
    tb.clear();
    for (char ch : a.cells()[i]) if (alphabet.is_text(ch)) ta.push_back(ch);
    for (char ch : b.cells()[i]) if (alphabet.is_text(ch)) tb.push_back(ch);
    if (ta.size() != tb.size()) return false;
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    if (ta != tb) return false;
  }
  return true;
}

}  // namespace

GridState FrozenTextOracle::next_state(const GridState& g, Action a) {
  auto next = inner_->next_state(g, a);
  if (next.rows() != g.rows() || next.cols() != g.cols() || !same_text_layout(g, next, *alphabet_)) return g;
  return next;
}

}  // namespace babagrid
