#include "babagrid/planner.hpp"

#include <cmath>
#include <queue>
#include <unordered_set>

#include "babagrid/error.hpp"

namespace babagrid {

std::string_view plan_status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::Solved: return "SOLVED";
    case PlanStatus::Fail: return "FAIL";
    case PlanStatus::BudgetExhausted: return "BUDGET_EXHAUSTED";
  }
  return "?";
}

int heuristic(const GridState& s, const AlphabetConfig& alphabet) {
  const auto sets = property_sets(parse_rules(s, alphabet), alphabet);
  const auto& you = sets.of(Property::You);
  const auto& win = sets.of(Property::Win);
  std::vector<Pos> yous, wins, texts;
  for (int r = 0; r < s.rows(); ++r) {
    for (int c = 0; c < s.cols(); ++c) {
      bool y = false, w = false, t = false;
      for (char ch : s.at(r, c)) {
        y = y || contains_char(you, ch);
        w = w || contains_char(win, ch);
        t = t || alphabet.is_text(ch);
      }
      if (y) yous.push_back({r, c});
      if (w) wins.push_back({r, c});
      if (t) texts.push_back({r, c});
    }
  }
  const auto& goals = wins.empty() ? texts : wins;
  int best = kInfiniteCost;
  for (auto p : yous) {
    for (auto q : goals) best = std::min(best, std::abs(p.row - q.row) + std::abs(p.col - q.col));
  }
  return best;
}

bool replay_wins(const GridState& start, const std::vector<Action>& actions, const DynamicsConfig& cfg) {
  GridState cur = start;
  for (Action a : actions) cur = next_state(cur, a, cfg).next;
  return check_win(cur, cfg);
}

namespace {

struct Node {
  GridState state;
  int g = 0;
  int parent = -1;
  Action action = Action::Up;
};

struct QueueEntry {
  double key;
  std::uint64_t seq;
  int node;
};

struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.seq > b.seq;  // FIFO among equal keys
  }
};

using OracleFor = std::function<TransitionOracle&(const GridState&)>;

PlanResult search(const GridState& start, const OracleFor& oracle_for, const PlannerConfig& config) {
  const auto& budget = config.budget;
  const auto& alphabet = config.dynamics.alpha();
  PlanResult result;

  std::vector<Node> nodes;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;
  std::unordered_set<StateHash> visited;
  std::uint64_t seq = 0;

  nodes.push_back(Node{start, 0, -1, Action::Up});
  visited.insert(hash_state(start));
  {
    int h = heuristic(start, alphabet);
    double key = h == kInfiniteCost ? std::numeric_limits<double>::infinity() : budget.weight * h;
    open.push({key, seq++, 0});
  }

  int solved_node = -1;
  bool exhausted = false;
  while (!open.empty()) {
    if (result.expansions >= budget.max_expansions) {
      exhausted = true;
      break;
    }
    const int id = open.top().node;
    open.pop();
    ++result.expansions;

    TransitionOracle& oracle = oracle_for(nodes[id].state);
    if (oracle.check_win(nodes[id].state)) {
      solved_node = id;
      break;
    }
    if (nodes[id].g >= budget.max_depth) continue;

    const GridState state = std::move(nodes[id].state);
    const int g = nodes[id].g;
    for (Action a : kAllActions) {
      GridState child = oracle.next_state(state, a);
      if (child.rows() != state.rows() || child.cols() != state.cols())
        throw Error(ErrorKind::OracleFailure, "oracle changed grid dimensions");
      if (!visited.insert(hash_state(child)).second) continue;
      const int h = heuristic(child, alphabet);
      if (h == kInfiniteCost) continue;
      nodes.push_back(Node{std::move(child), g + 1, id, a});
      open.push({(g + 1) + budget.weight * h, seq++, static_cast<int>(nodes.size() - 1)});
    }
  }

  if (solved_node < 0) {
    result.status = exhausted ? PlanStatus::BudgetExhausted : PlanStatus::Fail;
    return result;
  }
  for (int id = solved_node; nodes[id].parent >= 0; id = nodes[id].parent) result.actions.push_back(nodes[id].action);
  std::reverse(result.actions.begin(), result.actions.end());
  result.replay_verified = static_cast<int>(result.actions.size()) <= budget.max_depth &&
                           replay_wins(start, result.actions, config.dynamics);
  result.status = result.replay_verified ? PlanStatus::Solved : PlanStatus::Fail;
  return result;
}

}  // namespace

PlanResult plan(const GridState& start, TransitionOracle& oracle, const PlannerConfig& config) {
  return search(start, [&](const GridState&) -> TransitionOracle& { return oracle; }, config);
}

KernelCache::Lookup KernelCache::get_or_synthesize(const RuleSignature& sig, const RuleSet& rules,
                                                   const GridState& context, const Synthesizer& synthesize) {
  std::promise<std::shared_ptr<TransitionOracle>> promise;
  std::shared_future<std::shared_ptr<TransitionOracle>> future;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(sig);
    if (it != entries_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      entries_.emplace(sig, future);
      owner = true;
    }
  }

  if (!owner) {
    auto oracle = future.get();
    hits_.fetch_add(1);
    return {std::move(oracle), true};
  }

  misses_.fetch_add(1);
  try {
    auto oracle = synthesize(sig, rules, context);
    if (!oracle) throw Error(ErrorKind::SynthesisFailure, "synthesizer returned no oracle for signature " + sig.hex());
    promise.set_value(oracle);
    return {std::move(oracle), false};
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      entries_.erase(sig);
    }
    Error failure(ErrorKind::SynthesisFailure, "signature " + sig.hex());
    try {
      throw;
    } catch (const Error& e) {
      failure = e.kind() == ErrorKind::SynthesisFailure ? e : Error(ErrorKind::SynthesisFailure, sig.hex() + ": " + e.what());
    } catch (const std::exception& e) {
      failure = Error(ErrorKind::SynthesisFailure, sig.hex() + ": " + e.what());
    }
    promise.set_exception(std::make_exception_ptr(failure));
    throw failure;
  }
}

std::shared_ptr<TransitionOracle> KernelCache::lookup(const RuleSignature& sig) const {
  std::shared_future<std::shared_ptr<TransitionOracle>> future;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(sig);
    if (it == entries_.end()) return nullptr;
    future = it->second;
  }
  try {
    return future.get();
  } catch (const Error&) {
    return nullptr;
  }
}

void KernelCache::store(const RuleSignature& sig, std::shared_ptr<TransitionOracle> oracle) {
  std::promise<std::shared_ptr<TransitionOracle>> promise;
  promise.set_value(std::move(oracle));
  std::lock_guard lock(mutex_);
  entries_[sig] = promise.get_future().share();
}

std::size_t KernelCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void KernelCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
  hits_ = 0;
  misses_ = 0;
}

KernelCache::Synthesizer native_synthesizer(DynamicsConfig cfg) {
  return [cfg](const RuleSignature&, const RuleSet& rules, const GridState&) -> std::shared_ptr<TransitionOracle> {
    return std::make_shared<FixedRulesOracle>(rules, cfg, Provenance::Cached);
  };
}

PlanResult reactive_plan(const GridState& start, KernelCache& cache, const KernelCache::Synthesizer& synthesize,
                         const PlannerConfig& config) {
  int resyntheses = 0, hits = 0;
  std::unordered_set<RuleSignature> seen;
  std::shared_ptr<TransitionOracle> current;
  auto oracle_for = [&](const GridState& state) -> TransitionOracle& {
    auto rules = parse_rules(state, config.dynamics.alpha());
    auto sig = rule_signature(rules);
    seen.insert(sig);
    auto found = cache.get_or_synthesize(sig, rules, state, synthesize);
    (found.hit ? hits : resyntheses) += 1;
    current = std::move(found.oracle);
    return *current;
  };
  auto result = search(start, oracle_for, config);
  result.resyntheses = resyntheses;
  result.cache_hits = hits;
  result.distinct_signatures = static_cast<int>(seen.size());
  return result;
}

}  // namespace babagrid
