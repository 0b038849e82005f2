#include <deque>
#include <random>
#include <thread>
#include <unordered_map>

#include "babagrid/error.hpp"
#include "babagrid/planner.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace babagrid;

namespace {

// Exhaustive breadth-first oracle for optimal plan lengths.
int bfs_optimal(const GridState& start, int max_depth, std::size_t max_states = 200000) {
  if (check_win(start)) return 0;
  std::unordered_map<StateHash, int> seen{{hash_state(start), 0}};
  std::deque<std::pair<GridState, int>> frontier{{start, 0}};
  while (!frontier.empty() && seen.size() < max_states) {
    auto [s, d] = frontier.front();
    frontier.pop_front();
    if (d >= max_depth) continue;
    for (Action a : kAllActions) {
      auto n = next_state(s, a).next;
      if (!seen.emplace(hash_state(n), d + 1).second) continue;
      if (check_win(n)) return d + 1;
      frontier.emplace_back(std::move(n), d + 1);
    }
  }
  return -1;
}

int brute_heuristic(const GridState& s) {
  auto sets = property_sets(parse_rules(s));
  std::vector<Pos> you, win, text;
  for (int r = 0; r < s.rows(); ++r)
    for (int c = 0; c < s.cols(); ++c)
      for (char ch : s.at(r, c)) {
        if (contains_char(sets.of(Property::You), ch)) you.push_back({r, c});
        if (contains_char(sets.of(Property::Win), ch)) win.push_back({r, c});
        if (AlphabetConfig::standard().is_text(ch)) text.push_back({r, c});
      }
  const auto& goal = win.empty() ? text : win;
  int best = kInfiniteCost;
  for (auto p : you)
    for (auto q : goal) best = std::min(best, std::abs(p.row - q.row) + std::abs(p.col - q.col));
  return best;
}

class CountingOracle final : public TransitionOracle {
 public:
  GridState next_state(const GridState& g, Action a) override {
    ++calls;
    return babagrid::next_state(g, a).next;
  }
  bool check_win(const GridState& g) override { return babagrid::check_win(g); }
  Provenance provenance() const override { return Provenance::ExternalKernel; }
  int calls = 0;
};

// A broken kernel that ignores WIN: plans it reports will not replay.
class LyingOracle final : public TransitionOracle {
 public:
  GridState next_state(const GridState& g, Action a) override { return babagrid::next_state(g, a).next; }
  bool check_win(const GridState&) override { return true; }
  Provenance provenance() const override { return Provenance::ExternalKernel; }
};

}  // namespace

TEST_CASE("heuristic examples") {
  CHECK(heuristic(fixtures::level00()) == 2);
  CHECK(heuristic(parse_ascii("B = Y\nF = W\nbf . .")) == 0);
  // no WIN rule: distance to the nearest text block
  auto g = parse_ascii("B = Y . . .\n. . . . . .\n. . . . . .\n. . . . . b");
  CHECK(heuristic(g) == 3 + 3);
  auto near = parse_ascii("B = Y . . .\n. . . . . .\n. . . . . .\n. . b . . .");
  CHECK(heuristic(near) == 3);
  CHECK(heuristic(parse_ascii("b . f")) == kInfiniteCost);
}

TEST_CASE("heuristic equals the brute-force pairwise minimum") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto g = fixtures::random_play_grid(rng, 7, 7, 4);
    REQUIRE(heuristic(g) == brute_heuristic(g));
  }
}

TEST_CASE("Level 0-0 solves optimally") {
  NativeOracle oracle;
  auto result = plan(fixtures::level00(), oracle);
  REQUIRE(result.solved());
  CHECK(result.replay_verified);
  CHECK(result.expansions <= 2000);
  CHECK(static_cast<int>(result.actions.size()) == bfs_optimal(fixtures::level00(), 60));
  CHECK(result.actions == std::vector<Action>{Action::Right, Action::Right});
}

TEST_CASE("already winning start") {
  NativeOracle oracle;
  auto result = plan(parse_ascii("B = Y\nF = W\nbf . ."), oracle);
  CHECK(result.solved());
  CHECK(result.actions.empty());
  CHECK(result.expansions == 1);
}

TEST_CASE("unreachable goal fails, tiny budget exhausts") {
  NativeOracle oracle;
  auto boxed = parse_ascii(
      "B = Y . . .\nF = W . . .\n. . . . . .\n. # = S . .\n. . . . . .\n. w w w . .\n. w f w . .\n. w w w . b");
  // the text is reachable, so the frozen variant is the real dead end
  FrozenTextOracle frozen(std::make_shared<NativeOracle>());
  auto fail = plan(boxed, frozen);
  CHECK(fail.status == PlanStatus::Fail);

  PlannerConfig tiny;
  tiny.budget.max_expansions = 3;
  auto exhausted = plan(boxed, oracle, tiny);
  CHECK(exhausted.status == PlanStatus::BudgetExhausted);
  CHECK(exhausted.expansions == 3);

  auto full = plan(boxed, oracle);
  CHECK(full.solved());
}

TEST_CASE("plans replay, respect depth, and never re-expand a state") {
  std::mt19937_64 rng(8080);
  int solved = 0;
  for (int i = 0; i < 60; ++i) {
    auto g = fixtures::random_play_grid(rng, 6, 6, 3);
    g.at(5, 5) = "F";  // nudge towards WIN rules existing somewhere
    CountingOracle oracle;
    PlannerConfig cfg;
    cfg.budget.max_depth = 12;
    auto result = plan(g, oracle, cfg);
    CHECK(result.expansions <= cfg.budget.max_expansions);
    CHECK(oracle.calls <= 4 * result.expansions);
    if (result.solved()) {
      ++solved;
      CHECK(static_cast<int>(result.actions.size()) <= 12);
      CHECK(replay_wins(g, result.actions));
      int best = bfs_optimal(g, 12);
      CHECK(best >= 0);
      CHECK(static_cast<int>(result.actions.size()) >= best);
    }
  }
  MESSAGE("solved " << solved << " of 60 random grids");
}

TEST_CASE("external-oracle plans are replay-verified") {
  LyingOracle liar;
  auto result = plan(parse_ascii("B = Y\nF = W\nb . f"), liar);
  CHECK_FALSE(result.solved());
  CHECK_FALSE(result.replay_verified);
}

TEST_CASE("a degenerate oracle that never moves cannot solve") {
  StuckOracle stuck;
  CHECK(plan(fixtures::level00(), stuck).status == PlanStatus::Fail);
}

TEST_CASE("weighted heuristic is exposed") {
  NativeOracle oracle;
  PlannerConfig cfg;
  cfg.budget.weight = 3.0;
  CHECK(plan(fixtures::level00(), oracle, cfg).solved());
}

TEST_CASE("kernel cache") {
  KernelCache cache;
  auto synth = native_synthesizer();
  int calls = 0;
  KernelCache::Synthesizer counted = [&](const RuleSignature& s, const RuleSet& r, const GridState& g) {
    ++calls;
    return synth(s, r, g);
  };

  SUBCASE("single-signature level synthesizes once") {
    auto g = parse_ascii("B = Y . . .\nF = W . . .\n. . . . . .\nb . . . . f");
    auto first = reactive_plan(g, cache, counted);
    CHECK(first.solved());
    CHECK(first.resyntheses == 1);
    CHECK(first.distinct_signatures == 1);
    auto again = reactive_plan(g, cache, counted);
    CHECK(again.resyntheses == 0);
    CHECK(again.cache_hits == again.expansions);
    CHECK(calls == 1);
  }

  SUBCASE("rule edits resynthesize once per distinct signature") {
    auto g = parse_ascii("B = Y . . . .\nF = W . . . .\n. . . . . . .\n. # = S . . .\n. . b . w w w\n. . . . w f w\n. . . . w w w");
    auto first = reactive_plan(g, cache, counted);
    REQUIRE(first.solved());
    CHECK(first.resyntheses == first.distinct_signatures);
    CHECK(first.distinct_signatures >= 2);
    auto again = reactive_plan(g, cache, counted);
    CHECK(again.resyntheses == 0);
    CHECK(again.actions == first.actions);
    CHECK(cache.size() == static_cast<std::size_t>(first.distinct_signatures));
  }

  SUBCASE("synthesis failures surface and are retried") {
    KernelCache::Synthesizer broken = [](const RuleSignature&, const RuleSet&, const GridState&) -> std::shared_ptr<TransitionOracle> {
      throw std::runtime_error("model output did not compile");
    };
    auto g = fixtures::level00();
    CHECK_THROWS_AS(reactive_plan(g, cache, broken), Error);
    CHECK(cache.size() == 0);
    CHECK(reactive_plan(g, cache, counted).solved());
  }

  SUBCASE("concurrent get-or-insert synthesizes once") {
    std::atomic<int> n{0};
    KernelCache::Synthesizer slow = [&](const RuleSignature& s, const RuleSet& r, const GridState& g) {
      ++n;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      return synth(s, r, g);
    };
    auto rules = parse_rules(fixtures::level00());
    auto sig = rule_signature(rules);
    std::vector<std::thread> threads;
    std::atomic<int> hits{0};
    for (int i = 0; i < 8; ++i)
      threads.emplace_back([&] { hits += cache.get_or_synthesize(sig, rules, fixtures::level00(), slow).hit; });
    for (auto& t : threads) t.join();
    CHECK(n == 1);
    CHECK(hits == 7);
    CHECK(cache.lookup(sig) != nullptr);
  }
}
