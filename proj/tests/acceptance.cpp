// Acceptance run: one PASS/FAIL line per headline property, each checked
// against the independent oracles in tests/support.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "babagrid/error.hpp"
#include "babagrid/evaluate.hpp"
#include "babagrid/io.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/parallel.hpp"
#include "babagrid/planner.hpp"
#include "babagrid/probes.hpp"
#include "babagrid/sft.hpp"
#include "babagrid/verify.hpp"
#include "support/endpoints.hpp"
#include "support/fixtures.hpp"
#include "support/level_oracles.hpp"
#include "support/reference_kernel.hpp"

using namespace babagrid;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::string> move_names(const std::vector<Action>& actions) {
  std::vector<std::string> out;
  for (auto a : actions) out.emplace_back(action_name(a));
  return out;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("babagrid-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Shortest winning move count under the reference interpreter, -1 if none
// within max_depth.
int reference_bfs(const std::string& ascii, int max_depth) {
  auto start = reference::parse(ascii);
  if (oracles::wins(start)) return 0;
  std::set<std::string> seen{oracles::canonical(start)};
  std::deque<std::pair<reference::Board, int>> frontier{{start, 0}};
  while (!frontier.empty()) {
    auto [b, d] = frontier.front();
    frontier.pop_front();
    if (d >= max_depth) continue;
    for (const char* m : {"UP", "DOWN", "LEFT", "RIGHT"}) {
      auto n = oracles::step(b, m);
      if (!seen.insert(oracles::canonical(n)).second) continue;
      if (oracles::wins(n)) return d + 1;
      frontier.emplace_back(std::move(n), d + 1);
    }
  }
  return -1;
}

// Shortest action sequence (<= max_len) after which the two boards' icons differ.
int reference_divergence(const std::string& a, const std::string& b, int max_len) {
  using Pair = std::pair<reference::Board, reference::Board>;
  std::deque<std::pair<Pair, int>> frontier{{{reference::parse(a), reference::parse(b)}, 0}};
  std::set<std::string> seen;
  while (!frontier.empty()) {
    auto [p, d] = frontier.front();
    frontier.pop_front();
    if (d >= max_len) continue;
    for (const char* m : {"UP", "DOWN", "LEFT", "RIGHT"}) {
      Pair n{oracles::step(p.first, m), oracles::step(p.second, m)};
      if (oracles::icons_only(n.first) != oracles::icons_only(n.second)) return d + 1;
      if (!seen.insert(oracles::canonical(n.first) + "#" + oracles::canonical(n.second)).second) continue;
      frontier.emplace_back(std::move(n), d + 1);
    }
  }
  return -1;
}

// --- criteria ----------------------------------------------------------------

Outcome engine_equivalence() {
  auto t0 = Clock::now();
  SampleSpec spec{4000, {1, 2, 3, 4, 5, 6, 7, 8}, {1, 2, 3}};
  auto samples = sample_states(spec, GenParams{});
  std::size_t mismatches = 0;
  for (const auto& s : samples) {
    auto ascii = encode_ascii(s.state);
    auto mine = encode_ascii(next_state(s.state, s.action).next);
    if (mine != reference::step_ascii(ascii, std::string(action_name(s.action)))) ++mismatches;
  }
  double secs = seconds_since(t0);
  bool ok = samples.size() >= 4000 && mismatches == 0 && secs < 10.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%zu samples across tiers 1-3, %zu mismatches, %.2f s (limit 10 s)", samples.size(), mismatches, secs)};
}

Outcome rule_parsing() {
  auto rules = parse_rules(fixtures::level00()).to_strings();
  std::set<std::string> got(rules.begin(), rules.end());
  std::set<std::string> want{"BABA IS YOU", "FLAG IS WIN", "ROCK IS PUSH", "WALL IS STOP"};
  std::mt19937_64 rng(2024);
  int disagree = 0;
  const std::string pool = "BFO#LKDAX=YWSPENMHGCVZ==bfrw";
  for (int i = 0; i < 500; ++i) {
    auto g = fixtures::random_grid(rng, 3 + static_cast<int>(rng() % 6), 3 + static_cast<int>(rng() % 6), pool, 0.3);
    auto lib = parse_rules(g).to_strings();
    if (std::set<std::string>(lib.begin(), lib.end()) != reference::brute_force_rules(reference::parse(encode_ascii(g))))
      ++disagree;
  }
  bool ok = got == want && disagree == 0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("Level 0-0 rules %s; %d of 500 random grids disagree with the triple scanner",
              got == want ? "exact" : "WRONG", disagree)};
}

Outcome golden_solve() {
  auto g = fixtures::level00();
  NativeOracle oracle;
  auto r = plan(g, oracle);
  auto replay = oracles::replay(fixtures::kLevel00, move_names(r.actions));
  int optimal = reference_bfs(fixtures::kLevel00, 60);
  bool ok = r.solved() && r.expansions <= 2000 && replay.won && static_cast<int>(r.actions.size()) == optimal;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("%s in %d expansions, plan length %zu, BFS optimum %d, replay %s",
              std::string(plan_status_name(r.status)).c_str(), r.expansions, r.actions.size(), optimal,
              replay.won ? "wins" : "LOSES")};
}

Outcome tier_semantics() {
  auto t0 = Clock::now();
  auto spec = SuiteSpec::standard(20240601);
  std::vector<Level> levels;
  try {
    levels = generate_suite(spec, default_jobs());
  } catch (const Error& e) {
    return {Verdict::Fail, std::string("generation failed: ") + e.what()};
  }
  std::vector<int> bad(levels.size(), 0);
  parallel_for(levels.size(), default_jobs(), [&](std::size_t i) {
    const auto& lv = levels[i];
    auto ascii = encode_ascii(lv.grid);
    auto check = validate_level(lv, GenParams{});
    auto replay = oracles::replay(ascii, move_names(check.plan.actions));
    bool ok = check.ok && replay.won;
    auto rules = oracles::rules_of(ascii);
    std::size_t contradicting = 0;
    for (const auto& rule : rules) contradicting += !oracles::aligned(rule);
    if (lv.tier == 1) ok = ok && contradicting == 0;
    if (lv.tier == 2) ok = ok && contradicting >= 1;
    if (lv.tier == 3) {
      auto frozen = oracles::frozen_unsolvable(ascii, 200000);
      ok = ok && frozen.value_or(false) && replay.rules_changed;
    }
    bad[i] = !ok;
  });
  std::map<int, std::pair<int, int>> per_tier;  // tier -> (good, total)
  for (std::size_t i = 0; i < levels.size(); ++i) {
    auto& t = per_tier[levels[i].tier];
    t.first += !bad[i];
    ++t.second;
  }
  double secs = seconds_since(t0);
  bool ok = per_tier[1] == std::pair{45, 45} && per_tier[2] == std::pair{45, 45} && per_tier[3] == std::pair{50, 50} &&
            secs < 300.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("tier 1 %d/%d aligned+solvable, tier 2 %d/%d contradicting+solvable, tier 3 %d/%d "
              "frozen-unsolvable+rule-edit solvable, %.1f s (limit 300 s)",
              per_tier[1].first, per_tier[1].second, per_tier[2].first, per_tier[2].second, per_tier[3].first,
              per_tier[3].second, secs)};
}

Outcome counterfactual_pairing() {
  GenParams p;
  int good = 0, total = 45, longest = 0;
  for (int i = 0; i < total; ++i) {
    CounterfactualPair pair;
    try {
      pair = generate_pair(2, level_seed(7, 0, 2, true, static_cast<std::size_t>(i)), p);
    } catch (const Error&) {
      continue;
    }
    auto a = encode_ascii(pair.plus_level.grid), b = encode_ascii(pair.minus_level.grid);
    bool same_icons = oracles::icons_only(reference::parse(a)) == oracles::icons_only(reference::parse(b));
    int w = reference_divergence(a, b, 3);
    longest = std::max(longest, w);
    good += same_icons && w > 0;
  }
  return {good == total ? Verdict::Pass : Verdict::Fail,
          fmt("%d/%d tier-2 pairs share icons and diverge within 3 steps (longest shortest witness %d)", good, total,
              longest)};
}

Outcome cache_behavior() {
  // Levels whose solutions edit rules, plus Level 0-0.
  std::vector<Level> levels;
  GenParams p;
  for (std::uint64_t seed = 1; seed <= 12; ++seed) levels.push_back(generate_level(3, seed, p));
  levels.push_back({"level-0-0", fixtures::level00()});
  int bad = 0, signatures = 0;
  for (const auto& lv : levels) {
    KernelCache cache;
    std::set<std::set<std::string>> seen_rules;
    int calls = 0;
    auto native = native_synthesizer();
    KernelCache::Synthesizer counted = [&](const RuleSignature& s, const RuleSet& r, const GridState& g) {
      ++calls;
      seen_rules.insert(reference::brute_force_rules(reference::parse(encode_ascii(g))));
      return native(s, r, g);
    };
    auto first = reactive_plan(lv.grid, cache, counted);
    auto again = reactive_plan(lv.grid, cache, counted);
    signatures += first.distinct_signatures;
    bool ok = first.solved() && first.resyntheses == first.distinct_signatures &&
              first.resyntheses == static_cast<int>(seen_rules.size()) && calls == first.resyntheses &&
              again.resyntheses == 0 && again.actions == first.actions;
    bad += !ok;
  }
  return {bad == 0 ? Verdict::Pass : Verdict::Fail,
          fmt("%zu levels, %d distinct signatures; first plans resynthesize once per signature, replans 0 times "
              "(%d violations)",
              levels.size(), signatures, bad)};
}

Outcome delta_p_arithmetic() {
  std::vector<std::string> failures;
  auto dir = scratch("probes");
  ProbeOptions opt;
  opt.seed = 11;
  auto recs_file = dir / "probes.jsonl";
  std::size_t count = 0;
  try {
    count = export_probes(probe_candidates(11, 376, GenParams{}, default_jobs()), opt, recs_file);
  } catch (const Error& e) {
    return {Verdict::Fail, std::string("probe export failed: ") + e.what()};
  }
  auto records = read_probe_records(recs_file);
  if (count != 90 || records.size() != 90) failures.push_back("expected 90 records");

  auto line_for = [](const ProbeRecord& r, double pl, double pp) {
    nlohmann::json m = nlohmann::json::object();
    double rest = (1.0 - pl - pp) / 2.0;
    for (auto a : r.candidate_actions) m[std::string(action_name(a))] = rest;
    m[std::string(action_name(r.logic_action))] = pl;
    m[std::string(action_name(r.prior_action))] = pp;
    return nlohmann::json{{"scenario_id", r.scenario_id},
                          {"modality", std::string(modality_name(r.modality))},
                          {"model_tag", "synthetic"},
                          {"probabilities", m}};
  };

  const auto& r0 = records.front();
  auto exact = score_probes({r0}, {line_for(r0, 0.6, 0.4)}).scores.at(0).delta_p;
  if (std::abs(exact - 0.2) > 1e-15) failures.push_back("0.6/0.4 does not give 0.2");
  if (score_probes({r0}, {line_for(r0, 0.25, 0.25)}).scores.at(0).delta_p != 0.0)
    failures.push_back("uniform is not 0");

  // Synthetic per-record gaps whose natural-language mean is -0.183.
  std::mt19937_64 rng(5);
  std::vector<nlohmann::json> lines;
  std::map<Modality, double> sum;
  std::map<Modality, int> n;
  std::vector<double> jitter;
  for (std::size_t i = 0; i < records.size(); i += 2) jitter.push_back(static_cast<double>(rng() % 1000) / 10000.0);
  double mean_jitter = 0.0;
  for (double j : jitter) mean_jitter += j / static_cast<double>(jitter.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    double d = r.modality == Modality::NaturalLanguage ? -0.183 + jitter[i / 2] - mean_jitter : 0.1 - jitter[i / 2];
    sum[r.modality] += d;
    ++n[r.modality];
    lines.push_back(line_for(r, 0.3 + d / 2, 0.3 - d / 2));
  }
  auto scored = score_probes(records, lines);
  for (const auto& agg : scored.aggregates) {
    double want = sum[agg.modality] / n[agg.modality];
    if (std::abs(agg.mean_delta_p - want) > 1e-12) failures.push_back("aggregate round trip off");
  }
  if (scored.to_table().find("-0.183") == std::string::npos) failures.push_back("table does not print -0.183");

  // Antisymmetry over the same lines with logic/prior swapped.
  auto swapped = records;
  for (auto& r : swapped) std::swap(r.logic_action, r.prior_action);
  auto flipped = score_probes(swapped, lines);
  for (std::size_t i = 0; i < scored.scores.size(); ++i)
    if (flipped.scores[i].delta_p != -scored.scores[i].delta_p) {
      failures.push_back("label swap does not negate");
      break;
    }

  std::string detail = fmt("90 records scored; dP(0.6,0.4)=%.15g, uniform=0, antisymmetric, means to 1e-12", exact);
  if (!failures.empty()) detail = failures.front();
  return {failures.empty() ? Verdict::Pass : Verdict::Fail, detail};
}

Outcome sft_gate() {
  if (!endpoints::have_python())
    return {Verdict::Skip, "no python3 found to serve rendered kernels"};
  auto t0 = Clock::now();
  auto dir = scratch("sft");
  GenParams p;
  auto pairs = generate_pairs(300, 17, p, default_jobs());
  auto verify = endpoint_verifier(EndpointSpec::parse(endpoints::python_kernel()), {}, dir);
  std::atomic<std::size_t> kernels{0}, rejected{0};
  // The gate itself, with a counting wrapper to confirm every kernel was checked.
  KernelVerifier counted = [&](const std::string& src, const RuleSet& rules, const std::vector<Sample>& samples) {
    auto report = verify(src, rules, samples);
    ++kernels;
    rejected += !report.passed() || report.samples == 0;
    return report;
  };
  std::size_t count = 0;
  SftOptions opt;
  opt.jobs = default_jobs();
  try {
    count = export_sft_corpus(pairs, KernelTemplate::reference(), counted, dir / "sft.jsonl", opt);
  } catch (const Error& e) {
    return {Verdict::Fail, std::string(error_kind_name(e.kind())) + ": " + e.what()};
  }
  std::istringstream in(read_file(dir / "sft.jsonl"));
  std::vector<nlohmann::json> recs;
  for (std::string l; std::getline(in, l);) recs.push_back(nlohmann::json::parse(l));
  int shape_errors = 0;
  for (std::size_t i = 0; i + 1 < recs.size(); i += 2)
    shape_errors += !(recs[i]["pair_id"] == recs[i + 1]["pair_id"] && recs[i]["grid_ascii"] == recs[i + 1]["grid_ascii"] &&
                      recs[i]["kernel"] != recs[i + 1]["kernel"]);
  double secs = seconds_since(t0);
  bool ok = pairs.size() == 300 && count == 600 && recs.size() == 600 && kernels == 600 && rejected == 0 &&
            shape_errors == 0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          fmt("300 pairs -> %zu records; %zu kernels verified, %zu rejected, %d pair-shape errors, %.1f s", count,
              kernels.load(), rejected.load(), shape_errors, secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"engine-oracle-equivalence", engine_equivalence},
      {"rule-parsing", rule_parsing},
      {"planner-golden-solve", golden_solve},
      {"tier-semantics", tier_semantics},
      {"counterfactual-pairing", counterfactual_pairing},
      {"cache-behavior", cache_behavior},
      {"delta-p-arithmetic", delta_p_arithmetic},
      {"sft-export-gate", sft_gate},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    failed += o.verdict == Verdict::Fail;
    std::printf("%s  %-26s %s\n", tag, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
