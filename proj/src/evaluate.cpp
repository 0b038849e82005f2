#include "babagrid/evaluate.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

#include "babagrid/error.hpp"
#include "babagrid/parallel.hpp"

namespace babagrid {

std::vector<TierSummary> summarize(const std::vector<LevelEval>& levels) {
  std::map<int, TierSummary> by_tier;
  std::map<int, long> plan_total;
  for (const auto& l : levels) {
    auto& t = by_tier[l.tier];
    t.tier = l.tier;
    ++t.total;
    t.mean_expansions += l.expansions;
    t.mean_resyntheses += l.resyntheses;
    t.mean_seconds += l.seconds;
    if (l.solved()) {
      ++t.solved;
      plan_total[l.tier] += static_cast<long>(l.actions.size());
    }
  }
  std::vector<TierSummary> out;
  for (auto& [tier, t] : by_tier) {
    t.mean_expansions /= t.total;
    t.mean_resyntheses /= t.total;
    t.mean_seconds /= t.total;
    t.mean_plan_length = t.solved ? static_cast<double>(plan_total[tier]) / t.solved : 0.0;
    out.push_back(t);
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels) {
    nlohmann::json actions = nlohmann::json::array();
    for (auto a : l.actions) actions.push_back(std::string(action_name(a)));
    lv.push_back({{"id", l.id},
                  {"tier", l.tier},
                  {"status", l.error ? "ERROR" : std::string(plan_status_name(l.status))},
                  {"solved", l.solved()},
                  {"plan", actions},
                  {"plan_length", l.actions.size()},
                  {"expansions", l.expansions},
                  {"resyntheses", l.resyntheses},
                  {"cache_hits", l.cache_hits},
                  {"distinct_signatures", l.distinct_signatures},
                  {"seconds", l.seconds},
                  {"error", l.error ? nlohmann::json(*l.error) : nlohmann::json(nullptr)}});
  }
  nlohmann::json tv = nlohmann::json::array();
  for (const auto& t : tiers) {
    tv.push_back({{"tier", t.tier},
                  {"total", t.total},
                  {"solved", t.solved},
                  {"success_rate", t.success_rate()},
                  {"success_rational", t.rational()},
                  {"mean_plan_length", t.mean_plan_length},
                  {"mean_expansions", t.mean_expansions},
                  {"mean_resyntheses", t.mean_resyntheses},
                  {"mean_seconds", t.mean_seconds}});
  }
  return {{"tiers", tv},
          {"levels", lv},
          {"cache", {{"size", cache_size}, {"hits", cache_hits}, {"misses", cache_misses}}}};
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %9s %8s %9s %11s %12s\n", "tier", "solved", "SR(%)", "plan_len", "expansions",
                "resyntheses");
  out << line;
  for (const auto& t : tiers) {
    std::snprintf(line, sizeof line, "%-6d %9s %8.1f %9.2f %11.1f %12.2f\n", t.tier, t.rational().c_str(),
                  t.success_rate(), t.mean_plan_length, t.mean_expansions, t.mean_resyntheses);
    out << line;
  }
  return out.str();
}

EvalReport evaluate_levels(const std::vector<Level>& levels, const EvalOptions& options) {
  EvalReport report;
  report.levels.resize(levels.size());
  KernelCache cache;
  KernelCache::Synthesizer synth =
      options.external ? external_synthesizer(*options.external, options.kernel_template, options.planner.dynamics,
                                              options.work_dir, options.timeout)
                       : native_synthesizer(options.planner.dynamics);

  parallel_for(levels.size(), options.jobs, [&](std::size_t i) {
    const auto& level = levels[i];
    auto& out = report.levels[i];
    out.id = level.id;
    out.tier = level.tier;
    auto t0 = std::chrono::steady_clock::now();
    try {
      PlanResult r;
      if (options.oracle_factory || options.frozen_text) {
        std::shared_ptr<TransitionOracle> oracle =
            options.oracle_factory ? options.oracle_factory(level)
                                   : std::make_shared<NativeOracle>(options.planner.dynamics);
        if (options.frozen_text)
          oracle = std::make_shared<FrozenTextOracle>(oracle, options.planner.dynamics.alpha());
        r = plan(level.grid, *oracle, options.planner);
      } else {
        r = reactive_plan(level.grid, cache, synth, options.planner);
      }
      out.status = r.status;
      out.actions = r.actions;
      out.expansions = r.expansions;
      out.resyntheses = r.resyntheses;
      out.cache_hits = r.cache_hits;
      out.distinct_signatures = r.distinct_signatures;
    } catch (const Error& e) {
      out.status = PlanStatus::Fail;
      out.error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  report.tiers = summarize(report.levels);
  report.cache_size = cache.size();
  report.cache_hits = cache.hits();
  report.cache_misses = cache.misses();
  return report;
}

EvalReport evaluate_suite(const std::filesystem::path& manifest_path, const EvalOptions& options,
                          const AlphabetConfig& alphabet) {
  auto manifest = read_manifest(manifest_path);
  std::vector<Level> levels;
  std::vector<LevelEval> broken;
  for (const auto& entry : manifest.entries) {
    try {
      levels.push_back(load_manifest_level(manifest_path, entry, alphabet));
    } catch (const Error& e) {
      LevelEval bad;
      bad.id = entry.id;
      bad.tier = entry.tier;
      bad.error = std::string(error_kind_name(e.kind())) + ": " + e.what();
      broken.push_back(std::move(bad));
    }
  }
  auto report = evaluate_levels(levels, options);
  if (!broken.empty()) {
    report.levels.insert(report.levels.end(), broken.begin(), broken.end());
    report.tiers = summarize(report.levels);
  }
  return report;
}

}  // namespace babagrid
