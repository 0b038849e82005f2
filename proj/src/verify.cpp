#include "babagrid/verify.hpp"

#include <atomic>
#include <random>
#include <unordered_map>

#include <unistd.h>

#include "babagrid/error.hpp"
#include "babagrid/hash.hpp"
#include "babagrid/io.hpp"

namespace babagrid {

std::vector<Sample> walk_samples(const GridState& start, int n, std::uint64_t seed, const DynamicsConfig& cfg,
                                 int max_walk) {
  std::vector<Sample> out;
  std::mt19937_64 rng(seed);
  GridState cur = start;
  int steps = 0;
  while (static_cast<int>(out.size()) < n) {
    Action a = kAllActions[rng() % 4];
    out.push_back({cur, a});
    auto next = next_state(cur, a, cfg).next;
    ++steps;
    // Restart from the level whenever the walk dies, wins or runs long.
    if (steps >= max_walk || is_lost(next, cfg) || check_win(next, cfg)) {
      cur = start;
      steps = 0;
    } else {
      cur = std::move(next);
    }
  }
  return out;
}

std::vector<Sample> sample_states(const SampleSpec& spec, const GenParams& params) {
  std::vector<Sample> out;
  if (spec.n_states <= 0 || spec.seeds.empty() || spec.tiers.empty()) return out;
  std::vector<Level> levels;
  for (auto seed : spec.seeds)
    for (int tier : spec.tiers) levels.push_back(generate_level(tier, seed, params));
  const int per = (spec.n_states + static_cast<int>(levels.size()) - 1) / static_cast<int>(levels.size());
  for (std::size_t i = 0; i < levels.size() && static_cast<int>(out.size()) < spec.n_states; ++i) {
    int take = std::min(per, spec.n_states - static_cast<int>(out.size()));
    auto part = walk_samples(levels[i].grid, take, splitmix64(levels[i].seed ^ (i + 1)), params.dynamics,
                             spec.max_walk);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& m : mismatches) {
    list.push_back({{"state", m.state_ascii},
                    {"action", std::string(action_name(m.action))},
                    {"op", m.op},
                    {"expected", m.expected},
                    {"got", m.got}});
  }
  return {{"samples", samples}, {"mismatch_count", mismatches.size()}, {"passed", passed()}, {"mismatches", list}};
}

VerificationReport verify_kernel(KernelClient& client, const std::vector<Sample>& samples, const DynamicsConfig& cfg,
                                 const std::optional<RuleSet>& kernel_rules) {
  VerificationReport report;
  std::optional<StepSets> fixed;
  if (kernel_rules) fixed = step_sets(property_sets(*kernel_rules, cfg.alpha()), cfg);
  const auto& alpha = cfg.alpha();
  for (const auto& s : samples) {
    ++report.samples;
    GridState expected = fixed ? step(s.state, s.action, *fixed).next : next_state(s.state, s.action, cfg).next;
    GridState got = client.next_state(s.state, s.action);
    if (!(got == expected)) {
      report.mismatches.push_back(
          {encode_ascii(s.state, alpha), s.action, "next_state", encode_ascii(expected, alpha), encode_ascii(got, alpha)});
      continue;
    }
    bool want = fixed ? check_win(expected, *fixed) : check_win(expected, cfg);
    bool win = client.check_win(expected);
    if (want != win) {
      report.mismatches.push_back({encode_ascii(s.state, alpha), s.action, "check_win", want ? "true" : "false",
                                   win ? "true" : "false"});
    }
  }
  return report;
}

KernelVerifier endpoint_verifier(EndpointSpec spec, DynamicsConfig cfg, std::filesystem::path work_dir,
                                 std::chrono::milliseconds timeout) {
  if (!spec.takes_kernel())
    throw Error(ErrorKind::ProtocolError, "kernel verification needs an endpoint with a {kernel} placeholder");
  return [spec = std::move(spec), cfg = std::move(cfg), work_dir = std::move(work_dir), timeout](
             const std::string& source, const RuleSet& rules, const std::vector<Sample>& samples) {
    static std::atomic<unsigned> counter{0};
    auto file = work_dir / ("verify-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)) +
                            "-" + rule_signature(rules).hex() + ".py");
    write_file_atomic(file, source);
    VerificationReport report;
    try {
      auto client = KernelClient::open(spec, file, timeout, cfg.alpha());
      GridState context = samples.empty() ? GridState(1, 1) : samples.front().state;
      client->reset(context, rules);
      report = verify_kernel(*client, samples, cfg, rules);
    } catch (...) {
      std::error_code ec;
      std::filesystem::remove(file, ec);
      throw;
    }
    std::error_code ec;
    std::filesystem::remove(file, ec);
    return report;
  };
}

VerificationReport verify_rendered(const KernelTemplate& tmpl, const KernelVerifier& verify,
                                   const std::vector<Sample>& samples, const DynamicsConfig& cfg) {
  std::vector<std::pair<RuleSet, std::vector<Sample>>> groups;
  std::unordered_map<RuleSignature, std::size_t> index;
  for (const auto& s : samples) {
    auto rules = parse_rules(s.state, cfg.alpha());
    auto [it, fresh] = index.try_emplace(rule_signature(rules), groups.size());
    if (fresh) groups.emplace_back(std::move(rules), std::vector<Sample>{});
    groups[it->second].second.push_back(s);
  }
  VerificationReport out;
  for (const auto& [rules, group] : groups) {
    auto r = verify(render_kernel(tmpl, rules, cfg), rules, group);
    out.samples += r.samples;
    out.mismatches.insert(out.mismatches.end(), r.mismatches.begin(), r.mismatches.end());
  }
  return out;
}

}  // namespace babagrid
