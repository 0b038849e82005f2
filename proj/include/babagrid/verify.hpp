#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "babagrid/kernel_template.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/protocol.hpp"

namespace babagrid {

struct Sample {
  GridState state;
  Action action = Action::Up;
};

// Which states to check: random walks from generated levels. Each seed yields
// one level per listed tier; n_states samples are spread across them.
struct SampleSpec {
  int n_states = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<int> tiers;
  int max_walk = 12;
};

std::vector<Sample> sample_states(const SampleSpec& spec, const GenParams& params);

// n samples from random walks starting at `start`, seeded deterministically.
std::vector<Sample> walk_samples(const GridState& start, int n, std::uint64_t seed, const DynamicsConfig& cfg,
                                 int max_walk = 12);

struct Mismatch {
  std::string state_ascii;
  Action action = Action::Up;
  std::string op;  // "next_state" or "check_win"
  std::string expected;
  std::string got;
};

struct VerificationReport {
  std::size_t samples = 0;
  std::vector<Mismatch> mismatches;

  bool passed() const noexcept { return mismatches.empty(); }
  nlohmann::json to_json() const;
};

// Compares the endpoint with the native engine sample by sample: next_state
// on (state, action) and check_win on the resulting state. With kernel_rules,
// the expected physics is that rule set held fixed (what a synthesized kernel
// encodes); otherwise the rules are re-read from every state.
VerificationReport verify_kernel(KernelClient& client, const std::vector<Sample>& samples,
                                 const DynamicsConfig& cfg = {}, const std::optional<RuleSet>& kernel_rules = {});

// Checks one kernel source against its rule set. Used as the SFT export gate.
using KernelVerifier =
    std::function<VerificationReport(const std::string& kernel_source, const RuleSet& rules,
                                     const std::vector<Sample>& samples)>;

// Writes the kernel under work_dir and serves it through a {kernel} endpoint.
KernelVerifier endpoint_verifier(EndpointSpec spec, DynamicsConfig cfg, std::filesystem::path work_dir,
                                 std::chrono::milliseconds timeout = kDefaultCallTimeout);

// Groups samples by the rule set of their state, renders one kernel per group
// and checks each through `verify`. Reports are concatenated in first-seen
// group order.
VerificationReport verify_rendered(const KernelTemplate& tmpl, const KernelVerifier& verify,
                                   const std::vector<Sample>& samples, const DynamicsConfig& cfg = {});

}  // namespace babagrid
