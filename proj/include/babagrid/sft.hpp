#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "babagrid/kernel_template.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/verify.hpp"

namespace babagrid {

inline constexpr double kDefaultLambdaWeight = 2.0;

// One training instance: a pair member's grid, rules and rendered kernel.
struct SftRecord {
  std::string pair_id;
  std::string instance;    // "plus" or "minus"
  std::string grid_ascii;  // shared map: the pair's base grid (pivot slot empty)
  std::string level_ascii;
  std::vector<std::string> rules;
  std::vector<std::string> counterpart_rules;
  Pivot pivot;
  std::string kernel;
  double lambda_weight = kDefaultLambdaWeight;  // metadata only

  nlohmann::json to_json() const;
};

struct SftOptions {
  int samples_per_kernel = 32;
  double lambda_weight = kDefaultLambdaWeight;
  DynamicsConfig dynamics;
  int jobs = 1;
};

// Both members' records for one pair, each kernel checked by `verify` first.
// Throws KernelRejected naming the pair and the mismatch count.
std::vector<SftRecord> build_sft_records(const CounterfactualPair& pair, const KernelTemplate& tmpl,
                                         const KernelVerifier& verify, const SftOptions& options);

// Two records per pair, line-delimited, written only if every kernel passes.
std::size_t export_sft_corpus(const std::vector<CounterfactualPair>& pairs, const KernelTemplate& tmpl,
                              const KernelVerifier& verify, const std::filesystem::path& out_file,
                              const SftOptions& options = {});

// count pairs alternating tiers 1 and 2, seeds derived from master_seed.
std::vector<CounterfactualPair> generate_pairs(int count, std::uint64_t master_seed, const GenParams& params,
                                               int jobs = 1);

}  // namespace babagrid
