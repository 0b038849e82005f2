#include "babagrid/sft.hpp"

#include <cstdio>

#include "babagrid/error.hpp"
#include "babagrid/hash.hpp"
#include "babagrid/io.hpp"
#include "babagrid/parallel.hpp"

namespace babagrid {

nlohmann::json SftRecord::to_json() const {
  return {{"pair_id", pair_id},
          {"instance", instance},
          {"grid_ascii", grid_ascii},
          {"level_ascii", level_ascii},
          {"rules", rules},
          {"paired_rules", counterpart_rules},
          {"pivot",
           {{"noun", pivot.noun},
            {"plus", std::string(property_name(pivot.plus))},
            {"minus", std::string(property_name(pivot.minus))}}},
          {"kernel", kernel},
          {"lambda_weight", lambda_weight}};
}

std::vector<SftRecord> build_sft_records(const CounterfactualPair& pair, const KernelTemplate& tmpl,
                                         const KernelVerifier& verify, const SftOptions& options) {
  const auto& alpha = options.dynamics.alpha();
  std::vector<SftRecord> out;
  for (bool plus : {true, false}) {
    const auto& level = plus ? pair.plus_level : pair.minus_level;
    const auto& rules = plus ? pair.plus_rules : pair.minus_rules;
    SftRecord rec;
    rec.pair_id = pair.pair_id;
    rec.instance = plus ? "plus" : "minus";
    rec.grid_ascii = encode_ascii(pair.base_grid, alpha);
    rec.level_ascii = encode_ascii(level.grid, alpha);
    rec.rules = rules.to_strings();
    rec.counterpart_rules = (plus ? pair.minus_rules : pair.plus_rules).to_strings();
    rec.pivot = pair.pivot;
    rec.kernel = render_kernel(tmpl, rules, options.dynamics);
    rec.lambda_weight = options.lambda_weight;

    auto samples = walk_samples(level.grid, options.samples_per_kernel,
                                hash_bytes(pair.pair_id + "/" + rec.instance), options.dynamics);
    auto report = verify(rec.kernel, rules, samples);
    if (!report.passed())
      throw Error(ErrorKind::KernelRejected, pair.pair_id + " (" + rec.instance + "): " +
                                                 std::to_string(report.mismatches.size()) + " mismatches in " +
                                                 std::to_string(report.samples) + " samples");
    out.push_back(std::move(rec));
  }
  return out;
}

std::size_t export_sft_corpus(const std::vector<CounterfactualPair>& pairs, const KernelTemplate& tmpl,
                              const KernelVerifier& verify, const std::filesystem::path& out_file,
                              const SftOptions& options) {
  std::vector<std::vector<SftRecord>> per_pair(pairs.size());
  parallel_for(pairs.size(), options.jobs,
               [&](std::size_t i) { per_pair[i] = build_sft_records(pairs[i], tmpl, verify, options); });
  std::string text;
  std::size_t count = 0;
  for (const auto& recs : per_pair)
    for (const auto& r : recs) {
      text += r.to_json().dump() + "\n";
      ++count;
    }
  write_file_atomic(out_file, text);
  return count;
}

std::vector<CounterfactualPair> generate_pairs(int count, std::uint64_t master_seed, const GenParams& params,
                                               int jobs) {
  if (count < 0) throw Error(ErrorKind::SchemaViolation, "pair count must be non-negative");
  std::vector<CounterfactualPair> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    int tier = i % 2 == 0 ? 1 : 2;
    out[i] = generate_pair(tier, level_seed(master_seed, 0, tier, true, i), params);
    char id[32];
    std::snprintf(id, sizeof id, "sft-pair%03zu", i);
    out[i].pair_id = id;
    out[i].plus_level.pair_id = out[i].minus_level.pair_id = out[i].pair_id;
    out[i].plus_level.id = out[i].pair_id + "-plus";
    out[i].minus_level.id = out[i].pair_id + "-minus";
  });
  return out;
}

}  // namespace babagrid
