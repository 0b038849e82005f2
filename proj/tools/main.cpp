// babagrid command-line entry point.
//
// Exit codes: 0 success, 1 negative result (unsolved level, failed
// verification, exhausted generation), 2 bad input (schema, file, usage),
// 3 oracle or protocol failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "babagrid/error.hpp"
#include "babagrid/evaluate.hpp"
#include "babagrid/io.hpp"
#include "babagrid/kernel_template.hpp"
#include "babagrid/level.hpp"
#include "babagrid/levelgen.hpp"
#include "babagrid/parallel.hpp"
#include "babagrid/planner.hpp"
#include "babagrid/probes.hpp"
#include "babagrid/protocol.hpp"
#include "babagrid/sft.hpp"
#include "babagrid/verify.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace babagrid;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kOracle = 3 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::GenerationExhausted:
    case ErrorKind::KernelRejected:
      return kNegative;
    case ErrorKind::OracleFailure:
    case ErrorKind::SynthesisFailure:
    case ErrorKind::ProtocolError:
    case ErrorKind::Timeout:
      return kOracle;
    default:
      return kInput;
  }
}

// Settings shared by the subcommands. Each starts at its built-in default, is
// overridden by the config file, then by flags given on the command line.
struct Settings {
  std::uint64_t seed = 0;
  int budget = 2000;
  int depth = 60;
  int jobs = default_jobs();
  int timeout_ms = static_cast<int>(kDefaultCallTimeout.count());
  std::string oracle = "native";
  std::string alphabet_file;
  std::string priors_file;
  std::string template_file;
};

struct Flags {
  Settings values;
  std::vector<std::pair<std::string, CLI::Option*>> given;

  bool set(const std::string& name) const {
    for (const auto& [n, opt] : given)
      if (n == name) return opt->count() > 0;
    return false;
  }
};

void add_common(CLI::App* cmd, Flags& f) {
  auto& v = f.values;
  f.given.emplace_back("seed", cmd->add_option("--seed", v.seed, "Master seed"));
  f.given.emplace_back("budget", cmd->add_option("--budget", v.budget, "Planner node-expansion budget"));
  f.given.emplace_back("depth", cmd->add_option("--depth", v.depth, "Planner depth limit"));
  f.given.emplace_back("jobs", cmd->add_option("--jobs", v.jobs, "Worker threads"));
  f.given.emplace_back("timeout_ms", cmd->add_option("--timeout-ms", v.timeout_ms, "Per-call kernel timeout"));
  f.given.emplace_back("oracle", cmd->add_option("--oracle", v.oracle, "native | external:<endpoint>"));
  f.given.emplace_back("alphabet", cmd->add_option("--alphabet", v.alphabet_file, "Alphabet file"));
  f.given.emplace_back("priors", cmd->add_option("--priors", v.priors_file, "Prior table file"));
  f.given.emplace_back("template", cmd->add_option("--template", v.template_file, "Kernel template file"));
}

// Config values fill in whatever the command line left unset.
Settings resolve(const Flags& f) {
  Settings s = f.values;
  const char* path = std::getenv("BABAGRID_CONFIG");
  if (!path || !*path) return s;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
    if (!doc.is_object()) throw Error(ErrorKind::SchemaViolation, std::string(path) + ": config must be an object");
    auto take = [&](const char* key, auto& field) {
      if (doc.contains(key) && !f.set(key)) doc.at(key).get_to(field);
    };
    take("seed", s.seed);
    take("budget", s.budget);
    take("depth", s.depth);
    take("jobs", s.jobs);
    take("timeout_ms", s.timeout_ms);
    take("oracle", s.oracle);
    take("alphabet", s.alphabet_file);
    take("priors", s.priors_file);
    take("template", s.template_file);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string(path) + ": " + e.what());
  }
  return s;
}

// Everything a subcommand needs once settings are resolved. The alphabet is
// owned here because DynamicsConfig holds a pointer to it.
struct Context {
  Settings settings;
  std::unique_ptr<AlphabetConfig> alphabet;
  DynamicsConfig dynamics;
  PriorTable priors = PriorTable::standard();
  PlannerConfig planner;
  GenParams gen;

  const AlphabetConfig& alpha() const { return *alphabet; }

  std::shared_ptr<const KernelTemplate> kernel_template() const {
    if (settings.template_file.empty()) return std::make_shared<KernelTemplate>(KernelTemplate::reference());
    return std::make_shared<KernelTemplate>(KernelTemplate::from_file(settings.template_file));
  }
  std::chrono::milliseconds timeout() const { return std::chrono::milliseconds(settings.timeout_ms); }
  std::optional<EndpointSpec> external() const {
    if (settings.oracle == "native") return std::nullopt;
    if (settings.oracle.rfind("external:", 0) == 0) return EndpointSpec::parse(settings.oracle.substr(9));
    throw Error(ErrorKind::SchemaViolation, "--oracle must be 'native' or 'external:<endpoint>'");
  }
};

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, path + ": " + e.what());
  }
}

Context make_context(const Flags& f) {
  Context c;
  c.settings = resolve(f);
  c.alphabet = std::make_unique<AlphabetConfig>(c.settings.alphabet_file.empty()
                                                    ? AlphabetConfig::standard()
                                                    : AlphabetConfig::from_json(read_json_file(c.settings.alphabet_file)));
  c.dynamics.alphabet = c.alphabet.get();
  if (!c.settings.priors_file.empty()) c.priors = PriorTable::from_json(read_json_file(c.settings.priors_file));
  c.priors.validate(c.alpha());
  if (c.settings.budget <= 0 || c.settings.depth <= 0 || c.settings.jobs <= 0 || c.settings.timeout_ms <= 0)
    throw Error(ErrorKind::SchemaViolation, "--budget, --depth, --jobs and --timeout-ms must be positive");
  c.planner.budget.max_expansions = c.settings.budget;
  c.planner.budget.max_depth = c.settings.depth;
  c.planner.dynamics = c.dynamics;
  c.gen.budget = c.planner.budget;
  c.gen.dynamics = c.dynamics;
  c.gen.priors = c.priors;
  c.gen.validate();
  return c;
}

// A level document, or a bare ASCII map.
Level load_level(const fs::path& path, const AlphabetConfig& alpha) {
  auto text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return read_level_file(path, alpha);
  Level l;
  l.id = path.stem().string();
  l.grid = parse_ascii(text, alpha);
  return l;
}

fs::path scratch_dir(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("babagrid-" + tag + "-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

// --- subcommands -----------------------------------------------------------

struct GenerateArgs {
  std::optional<int> tier;
  std::optional<int> count;
  bool pairs = false;
  std::string out = "suite";
};

int cmd_generate(const Context& c, const GenerateArgs& a) {
  auto spec = SuiteSpec::standard(c.settings.seed);
  spec.params = c.gen;
  if (a.tier || a.count || a.pairs) {
    int tier = a.tier.value_or(a.pairs ? 2 : 1);
    if (a.pairs && tier == 3) throw Error(ErrorKind::SchemaViolation, "pairs are built for tiers 1 and 2");
    int count = a.count.value_or(tier == 3 ? 50 : 45);
    if (count < 0) throw Error(ErrorKind::SchemaViolation, "--count must be non-negative");
    spec.parts = {{tier, count, a.pairs}};
  }
  auto manifest = export_suite(spec, a.out, c.settings.jobs);
  auto m = read_manifest(manifest);
  std::printf("%zu levels -> %s\n", m.entries.size(), manifest.string().c_str());
  return kOk;
}

struct SolveArgs {
  std::string level;
  bool render = false;
  bool frozen_text = false;
};

int cmd_solve(const Context& c, const SolveArgs& a) {
  auto level = load_level(a.level, c.alpha());
  PlanResult r;
  if (a.frozen_text) {
    auto inner = std::make_shared<NativeOracle>(c.dynamics);
    FrozenTextOracle frozen(inner, c.alpha());
    r = plan(level.grid, frozen, c.planner);
  } else {
    KernelCache cache;
    auto ext = c.external();
    KernelCache::Synthesizer synth =
        ext ? external_synthesizer(*ext, c.kernel_template(), c.dynamics, scratch_dir("solve"), c.timeout())
            : native_synthesizer(c.dynamics);
    r = reactive_plan(level.grid, cache, synth, c.planner);
  }
  std::string moves;
  for (auto act : r.actions) moves += (moves.empty() ? "" : " ") + std::string(action_name(act));
  std::printf("level: %s\nstatus: %s\nplan (%zu): %s\nexpansions: %d\nresyntheses: %d\n", level.id.c_str(),
              std::string(plan_status_name(r.status)).c_str(), r.actions.size(), moves.c_str(), r.expansions,
              r.resyntheses);
  if (a.render) {
    GridState g = level.grid;
    std::printf("\nstep 0\n%s\n", encode_ascii(g, c.alpha()).c_str());
    for (std::size_t i = 0; i < r.actions.size(); ++i) {
      g = next_state(g, r.actions[i], c.dynamics).next;
      std::printf("\nstep %zu %s\n%s\n", i + 1, std::string(action_name(r.actions[i])).c_str(),
                  encode_ascii(g, c.alpha()).c_str());
    }
  }
  return r.solved() ? kOk : kNegative;
}

struct EvalArgs {
  std::string manifest;
  std::string out;
  bool frozen_text = false;
};

int cmd_eval(const Context& c, const EvalArgs& a) {
  EvalOptions opt;
  opt.planner = c.planner;
  opt.external = c.external();
  if (opt.external) {
    opt.kernel_template = c.kernel_template();
    opt.work_dir = scratch_dir("eval");
    opt.timeout = c.timeout();
  }
  opt.frozen_text = a.frozen_text;
  opt.jobs = c.settings.jobs;
  auto report = evaluate_suite(a.manifest, opt, c.alpha());
  fs::path out = a.out.empty() ? fs::path(a.manifest).parent_path() : fs::path(a.out);
  if (out.empty()) out = ".";
  write_file_atomic(out / "report.json", report.to_json().dump(2) + "\n");
  write_file_atomic(out / "report.txt", report.to_table());
  std::fputs(report.to_table().c_str(), stdout);
  return kOk;
}

struct SftArgs {
  int count = 300;
  int samples = 32;
  std::string endpoint;
  std::string out = "sft.jsonl";
};

int cmd_export_sft(const Context& c, const SftArgs& a) {
  if (a.count < 0 || a.samples <= 0) throw Error(ErrorKind::SchemaViolation, "--count and --samples out of range");
  auto pairs = generate_pairs(a.count, c.settings.seed, c.gen, c.settings.jobs);
  auto work = scratch_dir("sft");
  auto verify = endpoint_verifier(EndpointSpec::parse(a.endpoint), c.dynamics, work, c.timeout());
  SftOptions opt;
  opt.samples_per_kernel = a.samples;
  opt.dynamics = c.dynamics;
  opt.jobs = c.settings.jobs;
  auto n = export_sft_corpus(pairs, *c.kernel_template(), verify, a.out, opt);
  fs::remove_all(work);
  std::printf("%zu records -> %s\n", n, a.out.c_str());
  return kOk;
}

struct ProbeArgs {
  int count = 45;
  int candidates = 0;
  std::string nl_template = "rule";
  std::string overrides;
  std::string out = "probes.jsonl";
};

int cmd_export_probes(const Context& c, const ProbeArgs& a) {
  ProbeOptions opt;
  opt.seed = c.settings.seed;
  opt.scenarios = a.count;
  opt.planner = c.planner;
  opt.priors = c.priors;
  if (a.nl_template != "rule" && a.nl_template != "scene")
    throw Error(ErrorKind::SchemaViolation, "--nl-template must be 'rule' or 'scene'");
  opt.nl_template = a.nl_template == "rule" ? NlTemplate::RuleStatement : NlTemplate::SceneDescription;
  if (!a.overrides.empty()) opt.overrides = a.overrides;
  int pool = a.candidates > 0 ? a.candidates : 8 * a.count + 16;
  auto candidates = probe_candidates(c.settings.seed, pool, c.gen, c.settings.jobs);
  auto n = export_probes(candidates, opt, a.out);
  std::printf("%zu records -> %s\n", n, a.out.c_str());
  return kOk;
}

struct ScoreArgs {
  std::string records;
  std::string logprobs;
  std::string out;
};

int cmd_score_probes(const Context&, const ScoreArgs& a) {
  auto result = score_probe_files(a.records, a.logprobs);
  if (!a.out.empty()) write_file_atomic(a.out, result.to_json().dump(2) + "\n");
  std::fputs(result.to_table().c_str(), stdout);
  return kOk;
}

struct VerifyArgs {
  std::string endpoint;
  int samples = 4000;
  std::vector<int> tiers{1, 2, 3};
  int levels = 8;
  std::string out;
};

int cmd_verify_kernel(const Context& c, const VerifyArgs& a) {
  SampleSpec spec;
  spec.n_states = a.samples;
  spec.tiers = a.tiers;
  for (int i = 0; i < a.levels; ++i) spec.seeds.push_back(c.settings.seed + static_cast<std::uint64_t>(i));
  auto samples = sample_states(spec, c.gen);
  auto endpoint = EndpointSpec::parse(a.endpoint);
  VerificationReport report;
  if (endpoint.takes_kernel()) {
    auto work = scratch_dir("verify");
    auto verify = endpoint_verifier(endpoint, c.dynamics, work, c.timeout());
    report = verify_rendered(*c.kernel_template(), verify, samples, c.dynamics);
    fs::remove_all(work);
  } else {
    auto client = KernelClient::open(endpoint, {}, c.timeout(), c.alpha());
    report = verify_kernel(*client, samples, c.dynamics);
  }
  if (!a.out.empty()) write_file_atomic(a.out, report.to_json().dump(2) + "\n");
  std::printf("samples: %zu\nmismatches: %zu\n", report.samples, report.mismatches.size());
  for (std::size_t i = 0; i < report.mismatches.size() && i < 5; ++i) {
    const auto& m = report.mismatches[i];
    std::printf("\n%s %s\n%s\nexpected:\n%s\ngot:\n%s\n", m.op.c_str(), std::string(action_name(m.action)).c_str(),
                m.state_ascii.c_str(), m.expected.c_str(), m.got.c_str());
  }
  return report.passed() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"babagrid: rule-mutable grid puzzles, generator, planner and kernel harness"};
  app.require_subcommand(1);
  std::function<int()> run;

  Flags gen_flags, solve_flags, eval_flags, sft_flags, probe_flags, score_flags, verify_flags;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a level suite and its manifest");
  add_common(g, gen_flags);
  g->add_option("--tier", gen.tier, "Only this tier")->check(CLI::Range(1, 3));
  g->add_option("--count", gen.count, "Levels (or pairs) to generate");
  g->add_flag("--pairs", gen.pairs, "Generate counterfactual pairs");
  g->add_option("--out", gen.out, "Output directory");
  g->callback([&] { run = [&] { return cmd_generate(make_context(gen_flags), gen); }; });

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Plan one level; exit 0 iff solved");
  add_common(s, solve_flags);
  s->add_option("level", solve.level, "Level file (document or ASCII map)")->required();
  s->add_flag("--render", solve.render, "Print every intermediate grid");
  s->add_flag("--frozen-text", solve.frozen_text, "Treat the start rules as immutable");
  s->callback([&] { run = [&] { return cmd_solve(make_context(solve_flags), solve); }; });

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a suite and write report.json / report.txt");
  add_common(e, eval_flags);
  e->add_option("manifest", ev.manifest, "Suite manifest")->required();
  e->add_option("--out", ev.out, "Report directory (defaults to the manifest's)");
  e->add_flag("--frozen-text", ev.frozen_text, "Frozen-text baseline");
  e->callback([&] { run = [&] { return cmd_eval(make_context(eval_flags), ev); }; });

  SftArgs sft;
  auto* x = app.add_subcommand("export-sft", "Export the verified counterfactual kernel corpus");
  add_common(x, sft_flags);
  x->add_option("--count", sft.count, "Pairs");
  x->add_option("--samples", sft.samples, "Verification samples per kernel");
  x->add_option("--endpoint", sft.endpoint, "Kernel endpoint with a {kernel} placeholder")->required();
  x->add_option("--out", sft.out, "Output file");
  x->callback([&] { run = [&] { return cmd_export_sft(make_context(sft_flags), sft); }; });

  ProbeArgs pr;
  auto* p = app.add_subcommand("export-probes", "Export prior-conflict probe prompts");
  add_common(p, probe_flags);
  p->add_option("--count", pr.count, "Scenarios");
  p->add_option("--candidates", pr.candidates, "Levels to draw scenarios from");
  p->add_option("--nl-template", pr.nl_template, "rule | scene");
  p->add_option("--overrides", pr.overrides, "Annotation overrides file");
  p->add_option("--out", pr.out, "Output file");
  p->callback([&] { run = [&] { return cmd_export_probes(make_context(probe_flags), pr); }; });

  ScoreArgs sc;
  auto* q = app.add_subcommand("score-probes", "Score supplied probabilities against probe records");
  add_common(q, score_flags);
  q->add_option("records", sc.records, "Probe records file")->required();
  q->add_option("logprobs", sc.logprobs, "Probabilities file")->required();
  q->add_option("--out", sc.out, "Write scores as a document");
  q->callback([&] { run = [&] { return cmd_score_probes(make_context(score_flags), sc); }; });

  VerifyArgs vk;
  auto* v = app.add_subcommand("verify-kernel", "Compare an endpoint with the native engine");
  add_common(v, verify_flags);
  v->add_option("--endpoint", vk.endpoint, "Kernel endpoint")->required();
  v->add_option("--samples", vk.samples, "Sampled (state, action) pairs");
  v->add_option("--tier", vk.tiers, "Tiers to sample from")->check(CLI::Range(1, 3));
  v->add_option("--levels", vk.levels, "Levels per tier");
  v->add_option("--out", vk.out, "Write the report as a document");
  v->callback([&] { run = [&] { return cmd_verify_kernel(make_context(verify_flags), vk); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int rc = app.exit(err);
    return rc == 0 ? kOk : kInput;
  }
  try {
    return run();
  } catch (const Error& err) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(error_kind_name(err.kind())).c_str(), err.what());
    return exit_code_for(err.kind());
  }
}
