#include "babagrid/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "babagrid/error.hpp"
#include "babagrid/hash.hpp"
#include "babagrid/io.hpp"
#include "babagrid/oracle.hpp"
#include "babagrid/parallel.hpp"

namespace babagrid {

std::string_view modality_name(Modality m) {
  return m == Modality::NaturalLanguage ? "natural-language" : "code-grounded";
}

Modality parse_modality(std::string_view name) {
  if (name == "natural-language") return Modality::NaturalLanguage;
  if (name == "code-grounded") return Modality::CodeGrounded;
  throw Error(ErrorKind::SchemaViolation, "unknown modality '" + std::string(name) + "'");
}

namespace {

std::string title_case(std::string_view word) {
  std::string out(word);
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
  return out;
}

bool icon_on_grid(const GridState& g, char icon) {
  for (const auto& cell : g.cells())
    if (cell.find(icon) != std::string::npos) return true;
  return false;
}

void replace_first(std::string& cell, char from, char to) {
  if (auto at = cell.find(from); at != std::string::npos) cell[at] = to;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string py_str(std::string_view s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\\' || ch == '\'') out.push_back('\\');
    out.push_back(ch);
  }
  return out + "'";
}

std::string legend(const GridState& g, const AlphabetConfig& alpha) {
  std::vector<std::string> parts;
  for (const auto& n : alpha.nouns())
    if (icon_on_grid(g, n.icon)) parts.push_back(std::string(1, n.icon) + " = " + title_case(n.name) + " sprite");
  parts.push_back("capital letters and '=' are text blocks");
  parts.push_back("'.' is an empty cell");
  return join(parts, ", ");
}

std::string nl_prompt(const ProbeScenario& s, const std::vector<Action>& moves, NlTemplate tmpl,
                      const AlphabetConfig& alpha) {
  std::vector<std::string> rule_text, move_text;
  for (const auto& r : s.rules)
    rule_text.push_back(title_case(r.subject) + " is " + title_case(property_name(r.property)));
  for (auto a : moves) move_text.emplace_back(action_name(a));
  std::ostringstream out;
  const auto board = encode_ascii(s.grid, alpha);
  if (tmpl == NlTemplate::RuleStatement) {
    out << "Rules in effect: " << join(rule_text, ", ") << ".\n"
        << "Board:\n" << board << "\n"
        << "Legend: " << legend(s.grid, alpha) << ".\n"
        << "Possible moves: " << join(move_text, ", ") << ".\n"
        << "Which move is correct under these rules? Answer with one move.";
  } else {
    out << "You are shown one state of a grid puzzle whose rules are written on the board as text blocks.\n";
    for (const auto& rt : rule_text) out << "The " << rt << ".\n";
    out << "Each cell of the board below lists the objects in it (" << legend(s.grid, alpha) << "):\n"
        << board << "\n"
        << "The moves you can make are " << join(move_text, ", ") << ".\n"
        << "Considering only the rules stated above, which single move should be made next?";
  }
  return out.str();
}

std::string code_prompt(const ProbeScenario& s, const std::vector<Action>& moves, const AlphabetConfig& alpha) {
  std::map<std::string, std::vector<std::string>> by_noun;
  for (const auto& r : s.rules) by_noun[r.subject].push_back(py_str(property_name(r.property)));
  std::vector<std::string> entries;
  for (const auto& [noun, props] : by_noun) entries.push_back(py_str(noun) + ": [" + join(props, ", ") + "]");
  std::ostringstream out;
  out << "rules = {" << join(entries, ", ") << "}\n";
  out << "grid = [\n";
  for (int r = 0; r < s.grid.rows(); ++r) {
    std::vector<std::string> cells;
    for (int c = 0; c < s.grid.cols(); ++c) cells.push_back(py_str(s.grid.at(r, c)));
    out << "    [" << join(cells, ", ") << "],\n";
  }
  out << "]\n";
  std::vector<std::string> move_text;
  for (auto a : moves) move_text.push_back(py_str(action_name(a)));
  out << "actions = [" << join(move_text, ", ") << "]\n";
  out << "# legend: " << legend(s.grid, alpha) << "\n";
  out << "# next_grid = T(grid, action; rules)\n";
  out << "# Which action in `actions` is valid according to T under the current rules?";
  return out.str();
}

std::map<std::string, std::pair<std::optional<Action>, std::optional<Action>>> read_overrides(
    const std::filesystem::path& path) {
  std::map<std::string, std::pair<std::optional<Action>, std::optional<Action>>> out;
  for (const auto& doc : read_json_lines(path)) {
    try {
      auto& slot = out[doc.at("level_id").get<std::string>()];
      if (doc.contains("logic_action")) slot.first = parse_action(doc["logic_action"].get<std::string>());
      if (doc.contains("prior_action")) slot.second = parse_action(doc["prior_action"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

GridState prior_reading(const GridState& g, const PriorTable& priors, const AlphabetConfig& alphabet) {
  GridState out = g;
  for (const auto& occ : locate_rules(g, alphabet)) {
    if (priors.aligned(occ.rule)) continue;
    const auto p = occ.rule.property;
    bool moved = false;
    if (p == Property::You || p == Property::Win) {
      for (const auto& [noun, prior] : priors.entries()) {
        const auto* entry = alphabet.noun_by_name(noun);
        if (prior != p || noun == occ.rule.subject || !entry || !icon_on_grid(g, entry->icon)) continue;
        replace_first(out.at(occ.noun), alphabet.noun_by_name(occ.rule.subject)->text, entry->text);
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (auto prior = priors.prior(occ.rule.subject))
        replace_first(out.at(occ.property), occ.property_char, alphabet.property_char(*prior));
    }
  }
  return out;
}

std::optional<ProbeScenario> annotate_level(const Level& level, const ProbeOptions& options) {
  const auto& alpha = options.planner.dynamics.alpha();
  NativeOracle native(options.planner.dynamics);
  auto logic = plan(level.grid, native, options.planner);
  if (!logic.solved() || logic.actions.empty()) return std::nullopt;
  auto prior_grid = prior_reading(level.grid, options.priors, alpha);
  auto prior = plan(prior_grid, native, options.planner);
  if (!prior.solved() || prior.actions.empty()) return std::nullopt;
  if (logic.actions.front() == prior.actions.front()) return std::nullopt;
  ProbeScenario s;
  s.level_id = level.id;
  s.grid = level.grid;
  s.rules = parse_rules(level.grid, alpha);
  s.logic_action = logic.actions.front();
  s.prior_action = prior.actions.front();
  return s;
}

std::vector<Level> probe_candidates(std::uint64_t master_seed, int count, const GenParams& params, int jobs) {
  std::vector<Level> out(static_cast<std::size_t>(std::max(0, count)));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    if (i % 2 == 0) {
      out[i] = generate_level(2, level_seed(master_seed, 0, 2, false, i), params);
    } else {
      auto pair = generate_pair(1, level_seed(master_seed, 0, 1, true, i), params);
      out[i] = std::move(pair.minus_level);
    }
  });
  return out;
}

std::vector<ProbeScenario> select_scenarios(const std::vector<Level>& candidates, const ProbeOptions& options) {
  std::map<std::string, std::pair<std::optional<Action>, std::optional<Action>>> overrides;
  if (options.overrides) overrides = read_overrides(*options.overrides);
  std::vector<ProbeScenario> out;
  for (const auto& level : candidates) {
    if (static_cast<int>(out.size()) >= options.scenarios) break;
    if (options.priors.contradictions(parse_rules(level.grid, options.planner.dynamics.alpha())).empty()) continue;
    auto s = annotate_level(level, options);
    auto ov = overrides.find(level.id);
    if (ov != overrides.end()) {
      if (!s) {
        if (!ov->second.first || !ov->second.second) continue;
        s = ProbeScenario{"", level.id, level.grid, parse_rules(level.grid, options.planner.dynamics.alpha()),
                          *ov->second.first, *ov->second.second};
      }
      if (ov->second.first) s->logic_action = *ov->second.first;
      if (ov->second.second) s->prior_action = *ov->second.second;
      if (s->logic_action == s->prior_action)
        throw Error(ErrorKind::AnnotationConflict, level.id + ": override makes logic and prior actions coincide");
    }
    if (!s) continue;
    char id[32];
    std::snprintf(id, sizeof id, "probe-%03zu", out.size());
    s->scenario_id = id;
    out.push_back(std::move(*s));
  }
  if (static_cast<int>(out.size()) < options.scenarios)
    throw Error(ErrorKind::AnnotationConflict, "only " + std::to_string(out.size()) + " of " +
                                                   std::to_string(options.scenarios) +
                                                   " scenarios have distinct logic and prior actions");
  return out;
}

std::vector<ProbeRecord> build_probe_records(const std::vector<ProbeScenario>& scenarios, const ProbeOptions& options,
                                             const AlphabetConfig& alphabet) {
  std::vector<ProbeRecord> out;
  for (const auto& s : scenarios) {
    for (auto modality : {Modality::NaturalLanguage, Modality::CodeGrounded}) {
      std::mt19937_64 rng(splitmix64(options.seed ^ hash_bytes(s.scenario_id + "/" + std::string(modality_name(modality)))));
      std::vector<int> perm{0, 1, 2, 3};
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
      ProbeRecord rec;
      rec.scenario_id = s.scenario_id;
      rec.level_id = s.level_id;
      rec.modality = modality;
      rec.permutation = perm;
      for (int k : perm) rec.candidate_actions.push_back(kAllActions[static_cast<std::size_t>(k)]);
      rec.logic_action = s.logic_action;
      rec.prior_action = s.prior_action;
      rec.rules = s.rules.to_strings();
      rec.grid_ascii = encode_ascii(s.grid, alphabet);
      rec.prompt_text = modality == Modality::NaturalLanguage
                            ? nl_prompt(s, rec.candidate_actions, options.nl_template, alphabet)
                            : code_prompt(s, rec.candidate_actions, alphabet);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

nlohmann::json ProbeRecord::to_json() const {
  nlohmann::json cands = nlohmann::json::array();
  for (auto a : candidate_actions) cands.push_back(std::string(action_name(a)));
  return {{"scenario_id", scenario_id},
          {"level_id", level_id},
          {"modality", std::string(modality_name(modality))},
          {"prompt_text", prompt_text},
          {"candidate_actions", cands},
          {"permutation", permutation},
          {"logic_action", std::string(action_name(logic_action))},
          {"prior_action", std::string(action_name(prior_action))},
          {"rules", rules},
          {"grid_ascii", grid_ascii}};
}

ProbeRecord ProbeRecord::from_json(const nlohmann::json& doc) {
  ProbeRecord r;
  try {
    r.scenario_id = doc.at("scenario_id").get<std::string>();
    r.level_id = doc.value("level_id", std::string{});
    r.modality = parse_modality(doc.at("modality").get<std::string>());
    r.prompt_text = doc.value("prompt_text", std::string{});
    for (const auto& a : doc.at("candidate_actions")) r.candidate_actions.push_back(parse_action(a.get<std::string>()));
    if (doc.contains("permutation")) r.permutation = doc["permutation"].get<std::vector<int>>();
    r.logic_action = parse_action(doc.at("logic_action").get<std::string>());
    r.prior_action = parse_action(doc.at("prior_action").get<std::string>());
    if (doc.contains("rules")) r.rules = doc["rules"].get<std::vector<std::string>>();
    r.grid_ascii = doc.value("grid_ascii", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("probe record: ") + e.what());
  }
  auto has = [&](Action a) {
    return std::find(r.candidate_actions.begin(), r.candidate_actions.end(), a) != r.candidate_actions.end();
  };
  if (r.logic_action == r.prior_action || !has(r.logic_action) || !has(r.prior_action))
    throw Error(ErrorKind::SchemaViolation, r.scenario_id + ": logic/prior actions must differ and be candidates");
  return r;
}

std::size_t export_probes(const std::vector<Level>& candidates, const ProbeOptions& options,
                          const std::filesystem::path& out_file) {
  auto scenarios = select_scenarios(candidates, options);
  auto records = build_probe_records(scenarios, options, options.planner.dynamics.alpha());
  std::string text;
  for (const auto& r : records) text += r.to_json().dump() + "\n";
  write_file_atomic(out_file, text);
  return records.size();
}

std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ProbeRecord> read_probe_records(const std::filesystem::path& path) {
  std::vector<ProbeRecord> out;
  for (const auto& doc : read_json_lines(path)) out.push_back(ProbeRecord::from_json(doc));
  return out;
}

namespace {

double finite_or_throw(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw Error(ErrorKind::NonfiniteProbability, where + ": value is not a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::NonfiniteProbability, where + ": non-finite value");
  return x;
}

}  // namespace

ScoreResult score_probes(const std::vector<ProbeRecord>& records, const std::vector<nlohmann::json>& logprobs) {
  std::map<std::pair<std::string, Modality>, const ProbeRecord*> index;
  for (const auto& r : records) index[{r.scenario_id, r.modality}] = &r;

  ScoreResult result;
  for (const auto& line : logprobs) {
    std::string sid, tag;
    Modality modality;
    try {
      sid = line.at("scenario_id").get<std::string>();
      modality = parse_modality(line.at("modality").get<std::string>());
      tag = line.value("model_tag", std::string{});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, std::string("logprob line: ") + e.what());
    }
    auto it = index.find({sid, modality});
    if (it == index.end())
      throw Error(ErrorKind::MissingScenario, sid + " (" + std::string(modality_name(modality)) + ") has no probe record");
    const auto& rec = *it->second;
    const std::string where = sid + "/" + std::string(modality_name(modality));

    // Probability mass per candidate action, before renormalization.
    std::map<Action, double> mass;
    if (line.contains("position_probabilities")) {
      const auto& arr = line["position_probabilities"];
      if (!arr.is_array() || arr.size() != rec.candidate_actions.size())
        throw Error(ErrorKind::SchemaViolation, where + ": position_probabilities must match the candidates");
      for (std::size_t i = 0; i < arr.size(); ++i) mass[rec.candidate_actions[i]] = finite_or_throw(arr[i], where);
    } else if (line.contains("probabilities") || line.contains("logprobs")) {
      const bool logs = !line.contains("probabilities");
      const auto& m = logs ? line["logprobs"] : line["probabilities"];
      if (!m.is_object()) throw Error(ErrorKind::SchemaViolation, where + ": expected an action map");
      for (auto a : rec.candidate_actions) {
        std::string name(action_name(a));
        if (!m.contains(name)) throw Error(ErrorKind::MissingScenario, where + ": no value for candidate " + name);
        double v = finite_or_throw(m[name], where);
        mass[a] = logs ? std::exp(v) : v;
      }
    } else {
      throw Error(ErrorKind::SchemaViolation, where + ": no probabilities given");
    }
    double total = 0.0;
    for (const auto& [a, p] : mass) {
      if (p < 0.0) throw Error(ErrorKind::NonfiniteProbability, where + ": negative probability");
      total += p;
    }
    if (!(total > 0.0) || !std::isfinite(total))
      throw Error(ErrorKind::NonfiniteProbability, where + ": probabilities do not normalize");

    ProbeScore s;
    s.scenario_id = sid;
    s.modality = modality;
    s.model_tag = tag;
    s.p_logic = mass[rec.logic_action] / total;
    s.p_prior = mass[rec.prior_action] / total;
    s.delta_p = delta_p(s.p_logic, s.p_prior);
    result.scores.push_back(s);
  }

  std::map<std::pair<std::string, Modality>, std::pair<std::size_t, double>> sums;
  for (const auto& s : result.scores) {
    auto& acc = sums[{s.model_tag, s.modality}];
    ++acc.first;
    acc.second += s.delta_p;
  }
  for (const auto& [key, acc] : sums)
    result.aggregates.push_back({key.first, key.second, acc.first, acc.second / static_cast<double>(acc.first)});
  return result;
}

ScoreResult score_probe_files(const std::filesystem::path& records_file, const std::filesystem::path& logprobs_file) {
  return score_probes(read_probe_records(records_file), read_json_lines(logprobs_file));
}

nlohmann::json ScoreResult::to_json() const {
  nlohmann::json sc = nlohmann::json::array(), ag = nlohmann::json::array();
  for (const auto& s : scores)
    sc.push_back({{"scenario_id", s.scenario_id},
                  {"modality", std::string(modality_name(s.modality))},
                  {"model_tag", s.model_tag},
                  {"p_logic", s.p_logic},
                  {"p_prior", s.p_prior},
                  {"delta_p", s.delta_p}});
  for (const auto& a : aggregates)
    ag.push_back({{"model_tag", a.model_tag},
                  {"modality", std::string(modality_name(a.modality))},
                  {"count", a.count},
                  {"mean_delta_p", a.mean_delta_p}});
  return {{"scores", sc}, {"aggregates", ag}};
}

std::string ScoreResult::to_table() const {
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof line, "%-24s %-18s %6s %10s\n", "model_tag", "modality", "n", "mean_dP");
  out << line;
  for (const auto& a : aggregates) {
    std::snprintf(line, sizeof line, "%-24s %-18s %6zu %10.3f\n", a.model_tag.empty() ? "-" : a.model_tag.c_str(),
                  std::string(modality_name(a.modality)).c_str(), a.count, a.mean_delta_p);
    out << line;
  }
  return out.str();
}

}  // namespace babagrid
