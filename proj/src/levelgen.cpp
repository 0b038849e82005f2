#include "babagrid/levelgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "babagrid/error.hpp"
#include "babagrid/hash.hpp"
#include "babagrid/io.hpp"
#include "babagrid/oracle.hpp"
#include "babagrid/parallel.hpp"

namespace babagrid {

std::vector<Pivot> default_pivots() {
  return {
      {"WALL", Property::Stop, Property::Pass},  {"LAVA", Property::Defeat, Property::Safe},
      {"SKULL", Property::Defeat, Property::Safe}, {"ROCK", Property::Push, Property::Stop},
      {"WATER", Property::Sink, Property::Push},
  };
}

void GenParams::validate() const {
  auto bad = [](const std::string& what) { return Error(ErrorKind::SchemaViolation, "generation params: " + what); };
  if (min_size < 7 || max_size > 12 || min_size > max_size) throw bad("grid size must lie in 7..12");
  if (min_nouns < 2 || max_nouns > 5 || min_nouns > max_nouns) throw bad("noun count must lie in 2..5");
  if (!(max_wall_density >= 0.0 && max_wall_density <= 0.3)) throw bad("wall density must lie in [0, 0.3]");
  if (max_attempts < 1) throw bad("max_attempts must be positive");
  if (budget.max_expansions < 1 || budget.max_depth < 1) throw bad("planner budget must be positive");
}

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// ranges are derived by hand to keep levels identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[next() % v.size()];
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[next() % i]);
  }

 private:
  std::mt19937_64 eng_;
};

int manhattan(Pos a, Pos b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

// Rule triples live in the top and bottom rows at columns 0, 4, 8; the rows in
// between are the play area.
class Canvas {
 public:
  Canvas(int rows, int cols, const AlphabetConfig& alphabet) : g(rows, cols), alpha_(&alphabet) {
    for (int r : {0, rows - 1})
      for (int c = 0; c + 2 < cols; c += 4) slots_.push_back({r, c});
  }

  GridState g;

  int rows() const { return g.rows(); }
  int cols() const { return g.cols(); }
  std::size_t slots_left() const { return slots_.size() - used_; }
  int play_area() const { return (rows() - 2) * cols(); }

  const NounEntry& noun(std::string_view name) const {
    const auto* n = alpha_->noun_by_name(name);
    if (!n) throw Error(ErrorKind::UnknownNoun, "alphabet has no noun " + std::string(name));
    return *n;
  }
  char icon(std::string_view name) const { return noun(name).icon; }
  char prop(Property p) const { return alpha_->property_char(p); }

  bool in_play(Pos p) const { return p.row >= 1 && p.row <= rows() - 2 && p.col >= 0 && p.col < cols(); }
  bool free(Pos p) const { return g.in_bounds(p) && g.at(p).empty() && !reserved_.count(p); }
  void reserve(Pos p) { reserved_.insert(p); }
  void put(Pos p, char ch) { g.at(p).push_back(ch); }

  // "NOUN IS PROP" in the next rule slot; an empty property leaves that cell
  // blank. Returns the property cell, or nullopt when the slots ran out.
  std::optional<Pos> add_rule(std::string_view subject, std::optional<Property> property) {
    if (used_ >= slots_.size()) return std::nullopt;
    Pos s = slots_[used_++];
    put(s, noun(subject).text);
    put({s.row, s.col + 1}, alpha_->is_char());
    Pos p{s.row, s.col + 2};
    if (property) put(p, prop(*property));
    return p;
  }

  template <class Pred>
  std::optional<Pos> random_free(Rng& rng, Pred&& pred) const {
    std::vector<Pos> options;
    for (int r = 1; r <= rows() - 2; ++r)
      for (int c = 0; c < cols(); ++c)
        if (free({r, c}) && pred(Pos{r, c})) options.push_back({r, c});
    if (options.empty()) return std::nullopt;
    return rng.pick(options);
  }
  std::optional<Pos> random_free(Rng& rng) const {
    return random_free(rng, [](Pos) { return true; });
  }

  template <class Pred>
  bool scatter(Rng& rng, char ch, int count, Pred&& pred) {
    for (int i = 0; i < count; ++i) {
      auto p = random_free(rng, pred);
      if (!p) return false;
      put(*p, ch);
    }
    return true;
  }
  bool scatter(Rng& rng, char ch, int count) {
    return scatter(rng, ch, count, [](Pos) { return true; });
  }

  // Icons on the eight neighbours of `center`, all inside the play area.
  // With `gap`, one orthogonal neighbour stays open.
  bool ring(Rng& rng, Pos center, char ch, bool gap) {
    std::vector<Pos> cells;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc)
        if (dr || dc) cells.push_back({center.row + dr, center.col + dc});
    for (auto p : cells)
      if (!in_play(p) || !free(p)) return false;
    std::optional<Pos> open;
    if (gap) {
      std::vector<Pos> orth;
      for (auto p : cells)
        if (p.row == center.row || p.col == center.col) orth.push_back(p);
      open = rng.pick(orth);
    }
    for (auto p : cells)
      if (!open || p != *open) put(p, ch);
    return true;
  }

  // A full-height column of icons at x, optionally with one open play-area cell.
  bool column(Rng& rng, int x, char ch, bool gap) {
    int open = gap ? rng.uniform(1, rows() - 2) : -1;
    for (int r = 0; r < rows(); ++r) {
      if (r == open) continue;
      if (!g.at(r, x).empty()) return false;
      put({r, x}, ch);
    }
    return true;
  }

 private:
  const AlphabetConfig* alpha_;
  std::vector<Pos> slots_;
  std::size_t used_ = 0;
  std::set<Pos> reserved_;
};

Canvas fresh_canvas(Rng& rng, const GenParams& p) {
  int rows = rng.uniform(p.min_size, p.max_size);
  int cols = rng.uniform(p.min_size, p.max_size);
  return Canvas(rows, cols, p.alpha());
}

int wall_budget(const Canvas& cv, const GenParams& p) {
  return static_cast<int>(std::floor(p.max_wall_density * cv.play_area()));
}

// Columns that cross both border rows without touching a rule slot.
std::vector<int> corridor_columns(const Canvas& cv) {
  std::vector<int> xs;
  for (int x = 3; x <= cv.cols() - 2; x += 4) xs.push_back(x);
  return xs;
}

struct Candidate {
  GridState grid;
  std::string pattern;
};

bool has_noun(const GenParams& p, std::string_view name) {
  return p.alpha().noun_by_name(name) && p.priors.prior(name).has_value();
}

Property prior_of(const GenParams& p, std::string_view noun) {
  auto pr = p.priors.prior(noun);
  if (!pr) throw Error(ErrorKind::SchemaViolation, "prior table has no entry for " + std::string(noun));
  return *pr;
}

std::optional<Candidate> tier1_candidate(Rng& rng, const GenParams& p) {
  Canvas cv = fresh_canvas(rng, p);
  std::vector<std::string> pool;
  for (const char* n : {"ROCK", "LAVA", "WATER", "SKULL", "KEY", "WALL"})
    if (has_noun(p, n) && (std::string_view(n) != "WALL" || wall_budget(cv, p) > 0)) pool.push_back(n);
  int max_extra = std::min<int>({p.max_nouns, static_cast<int>(cv.slots_left())}) - 2;
  int min_extra = std::min(p.min_nouns - 2, max_extra);
  max_extra = std::min<int>(max_extra, static_cast<int>(pool.size()));
  int extra = rng.uniform(std::max(0, min_extra), std::max(0, max_extra));
  rng.shuffle(pool);
  pool.resize(static_cast<std::size_t>(extra));

  cv.add_rule("BABA", prior_of(p, "BABA"));
  cv.add_rule("FLAG", prior_of(p, "FLAG"));
  for (const auto& n : pool) cv.add_rule(n, prior_of(p, n));

  auto baba = cv.random_free(rng);
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  auto flag = cv.random_free(rng, [&](Pos q) { return manhattan(q, *baba) >= 3; });
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));

  for (const auto& n : pool) {
    int count = 1;
    if (n == "WALL") {
      int cap = wall_budget(cv, p);
      count = std::max(1, static_cast<int>(std::lround(rng.unit() * cap)));
    } else if (n == "LAVA") {
      count = rng.uniform(1, 4);
    } else if (n == "KEY") {
      count = rng.uniform(1, 2);
    } else {
      count = rng.uniform(1, 3);
    }
    if (!cv.scatter(rng, cv.icon(n), count)) return std::nullopt;
  }
  return Candidate{cv.g, "aligned"};
}

std::optional<Candidate> wall_pass(Rng& rng, const GenParams& p, Canvas& cv) {
  if (wall_budget(cv, p) < 8) return std::nullopt;
  cv.add_rule("BABA", Property::You);
  cv.add_rule("FLAG", Property::Win);
  cv.add_rule("WALL", Property::Pass);
  auto flag = cv.random_free(rng, [&](Pos q) { return q.row >= 2 && q.row <= cv.rows() - 3; });
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));
  if (!cv.ring(rng, *flag, cv.icon("WALL"), rng.chance(0.35))) return std::nullopt;
  int extra = rng.uniform(0, std::min(3, wall_budget(cv, p) - 8));
  if (!cv.scatter(rng, cv.icon("WALL"), extra)) return std::nullopt;
  auto baba = cv.random_free(rng, [&](Pos q) { return manhattan(q, *flag) >= 3; });
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  if (has_noun(p, "ROCK") && cv.slots_left() > 0 && rng.chance(0.5)) {
    cv.add_rule("ROCK", Property::Push);
    if (!cv.scatter(rng, cv.icon("ROCK"), rng.uniform(1, 2))) return std::nullopt;
  }
  return Candidate{cv.g, "wall-pass"};
}

// YOU on one side of a full-height column of `noun` icons, the flag on the other.
std::optional<Candidate> corridor(Rng& rng, Canvas& cv, std::string_view noun, Property prop, bool gap,
                                  const std::string& pattern) {
  auto xs = corridor_columns(cv);
  if (xs.empty()) return std::nullopt;
  int x = rng.pick(xs);
  cv.add_rule("BABA", Property::You);
  cv.add_rule("FLAG", Property::Win);
  cv.add_rule(noun, prop);
  if (!cv.column(rng, x, cv.icon(noun), gap)) return std::nullopt;
  auto baba = cv.random_free(rng, [&](Pos q) { return q.col < x; });
  auto flag = cv.random_free(rng, [&](Pos q) { return q.col > x; });
  if (!baba || !flag) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  cv.put(*flag, cv.icon("FLAG"));
  return Candidate{cv.g, pattern};
}

std::optional<Candidate> wall_you(Rng& rng, const GenParams& p, Canvas& cv) {
  if (wall_budget(cv, p) < 1) return std::nullopt;
  cv.add_rule("WALL", Property::You);
  cv.add_rule("FLAG", Property::Win);
  int walls = rng.uniform(1, std::min(2, wall_budget(cv, p)));
  if (!cv.scatter(rng, cv.icon("WALL"), walls)) return std::nullopt;
  auto flag = cv.random_free(rng);
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));
  // A BABA sprite with no rule: the prior reading controls it, the rules do not.
  if (!cv.scatter(rng, cv.icon("BABA"), 1)) return std::nullopt;
  if (has_noun(p, "ROCK") && rng.chance(0.5)) {
    cv.add_rule("ROCK", Property::Push);
    if (!cv.scatter(rng, cv.icon("ROCK"), rng.uniform(1, 2))) return std::nullopt;
  }
  return Candidate{cv.g, "wall-you"};
}

std::optional<Candidate> goal_swap(Rng& rng, const GenParams& p, Canvas& cv) {
  std::vector<std::string> goals;
  for (const char* n : {"ROCK", "SKULL", "KEY", "WATER"})
    if (has_noun(p, n)) goals.push_back(n);
  if (goals.empty()) return std::nullopt;
  const auto goal = rng.pick(goals);
  cv.add_rule("BABA", Property::You);
  cv.add_rule(goal, Property::Win);
  auto baba = cv.random_free(rng);
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  auto target = cv.random_free(rng, [&](Pos q) { return manhattan(q, *baba) >= 3; });
  if (!target) return std::nullopt;
  cv.put(*target, cv.icon(goal));
  // The flag sprite is present but carries no rule.
  if (!cv.scatter(rng, cv.icon("FLAG"), 1, [&](Pos q) { return manhattan(q, *baba) >= 2; })) return std::nullopt;
  if (wall_budget(cv, p) > 0 && rng.chance(0.5)) {
    cv.add_rule("WALL", Property::Stop);
    int walls = rng.uniform(1, std::min(6, wall_budget(cv, p)));
    if (!cv.scatter(rng, cv.icon("WALL"), walls)) return std::nullopt;
  }
  return Candidate{cv.g, "goal-swap"};
}

std::optional<Candidate> hazard_twist(Rng& rng, const GenParams& p, Canvas& cv) {
  int kind = rng.uniform(0, 2);
  if (kind == 2 && has_noun(p, "SKULL"))
    return corridor(rng, cv, "SKULL", Property::Safe, rng.chance(0.35), "skull-safe");
  cv.add_rule("BABA", Property::You);
  cv.add_rule("FLAG", Property::Win);
  auto baba = cv.random_free(rng);
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  auto flag = cv.random_free(rng, [&](Pos q) { return manhattan(q, *baba) >= 3; });
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));
  if (kind == 0 && has_noun(p, "ROCK")) {
    cv.add_rule("ROCK", Property::Defeat);
    if (!cv.scatter(rng, cv.icon("ROCK"), rng.uniform(2, 5))) return std::nullopt;
    return Candidate{cv.g, "rock-defeat"};
  }
  if (!has_noun(p, "WATER")) return std::nullopt;
  cv.add_rule("WATER", Property::Push);
  auto near_flag = [&](Pos q) { return manhattan(q, *flag) <= 2; };
  if (!cv.scatter(rng, cv.icon("WATER"), rng.uniform(2, 4), near_flag)) return std::nullopt;
  return Candidate{cv.g, "water-push"};
}

std::optional<Candidate> tier2_candidate(Rng& rng, const GenParams& p) {
  Canvas cv = fresh_canvas(rng, p);
  switch (rng.uniform(0, 4)) {
    case 0: return wall_pass(rng, p, cv);
    case 1:
      if (!has_noun(p, "LAVA")) return std::nullopt;
      return corridor(rng, cv, "LAVA", Property::Safe, rng.chance(0.35), "lava-safe");
    case 2: return wall_you(rng, p, cv);
    case 3: return goal_swap(rng, p, cv);
    default: return hazard_twist(rng, p, cv);
  }
}

// Places a horizontal run of text somewhere in the play area with room to push
// any of its blocks vertically. Returns the first cell.
std::optional<Pos> loose_text(Rng& rng, Canvas& cv, const std::vector<char>& text, int max_col) {
  int n = static_cast<int>(text.size());
  std::vector<Pos> options;
  for (int r = 2; r <= cv.rows() - 3; ++r)
    for (int c = 0; c + n - 1 <= max_col; ++c) {
      bool ok = true;
      for (int i = 0; i < n && ok; ++i)
        ok = cv.free({r, c + i}) && cv.free({r - 1, c + i}) && cv.free({r + 1, c + i});
      if (ok) options.push_back({r, c});
    }
  if (options.empty()) return std::nullopt;
  Pos at = rng.pick(options);
  for (int i = 0; i < n; ++i) cv.put({at.row, at.col + i}, text[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n; ++i) {
    cv.reserve({at.row - 1, at.col + i});
    cv.reserve({at.row + 1, at.col + i});
  }
  return at;
}

std::optional<Candidate> break_stop(Rng& rng, const GenParams& p, Canvas& cv) {
  if (wall_budget(cv, p) < 8) return std::nullopt;
  cv.add_rule("BABA", Property::You);
  cv.add_rule("FLAG", Property::Win);
  auto flag = cv.random_free(rng, [&](Pos q) { return q.row >= 2 && q.row <= cv.rows() - 3; });
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));
  if (!cv.ring(rng, *flag, cv.icon("WALL"), false)) return std::nullopt;
  const auto& wall = cv.noun("WALL");
  if (!loose_text(rng, cv, {wall.text, p.alpha().is_char(), cv.prop(Property::Stop)}, cv.cols() - 1))
    return std::nullopt;
  auto baba = cv.random_free(rng);
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  return Candidate{cv.g, "break-stop"};
}

std::optional<Candidate> make_win(Rng& rng, const GenParams& p, Canvas& cv) {
  cv.add_rule("BABA", Property::You);
  auto slot = cv.add_rule("FLAG", std::nullopt);
  if (!slot) return std::nullopt;
  int x = slot->col;
  bool top = slot->row == 0;
  // WIN text in the slot's column, pushed toward the border row to finish the rule.
  int lo = top ? 1 : 2;
  int hi = top ? cv.rows() - 3 : cv.rows() - 2;
  int w = rng.uniform(lo, hi);
  Pos win{w, x};
  Pos behind{top ? w + 1 : w - 1, x};
  if (!cv.free(win) || !cv.free(behind)) return std::nullopt;
  cv.put(win, cv.prop(Property::Win));
  cv.reserve(behind);
  for (int r = top ? 1 : w + 1; r < (top ? w : cv.rows() - 1); ++r) cv.reserve({r, x});
  if (wall_budget(cv, p) > 0 && rng.chance(0.5)) {
    cv.add_rule("WALL", Property::Stop);
    int walls = rng.uniform(1, std::min(5, wall_budget(cv, p)));
    if (!cv.scatter(rng, cv.icon("WALL"), walls)) return std::nullopt;
  }
  auto baba = cv.random_free(rng);
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  auto flag = cv.random_free(rng, [&](Pos q) { return manhattan(q, *baba) >= 2; });
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));
  return Candidate{cv.g, "make-win"};
}

std::optional<Candidate> break_defeat(Rng& rng, const GenParams& p, Canvas& cv) {
  if (!has_noun(p, "LAVA")) return std::nullopt;
  auto xs = corridor_columns(cv);
  if (xs.empty()) return std::nullopt;
  int x = rng.pick(xs);
  cv.add_rule("BABA", Property::You);
  cv.add_rule("FLAG", Property::Win);
  if (!cv.column(rng, x, cv.icon("LAVA"), false)) return std::nullopt;
  const auto& lava = cv.noun("LAVA");
  if (!loose_text(rng, cv, {lava.text, p.alpha().is_char(), cv.prop(Property::Defeat)}, x - 1)) return std::nullopt;
  auto baba = cv.random_free(rng, [&](Pos q) { return q.col < x; });
  auto flag = cv.random_free(rng, [&](Pos q) { return q.col > x; });
  if (!baba || !flag) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  cv.put(*flag, cv.icon("FLAG"));
  return Candidate{cv.g, "break-defeat"};
}

std::optional<Candidate> form_pass(Rng& rng, const GenParams& p, Canvas& cv) {
  if (wall_budget(cv, p) < 8) return std::nullopt;
  cv.add_rule("BABA", Property::You);
  cv.add_rule("FLAG", Property::Win);
  cv.add_rule("WALL", Property::Stop);
  // "WALL IS" in the play area with PASS two rows below the empty third cell.
  std::vector<Pos> options;
  for (int r = 1; r + 3 <= cv.rows() - 2; ++r)
    for (int c = 0; c + 2 < cv.cols(); ++c) {
      bool ok = cv.free({r, c}) && cv.free({r, c + 1}) && cv.free({r, c + 2}) && cv.free({r + 1, c + 2}) &&
                cv.free({r + 2, c + 2}) && cv.free({r + 3, c + 2});
      if (ok) options.push_back({r, c});
    }
  if (options.empty()) return std::nullopt;
  Pos at = rng.pick(options);
  cv.put(at, cv.noun("WALL").text);
  cv.put({at.row, at.col + 1}, p.alpha().is_char());
  cv.put({at.row + 2, at.col + 2}, cv.prop(Property::Pass));
  for (int dr : {0, 1, 3}) cv.reserve({at.row + dr, at.col + 2});
  auto flag = cv.random_free(rng, [&](Pos q) { return q.row >= 2 && q.row <= cv.rows() - 3; });
  if (!flag) return std::nullopt;
  cv.put(*flag, cv.icon("FLAG"));
  if (!cv.ring(rng, *flag, cv.icon("WALL"), false)) return std::nullopt;
  auto baba = cv.random_free(rng);
  if (!baba) return std::nullopt;
  cv.put(*baba, cv.icon("BABA"));
  return Candidate{cv.g, "form-pass"};
}

std::optional<Candidate> tier3_candidate(Rng& rng, const GenParams& p) {
  Canvas cv = fresh_canvas(rng, p);
  switch (rng.uniform(0, 3)) {
    case 0: return break_stop(rng, p, cv);
    case 1: return make_win(rng, p, cv);
    case 2: return break_defeat(rng, p, cv);
    default: return form_pass(rng, p, cv);
  }
}

std::string seed_id(const char* prefix, std::uint64_t seed) { return std::string(prefix) + to_hex(seed); }

bool path_changes_rules(const GridState& start, const std::vector<Action>& actions, const DynamicsConfig& cfg) {
  GridState s = start;
  for (auto a : actions) {
    auto out = next_state(s, a, cfg);
    if (out.rules_changed) return true;
    s = std::move(out.next);
  }
  return false;
}

}  // namespace

LevelCheck validate_level(const Level& level, const GenParams& params) {
  LevelCheck out;
  auto reject = [&](std::string why) {
    out.ok = false;
    out.reason = std::move(why);
    return out;
  };
  const auto& alpha = params.alpha();
  auto rules = parse_rules(level.grid, alpha);
  bool has_you = std::any_of(rules.begin(), rules.end(), [](const Rule& r) { return r.property == Property::You; });
  if (!has_you) return reject("no YOU rule");
  if (level.tier < 1 || level.tier > 3) return reject("tier out of range");
  if (check_win(level.grid, params.dynamics)) return reject("won before any move");

  auto contra = params.priors.contradictions(rules);
  if (level.tier == 1) {
    // The minus member of a tier-1 pair may contradict priors on its pivot only.
    RuleSet allowed;
    if (level.pair_id && level.pivot && !params.priors.aligned({level.pivot->noun, level.pivot->minus}))
      allowed.insert({level.pivot->noun, level.pivot->minus});
    for (const auto& r : contra)
      if (!allowed.contains(r)) return reject("rule contradicts priors: " + r.to_string());
  } else if (level.tier == 2 && contra.empty()) {
    return reject("no rule contradicts priors");
  }

  PlannerConfig pc{params.budget, params.dynamics};
  if (level.tier == 3) {
    FrozenTextOracle frozen(std::make_shared<NativeOracle>(params.dynamics), alpha);
    out.frozen_plan = plan(level.grid, frozen, pc);
    if (out.frozen_plan->status != PlanStatus::Fail)
      return reject(std::string("frozen-text search ended with ") +
                    std::string(plan_status_name(out.frozen_plan->status)));
  }
  NativeOracle native(params.dynamics);
  out.plan = plan(level.grid, native, pc);
  if (!out.plan.solved()) return reject("planner: " + std::string(plan_status_name(out.plan.status)));
  out.rules_changed_on_path = path_changes_rules(level.grid, out.plan.actions, params.dynamics);
  if (level.tier == 3 && !out.rules_changed_on_path) return reject("solution never edits a rule");
  out.ok = true;
  return out;
}

Level generate_level(int tier, std::uint64_t seed, const GenParams& params) {
  params.validate();
  if (tier < 1 || tier > 3) throw Error(ErrorKind::SchemaViolation, "tier must be 1, 2 or 3");
  Rng rng(seed);
  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    std::optional<Candidate> cand;
    switch (tier) {
      case 1: cand = tier1_candidate(rng, params); break;
      case 2: cand = tier2_candidate(rng, params); break;
      default: cand = tier3_candidate(rng, params); break;
    }
    if (!cand) continue;
    Level level;
    level.id = seed_id(tier == 1 ? "t1-" : tier == 2 ? "t2-" : "t3-", seed);
    level.grid = std::move(cand->grid);
    level.tier = tier;
    level.seed = seed;
    auto check = validate_level(level, params);
    if (!check.ok) continue;
    level.metadata = {{"pattern", cand->pattern},
                      {"attempts", attempt},
                      {"plan_length", check.plan.actions.size()},
                      {"expansions", check.plan.expansions}};
    return level;
  }
  throw Error(ErrorKind::GenerationExhausted,
              "tier " + std::to_string(tier) + ": no valid level after " + std::to_string(params.max_attempts) +
                  " attempts");
}

GridState icon_projection(const GridState& g, const AlphabetConfig& alphabet) {
  GridState out(g.rows(), g.cols());
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      for (char ch : g.at(r, c))
        if (alphabet.is_icon(ch)) out.at(r, c).push_back(ch);
  return out;
}

std::optional<std::vector<Action>> divergence_witness(const GridState& a, const GridState& b,
                                                      const DynamicsConfig& cfg, int max_prefix) {
  const auto& alpha = cfg.alpha();
  // Breadth-first over action sequences so the shortest witness is found first.
  struct Node {
    GridState a, b;
    std::vector<Action> path;
  };
  std::vector<Node> layer{{a, b, {}}};
  for (int depth = 0; depth <= max_prefix; ++depth) {
    std::vector<Node> next_layer;
    for (const auto& node : layer) {
      for (auto act : kAllActions) {
        auto na = next_state(node.a, act, cfg).next;
        auto nb = next_state(node.b, act, cfg).next;
        auto path = node.path;
        path.push_back(act);
        if (!(icon_projection(na, alpha) == icon_projection(nb, alpha))) return path;
        if (depth < max_prefix) next_layer.push_back({std::move(na), std::move(nb), std::move(path)});
      }
    }
    layer = std::move(next_layer);
  }
  return std::nullopt;
}

namespace {

std::optional<CounterfactualPair> pair_candidate(int tier, Rng& rng, const GenParams& p) {
  std::vector<Pivot> pivots;
  for (const auto& pv : p.pivots)
    if (has_noun(p, pv.noun)) pivots.push_back(pv);
  if (pivots.empty()) return std::nullopt;
  Pivot pivot = rng.pick(pivots);

  Canvas cv = fresh_canvas(rng, p);
  std::string goal = "FLAG";
  if (tier == 2) {
    std::vector<std::string> goals;
    for (const char* n : {"KEY", "SKULL", "ROCK", "WATER", "LAVA"})
      if (has_noun(p, n) && pivot.noun != n) goals.push_back(n);
    if (goals.empty()) return std::nullopt;
    goal = rng.pick(goals);
  }
  cv.add_rule("BABA", Property::You);
  cv.add_rule(goal, Property::Win);
  auto slot = cv.add_rule(pivot.noun, std::nullopt);
  if (!slot) return std::nullopt;

  // A column of pivot sprites between YOU and the goal, with one gap so both
  // readings of the pivot stay solvable.
  int x = rng.uniform(2, cv.cols() - 3);
  int gap = rng.uniform(1, cv.rows() - 2);
  int baba_row = rng.uniform(1, cv.rows() - 2);
  std::vector<int> rows;
  for (int r = 1; r <= cv.rows() - 2; ++r)
    if (r != gap) rows.push_back(r);
  std::stable_sort(rows.begin(), rows.end(),
                   [&](int l, int r) { return std::abs(l - baba_row) < std::abs(r - baba_row); });
  std::size_t limit = rows.size();
  if (pivot.noun == "WALL") limit = std::min(limit, static_cast<std::size_t>(std::max(0, wall_budget(cv, p))));
  for (std::size_t i = 0; i < limit; ++i) cv.put({rows[i], x}, cv.icon(pivot.noun));
  int baba_col = x - rng.uniform(1, 2);
  if (!cv.free({baba_row, baba_col})) return std::nullopt;
  cv.put({baba_row, baba_col}, cv.icon("BABA"));
  auto target = cv.random_free(rng, [&](Pos q) { return q.col > x; });
  if (!target) return std::nullopt;
  cv.put(*target, cv.icon(goal));

  CounterfactualPair pair;
  pair.pivot = pivot;
  pair.base_grid = cv.g;
  pair.pivot_slot = *slot;
  GridState plus = cv.g, minus = cv.g;
  plus.at(*slot).push_back(cv.prop(pivot.plus));
  minus.at(*slot).push_back(cv.prop(pivot.minus));
  auto witness = divergence_witness(plus, minus, p.dynamics, 3);
  if (!witness) return std::nullopt;
  pair.witness = *witness;
  pair.plus_rules = parse_rules(plus, p.alpha());
  pair.minus_rules = parse_rules(minus, p.alpha());
  pair.plus_level.grid = std::move(plus);
  pair.minus_level.grid = std::move(minus);
  return pair;
}

}  // namespace

CounterfactualPair generate_pair(int tier, std::uint64_t seed, const GenParams& params) {
  params.validate();
  if (tier != 1 && tier != 2) throw Error(ErrorKind::SchemaViolation, "pairs exist for tiers 1 and 2 only");
  Rng rng(seed);
  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    auto cand = pair_candidate(tier, rng, params);
    if (!cand) continue;
    cand->pair_id = seed_id(tier == 1 ? "t1-pair-" : "t2-pair-", seed);
    bool ok = true;
    for (auto* member : {&cand->plus_level, &cand->minus_level}) {
      bool is_plus = member == &cand->plus_level;
      member->id = cand->pair_id + (is_plus ? "-plus" : "-minus");
      member->tier = tier;
      member->seed = seed;
      member->pair_id = cand->pair_id;
      member->pivot = cand->pivot;
      auto check = validate_level(*member, params);
      if (!check.ok) {
        ok = false;
        break;
      }
      nlohmann::json witness = nlohmann::json::array();
      for (auto a : cand->witness) witness.push_back(std::string(action_name(a)));
      member->metadata = {{"member", is_plus ? "plus" : "minus"},
                          {"attempts", attempt},
                          {"plan_length", check.plan.actions.size()},
                          {"expansions", check.plan.expansions},
                          {"pivot_slot", {cand->pivot_slot.row, cand->pivot_slot.col}},
                          {"witness", witness}};
    }
    if (ok) return std::move(*cand);
  }
  throw Error(ErrorKind::GenerationExhausted,
              "tier " + std::to_string(tier) + " pair: no valid pair after " + std::to_string(params.max_attempts) +
                  " attempts");
}

SuiteSpec SuiteSpec::standard(std::uint64_t master_seed) {
  SuiteSpec spec;
  spec.master_seed = master_seed;
  spec.parts = {{1, 45, false}, {2, 45, false}, {3, 50, false}};
  return spec;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json entries_doc = nlohmann::json::array();
  for (const auto& e : entries) {
    entries_doc.push_back({{"id", e.id},
                           {"file", e.file},
                           {"tier", e.tier},
                           {"seed", e.seed},
                           {"pair_id", e.pair_id ? nlohmann::json(*e.pair_id) : nlohmann::json(nullptr)},
                           {"checksum", e.checksum}});
  }
  return {{"format_version", kLevelFormatVersion}, {"master_seed", master_seed}, {"entries", entries_doc}};
}

Manifest Manifest::from_json(const nlohmann::json& doc) {
  Manifest m;
  try {
    if (!doc.is_object() || doc.value("format_version", 0) != kLevelFormatVersion)
      throw Error(ErrorKind::SchemaViolation, "manifest: unsupported or missing format_version");
    m.master_seed = doc.at("master_seed").get<std::uint64_t>();
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.id = e.at("id").get<std::string>();
      entry.file = e.at("file").get<std::string>();
      entry.tier = e.at("tier").get<int>();
      entry.seed = e.at("seed").get<std::uint64_t>();
      if (e.contains("pair_id") && !e["pair_id"].is_null()) entry.pair_id = e["pair_id"].get<std::string>();
      entry.checksum = e.at("checksum").get<std::string>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("manifest: ") + e.what());
  }
  return m;
}

std::uint64_t level_seed(std::uint64_t master_seed, std::size_t part, int tier, bool pairs, std::size_t index) {
  std::uint64_t key = (static_cast<std::uint64_t>(part) << 40) ^ (static_cast<std::uint64_t>(tier) << 32) ^
                      (static_cast<std::uint64_t>(pairs) << 31) ^ static_cast<std::uint64_t>(index);
  return splitmix64(master_seed ^ splitmix64(key));
}

std::vector<Level> generate_suite(const SuiteSpec& spec, int jobs) {
  spec.params.validate();
  struct Job {
    std::size_t part;
    std::size_t index;
  };
  std::vector<Job> work;
  std::map<std::pair<int, bool>, int> kinds;
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    const auto& part = spec.parts[p];
    if (part.count < 0) throw Error(ErrorKind::SchemaViolation, "suite part count must be non-negative");
    if (part.pairs && part.tier == 3) throw Error(ErrorKind::SchemaViolation, "pairs exist for tiers 1 and 2 only");
    kinds[{part.tier, part.pairs}]++;
    for (int i = 0; i < part.count; ++i) work.push_back({p, static_cast<std::size_t>(i)});
  }

  std::vector<std::vector<Level>> produced(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t k) {
    const auto& job = work[k];
    const auto& part = spec.parts[job.part];
    std::uint64_t seed = level_seed(spec.master_seed, job.part, part.tier, part.pairs, job.index);
    char name[64];
    std::string prefix = kinds.at({part.tier, part.pairs}) > 1 ? "s" + std::to_string(job.part) + "-" : "";
    if (part.pairs) {
      auto pair = generate_pair(part.tier, seed, spec.params);
      std::snprintf(name, sizeof name, "t%d-pair%03zu", part.tier, job.index);
      std::string pid = prefix + name;
      pair.plus_level.id = pid + "-plus";
      pair.minus_level.id = pid + "-minus";
      pair.plus_level.pair_id = pid;
      pair.minus_level.pair_id = pid;
      produced[k] = {std::move(pair.plus_level), std::move(pair.minus_level)};
    } else {
      auto level = generate_level(part.tier, seed, spec.params);
      std::snprintf(name, sizeof name, "t%d-%03zu", part.tier, job.index);
      level.id = prefix + name;
      produced[k] = {std::move(level)};
    }
  });

  std::vector<Level> levels;
  for (auto& group : produced)
    for (auto& l : group) levels.push_back(std::move(l));
  return levels;
}

std::filesystem::path export_suite(const SuiteSpec& spec, const std::filesystem::path& out_dir, int jobs) {
  auto levels = generate_suite(spec, jobs);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string());
  Manifest manifest;
  manifest.master_seed = spec.master_seed;
  for (const auto& level : levels) {
    auto text = level_file_text(level, spec.params.alpha());
    std::string file = level.id + ".json";
    write_file_atomic(out_dir / file, text);
    manifest.entries.push_back({level.id, file, level.tier, level.seed, level.pair_id, to_hex(hash_bytes(text))});
  }
  auto path = out_dir / kManifestFile;
  write_file_atomic(path, manifest.to_json().dump(2) + "\n");
  return path;
}

Manifest read_manifest(const std::filesystem::path& manifest_path) {
  auto text = read_file(manifest_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, manifest_path.string() + ": " + e.what());
  }
  return Manifest::from_json(doc);
}

Level load_manifest_level(const std::filesystem::path& manifest_path, const ManifestEntry& entry,
                          const AlphabetConfig& alphabet) {
  auto path = manifest_path.parent_path() / entry.file;
  auto text = read_file(path);
  if (to_hex(hash_bytes(text)) != entry.checksum)
    throw Error(ErrorKind::SchemaViolation, entry.file + ": checksum mismatch");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, entry.file + ": " + e.what());
  }
  return decode_level(doc, alphabet);
}

}  // namespace babagrid
