#include "babagrid/kernel_template.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "babagrid/error.hpp"
#include "babagrid/io.hpp"

namespace babagrid {

namespace {

// Kernel dialect: the step function of the engine in plain Python, with the
// property sets baked in as constants. Grids are lists of rows of cell strings.
const char* const kReferenceKernel = R"PY(YOU_CHARS    = {you_chars}
WIN_CHARS    = {win_chars}
STOP_CHARS   = {stop_chars}
PUSH_CHARS   = {push_chars}
DEFEAT_CHARS = {defeat_chars}
SINK_CHARS   = {sink_chars}
MELT_CHARS   = {melt_chars}
HOT_CHARS    = {hot_chars}
OPEN_CHARS   = {open_chars}
SHUT_CHARS   = {shut_chars}
DANGEROUS_TEXT_CHARS = {dangerous_text_chars}
UNLOCK = {unlock}


def next_state(grid, move):
    height = len(grid)
    if height == 0:
        return grid
    width = len(grid[0])
    new_grid = [row[:] for row in grid]

    directions = {{"UP": (-1, 0), "DOWN": (1, 0), "LEFT": (0, -1), "RIGHT": (0, 1)}}
    if move not in directions:
        return new_grid
    dy, dx = directions[move]

    you_pos = []
    for r in range(height):
        for c in range(width):
            for char in new_grid[r][c]:
                if char in YOU_CHARS:
                    you_pos.append((r, c, char))
    if not you_pos:
        return new_grid
    you_pos.sort()

    for r, c, me in you_pos:
        if me not in new_grid[r][c]:
            continue
        nr, nc = r + dy, c + dx
        if not (0 <= nr < height and 0 <= nc < width):
            continue

        target_cell = new_grid[nr][nc]
        if any(o in PUSH_CHARS for o in target_cell):
            chain = []
            curr_r, curr_c = nr, nc
            can_push = True
            unlock_front = False
            while True:
                if not (0 <= curr_r < height and 0 <= curr_c < width):
                    can_push = False
                    break
                cell_objs = new_grid[curr_r][curr_c]
                if not any(o in PUSH_CHARS for o in cell_objs):
                    fr, fc = chain[-1]
                    front = new_grid[fr][fc]
                    unlock_front = (UNLOCK and any(o in SHUT_CHARS for o in cell_objs)
                                    and any(o in PUSH_CHARS and o in OPEN_CHARS for o in front))
                    if any(o in STOP_CHARS for o in cell_objs) and not unlock_front:
                        can_push = False
                    break
                chain.append((curr_r, curr_c))
                curr_r += dy
                curr_c += dx
            if not can_push:
                continue

            first = True
            for tr, tc in reversed(chain):
                n_tr, n_tc = tr + dy, tc + dx
                src_cell = new_grid[tr][tc]
                moving = "".join(o for o in src_cell if o in PUSH_CHARS)
                staying = "".join(o for o in src_cell if o not in PUSH_CHARS)
                new_grid[tr][tc] = staying
                dest = new_grid[n_tr][n_tc] + moving
                if first and unlock_front:
                    key = next(o for o in moving if o in OPEN_CHARS)
                    door = next(o for o in dest if o in SHUT_CHARS)
                    dest = dest.replace(door, "", 1).replace(key, "", 1)
                new_grid[n_tr][n_tc] = dest
                first = False
            target_cell = new_grid[nr][nc]

        opens = UNLOCK and me in OPEN_CHARS and any(o in SHUT_CHARS for o in target_cell)
        if any(o in STOP_CHARS for o in target_cell) and not opens:
            continue
        if opens:
            door = next(o for o in target_cell if o in SHUT_CHARS)
            new_grid[r][c] = new_grid[r][c].replace(me, "", 1)
            new_grid[nr][nc] = target_cell.replace(door, "", 1)
            continue
        if any(o in DANGEROUS_TEXT_CHARS or o in DEFEAT_CHARS for o in target_cell):
            new_grid[r][c] = new_grid[r][c].replace(me, "", 1)
            continue
        sink_obj = next((o for o in target_cell if o in SINK_CHARS), None)
        if sink_obj is not None:
            new_grid[r][c] = new_grid[r][c].replace(me, "", 1)
            new_grid[nr][nc] = target_cell.replace(sink_obj, "", 1)
            continue
        if me in MELT_CHARS and any(o in HOT_CHARS for o in target_cell):
            new_grid[r][c] = new_grid[r][c].replace(me, "", 1)
            continue

        new_grid[r][c] = new_grid[r][c].replace(me, "", 1)
        new_grid[nr][nc] = target_cell + me

    return new_grid


def check_win(grid):
    for row in grid:
        for cell in row:
            if any(ch in YOU_CHARS for ch in cell) and any(ch in WIN_CHARS for ch in cell):
                return True
    return False
)PY";

bool name_char(char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; }

Error render_error(const std::string& what) { return Error(ErrorKind::TemplateRenderError, what); }

template <class OnText, class OnName>
void scan(const std::string& text, OnText&& on_text, OnName&& on_name) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '{') {
      if (i + 1 < text.size() && text[i + 1] == '{') {
        on_text('{');
        ++i;
        continue;
      }
      auto close = text.find('}', i + 1);
      if (close == std::string::npos) throw render_error("unclosed '{' at offset " + std::to_string(i));
      std::string name = text.substr(i + 1, close - i - 1);
      if (name.empty() || !std::all_of(name.begin(), name.end(), name_char))
        throw render_error("malformed placeholder '{" + name + "}'");
      on_name(name);
      i = close;
    } else if (ch == '}') {
      if (i + 1 < text.size() && text[i + 1] == '}') {
        on_text('}');
        ++i;
        continue;
      }
      throw render_error("stray '}' at offset " + std::to_string(i));
    } else {
      on_text(ch);
    }
  }
}

}  // namespace

KernelTemplate::KernelTemplate(std::string text) : text_(std::move(text)) {
  scan(text_, [](char) {}, [](const std::string&) {});
}

const KernelTemplate& KernelTemplate::reference() {
  static const KernelTemplate tmpl{std::string(kReferenceKernel)};
  return tmpl;
}

KernelTemplate KernelTemplate::from_file(const std::filesystem::path& path) { return KernelTemplate(read_file(path)); }

std::vector<std::string> KernelTemplate::placeholders() const {
  std::set<std::string> names;
  scan(text_, [](char) {}, [&](const std::string& n) { names.insert(n); });
  return {names.begin(), names.end()};
}

std::string KernelTemplate::render(const std::map<std::string, std::string>& bindings) const {
  std::string out;
  out.reserve(text_.size() + 256);
  scan(
      text_, [&](char ch) { out.push_back(ch); },
      [&](const std::string& name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw render_error("no value for placeholder '{" + name + "}'");
        out += it->second;
      });
  return out;
}

std::string python_set_literal(const CharSet& chars) {
  auto s = chars_of(chars);
  if (s.empty()) return "set()";
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += '\'';
    if (s[i] == '\\' || s[i] == '\'') out += '\\';
    out += s[i];
    out += '\'';
  }
  return out + "}";
}

std::map<std::string, std::string> kernel_bindings(const StepSets& sets) {
  return {
      {"you_chars", python_set_literal(sets.you)},       {"win_chars", python_set_literal(sets.win)},
      {"stop_chars", python_set_literal(sets.stop)},     {"push_chars", python_set_literal(sets.push)},
      {"defeat_chars", python_set_literal(sets.defeat)}, {"sink_chars", python_set_literal(sets.sink)},
      {"melt_chars", python_set_literal(sets.melt)},     {"hot_chars", python_set_literal(sets.hot)},
      {"open_chars", python_set_literal(sets.open)},     {"shut_chars", python_set_literal(sets.shut)},
      {"dangerous_text_chars", python_set_literal(sets.dangerous)},
      {"unlock", sets.unlock ? "True" : "False"},
  };
}

std::string render_kernel(const KernelTemplate& tmpl, const RuleSet& rules, const DynamicsConfig& cfg) {
  auto sets = step_sets(property_sets(rules, cfg.alpha()), cfg);
  return tmpl.render(kernel_bindings(sets));
}

}  // namespace babagrid
