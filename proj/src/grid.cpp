#include "babagrid/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "babagrid/error.hpp"
#include "babagrid/hash.hpp"

namespace babagrid {

std::string to_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Up: return "UP";
    case Action::Down: return "DOWN";
    case Action::Left: return "LEFT";
    case Action::Right: return "RIGHT";
  }
  return "?";
}

Action parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  throw Error(ErrorKind::InvalidAction, "unknown action '" + std::string(name) + "'");
}

namespace {

void check_dims(int rows, int cols) {
  if (rows <= 0 || cols <= 0 || rows > kMaxGridDim || cols > kMaxGridDim) {
    throw Error(ErrorKind::InvalidGrid, "grid dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                                            " outside 1.." + std::to_string(kMaxGridDim));
  }
}

}  // namespace

GridState::GridState(int rows, int cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  cells_.resize(static_cast<std::size_t>(rows) * cols);
}

GridState::GridState(int rows, int cols, std::vector<std::string> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  check_dims(rows, cols);
  if (cells_.size() != static_cast<std::size_t>(rows) * cols)
    throw Error(ErrorKind::InvalidGrid, "cell count does not match dimensions");
}

bool GridState::identical(const GridState& other) const noexcept {
  return rows_ == other.rows_ && cols_ == other.cols_ && cells_ == other.cells_;
}

bool GridState::operator==(const GridState& other) const noexcept {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& a = cells_[i];
    const auto& b = other.cells_[i];
    if (a.size() != b.size()) return false;
    if (a == b) continue;
    std::string sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  return true;
}

GridState GridState::canonical() const {
  GridState out = *this;
  for (auto& cell : out.cells_) std::sort(cell.begin(), cell.end());
  return out;
}

namespace {

std::string cell_from_token(std::string_view token, int row, int col, const AlphabetConfig& alphabet) {
  if (token.size() == 1 && token[0] == alphabet.empty_char()) return {};
  for (char ch : token) {
    auto cls = alphabet.classify(ch);
    if (cls == EntityClass::Invalid || cls == EntityClass::Empty) {
      throw Error(ErrorKind::UnknownChar, "char '" + std::string(1, ch) + "' at row " + std::to_string(row) +
                                              ", col " + std::to_string(col));
    }
  }
  return std::string(token);
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

GridState parse_ascii(std::string_view text, const AlphabetConfig& alphabet) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  // Trailing blank lines (e.g. a final newline) are not rows.
  while (!lines.empty() && split_tokens(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::InvalidGrid, "empty grid text");

  int rows = static_cast<int>(lines.size());
  int cols = -1;
  std::vector<std::string> cells;
  for (int r = 0; r < rows; ++r) {
    auto tokens = split_tokens(lines[static_cast<std::size_t>(r)]);
    if (cols < 0) {
      cols = static_cast<int>(tokens.size());
      if (cols == 0) throw Error(ErrorKind::RaggedGrid, "row 0 is empty");
      if (rows > kMaxGridDim || cols > kMaxGridDim) check_dims(rows, cols);
      cells.reserve(static_cast<std::size_t>(rows) * cols);
    } else if (static_cast<int>(tokens.size()) != cols) {
      throw Error(ErrorKind::RaggedGrid, "row " + std::to_string(r) + " has " + std::to_string(tokens.size()) +
                                             " cells, expected " + std::to_string(cols));
    }
    for (int c = 0; c < cols; ++c) cells.push_back(cell_from_token(tokens[static_cast<std::size_t>(c)], r, c, alphabet));
  }
  return GridState(rows, cols, std::move(cells));
}

std::string encode_ascii(const GridState& g, const AlphabetConfig& alphabet) {
  std::string out;
  for (int r = 0; r < g.rows(); ++r) {
    if (r) out.push_back('\n');
    for (int c = 0; c < g.cols(); ++c) {
      if (c) out.push_back(' ');
      const auto& cell = g.at(r, c);
      if (cell.empty())
        out.push_back(alphabet.empty_char());
      else
        out += cell;
    }
  }
  return out;
}

nlohmann::json encode_structured(const GridState& g, const AlphabetConfig& alphabet) {
  nlohmann::json cells = nlohmann::json::array();
  for (int r = 0; r < g.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < g.cols(); ++c) {
      const auto& cell = g.at(r, c);
      row.push_back(cell.empty() ? std::string(1, alphabet.empty_char()) : cell);
    }
    cells.push_back(std::move(row));
  }
  return {{"rows", g.rows()}, {"cols", g.cols()}, {"cells", std::move(cells)}};
}

GridState decode_structured(const nlohmann::json& doc, const AlphabetConfig& alphabet) {
  auto violation = [](const std::string& what) { return Error(ErrorKind::SchemaViolation, what); };
  if (!doc.is_object()) throw violation("grid document must be an object");
  for (const char* field : {"rows", "cols", "cells"}) {
    if (!doc.contains(field)) throw violation(std::string("missing field '") + field + "'");
  }
  if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer())
    throw violation("'rows' and 'cols' must be integers");
  int rows = doc["rows"].get<int>();
  int cols = doc["cols"].get<int>();
  if (rows <= 0 || cols <= 0 || rows > kMaxGridDim || cols > kMaxGridDim) throw violation("dimensions out of range");
  const auto& cells = doc["cells"];
  if (!cells.is_array() || static_cast<int>(cells.size()) != rows) throw violation("'cells' must have 'rows' rows");
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = cells[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw violation("row " + std::to_string(r) + " must have 'cols' cells");
    for (int c = 0; c < cols; ++c) {
      const auto& tok = row[static_cast<std::size_t>(c)];
      if (!tok.is_string() || tok.get_ref<const std::string&>().empty())
        throw violation("cell token at row " + std::to_string(r) + ", col " + std::to_string(c) + " must be a non-empty string");
      out.push_back(cell_from_token(tok.get_ref<const std::string&>(), r, c, alphabet));
    }
  }
  return GridState(rows, cols, std::move(out));
}

std::string StateHash::hex() const { return to_hex(digest); }

StateHash hash_state(const GridState& g) {
  Hasher h;
  h.update_u64(static_cast<std::uint64_t>(g.rows()));
  h.update_u64(static_cast<std::uint64_t>(g.cols()));
  std::string sorted;
  for (const auto& cell : g.cells()) {
    if (cell.size() > 1) {
      sorted = cell;
      std::sort(sorted.begin(), sorted.end());
      h.update(sorted);
    } else {
      h.update(cell);
    }
    h.update_byte(0xff);  // cell separator, never a printable char
  }
  return StateHash{h.digest()};
}

}  // namespace babagrid
