#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "babagrid/alphabet.hpp"
#include "json.hpp"

namespace babagrid {

inline constexpr int kMaxGridDim = 64;

enum class Action : std::uint8_t { Up, Down, Left, Right };

inline constexpr std::array<Action, 4> kAllActions = {Action::Up, Action::Down, Action::Left, Action::Right};

struct Delta {
  int drow;
  int dcol;
};

constexpr Delta delta(Action a) noexcept {
  switch (a) {
    case Action::Up: return {-1, 0};
    case Action::Down: return {1, 0};
    case Action::Left: return {0, -1};
    case Action::Right: return {0, 1};
  }
  return {0, 0};
}

std::string_view action_name(Action a);
// Throws Error(InvalidAction) for anything but UP/DOWN/LEFT/RIGHT.
Action parse_action(std::string_view name);

struct Pos {
  int row = 0;
  int col = 0;
  auto operator<=>(const Pos&) const = default;
};

// A rows x cols grid of entity stacks. A cell's stack is a string of entity
// chars in insertion order; the empty stack is "". Equality is set-like per
// cell (stacks compared after sorting); identical() compares exact order.
class GridState {
 public:
  GridState() = default;
  GridState(int rows, int cols);
  GridState(int rows, int cols, std::vector<std::string> cells);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool in_bounds(int r, int c) const noexcept { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }
  bool in_bounds(Pos p) const noexcept { return in_bounds(p.row, p.col); }

  const std::string& at(int r, int c) const { return cells_[index(r, c)]; }
  std::string& at(int r, int c) { return cells_[index(r, c)]; }
  const std::string& at(Pos p) const { return at(p.row, p.col); }
  std::string& at(Pos p) { return at(p.row, p.col); }

  const std::vector<std::string>& cells() const noexcept { return cells_; }

  bool identical(const GridState& other) const noexcept;
  bool operator==(const GridState& other) const noexcept;

  // Copy with every stack sorted.
  GridState canonical() const;

 private:
  std::size_t index(int r, int c) const noexcept { return static_cast<std::size_t>(r) * cols_ + c; }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::string> cells_;
};

GridState parse_ascii(std::string_view text, const AlphabetConfig& alphabet = AlphabetConfig::standard());
std::string encode_ascii(const GridState& g, const AlphabetConfig& alphabet = AlphabetConfig::standard());

// {"rows":R,"cols":C,"cells":[[token,...],...]} with tokens as in the ASCII codec.
nlohmann::json encode_structured(const GridState& g, const AlphabetConfig& alphabet = AlphabetConfig::standard());
GridState decode_structured(const nlohmann::json& doc, const AlphabetConfig& alphabet = AlphabetConfig::standard());

struct StateHash {
  std::uint64_t digest = 0;
  auto operator<=>(const StateHash&) const = default;
  std::string hex() const;
};

StateHash hash_state(const GridState& g);

}  // namespace babagrid

template <>
struct std::hash<babagrid::StateHash> {
  std::size_t operator()(const babagrid::StateHash& h) const noexcept { return static_cast<std::size_t>(h.digest); }
};
