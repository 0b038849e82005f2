#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "babagrid/grid.hpp"

namespace fixtures {

// The Level 0-0 map from the benchmark's direct-action prompt.
inline const std::string kLevel00 =
    "B = Y . . . . . F = W\n"
    ". . . . . . . . . . .\n"
    ". . w w w w w . . . .\n"
    ". . w . . . w . . . .\n"
    ". . w . b r f . . . .\n"
    ". . w . . . w . . . .\n"
    ". . w w w w w . . . .\n"
    ". . . . . . . . . . .\n"
    "# = S . . O = P . . .";

inline babagrid::GridState level00() { return babagrid::parse_ascii(kLevel00); }

// Random grid whose stacks draw from `pool`; each cell is empty with
// probability `empty_p`, else holds 1-3 chars.
inline babagrid::GridState random_grid(std::mt19937_64& rng, int rows, int cols, const std::string& pool,
                                       double empty_p = 0.5) {
  babagrid::GridState g(rows, cols);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> depth(1, 3);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (u(rng) < empty_p) continue;
      int n = depth(rng);
      for (int i = 0; i < n; ++i) g.at(r, c).push_back(pool[pick(rng)]);
    }
  }
  return g;
}

inline const std::string kAllChars = "BFO#LKDAXYWSPENMHGCVZ=bfrwlkdax";
inline const std::string kIconChars = "bfrwlkdax";
inline const std::string kNounChars = "BFO#LKDAX";
inline const std::string kPropChars = "YWSPENMHGCVZ";

// Grid with single-char cells and a few rule triples stamped in, so steps
// exercise pushes, rule reads and property interactions.
inline babagrid::GridState random_play_grid(std::mt19937_64& rng, int rows, int cols, int triples = 3) {
  babagrid::GridState g(rows, cols);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> icon(0, kIconChars.size() - 1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double x = u(rng);
      if (x < 0.35) g.at(r, c) = std::string(1, kIconChars[icon(rng)]);
      else if (x < 0.40) g.at(r, c) = std::string(1, kIconChars[icon(rng)]) + kIconChars[icon(rng)];
    }
  std::uniform_int_distribution<std::size_t> noun(0, kNounChars.size() - 1), prop(0, kPropChars.size() - 1);
  for (int t = 0; t < triples; ++t) {
    bool horizontal = u(rng) < 0.5;
    int r0 = std::uniform_int_distribution<int>(0, horizontal ? rows - 1 : rows - 3)(rng);
    int c0 = std::uniform_int_distribution<int>(0, horizontal ? cols - 3 : cols - 1)(rng);
    int dr = horizontal ? 0 : 1, dc = horizontal ? 1 : 0;
    g.at(r0, c0) = std::string(1, kNounChars[noun(rng)]);
    g.at(r0 + dr, c0 + dc) = "=";
    g.at(r0 + 2 * dr, c0 + 2 * dc) = std::string(1, kPropChars[prop(rng)]);
  }
  // Guarantee a controllable icon: BABA IS YOU on a free line where possible.
  if (u(rng) < 0.8) {
    int r = std::uniform_int_distribution<int>(0, rows - 1)(rng);
    g.at(r, 0) = "B";
    g.at(r, 1) = "=";
    g.at(r, 2) = "Y";
    int br = std::uniform_int_distribution<int>(0, rows - 1)(rng);
    int bc = std::uniform_int_distribution<int>(0, cols - 1)(rng);
    if (br != r) g.at(br, bc) += "b";
  }
  return g;
}

}  // namespace fixtures
