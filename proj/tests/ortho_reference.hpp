#pragma once

#include <array>
#include <vector>

// Published orthogonal-function coefficients for p = 9: alpha_i =
// sign_i sqrt(2/(i+1)) and integer rows a_i1 .. a_ii.
namespace testutil {

inline constexpr std::array<int, 9> kOrthoSigns = {+1, -1, +1, -1, +1, -1, +1, -1, +1};

inline const std::vector<std::vector<long long>>& ortho_rows() {
  static const std::vector<std::vector<long long>> rows = {
      {1},
      {6, -5},
      {20, -40, 21},
      {50, -175, 210, -84},
      {105, -560, 1134, -1008, 330},
      {196, -1470, 4410, -6468, 4620, -1287},
      {336, -3360, 13860, -29568, 34320, -20592, 5005},
      {540, -6930, 37422, -108108, 180180, -173745, 90090, -19448},
      {825, -13200, 90090, -336336, 750750, -1029600, 850850, -388960, 75582},
  };
  return rows;
}

}  // namespace testutil
