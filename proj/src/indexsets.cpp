#include "nlwave/indexsets.hpp"

namespace nlwave {

CommutationIndex index_sets() {
  CommutationIndex ix;
  for (int k = 0; k <= 5; ++k)
    for (int j = 0; j + k <= 8; ++j) ix.A.emplace_back(k, j);
  for (int k = 0; k <= 5; ++k)
    for (int j = 0; ix.in_A(k, j + 2); ++j) ix.B.emplace_back(k, j);
  return ix;
}

bool verify_index_set_properties(const CommutationIndex& ix) {
  // Splitting properties over every decomposition of every member of A.
  for (int k1 = 0; k1 <= 8; ++k1)
    for (int j1 = 0; j1 <= 8; ++j1)
      for (int k2 = 0; k2 + k1 <= 8; ++k2)
        for (int j2 = 0; j2 + j1 <= 8; ++j2) {
          if (!ix.in_A(k1 + k2, j1 + j2)) continue;
          const bool p1 =
              ix.in_A(k1 + 2, j1 + 1) || ix.in_A(k2 + 2, j2 + 1);
          const bool p2 = ix.in_B(k1, j1) || ix.in_B(k2, j2);
          if (!p1 || !p2) return false;
        }
  // Downward closure.
  for (auto [k, j] : ix.A)
    for (int kp = 0; kp <= k; ++kp)
      for (int jp = 0; jp <= j; ++jp)
        if (!ix.in_A(kp, jp)) return false;
  for (auto [k, j] : ix.B)
    for (int kp = 0; kp <= k; ++kp)
      for (int jp = 0; jp <= j; ++jp)
        if (!ix.in_B(kp, jp)) return false;
  return true;
}

}  // namespace nlwave
