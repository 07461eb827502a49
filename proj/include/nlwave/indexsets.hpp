#ifndef NLWAVE_INDEXSETS_HPP
#define NLWAVE_INDEXSETS_HPP

#include <utility>
#include <vector>

namespace nlwave {

// Admissible commutation orders (k angular, j time):
//   A = {(k,j) : k + j <= 8, k <= 5},  B = {(k,j) : (k, j+2) in A}.
struct CommutationIndex {
  std::vector<std::pair<int, int>> A;
  std::vector<std::pair<int, int>> B;

  bool in_A(int k, int j) const { return k >= 0 && j >= 0 && k + j <= 8 && k <= 5; }
  bool in_B(int k, int j) const { return in_A(k, j + 2); }
};

CommutationIndex index_sets();

// Exhaustive verification of the splitting properties:
//  (1) for every split (k1+k2, j1+j2) in A, some i has (k_i+2, j_i+1) in A;
//  (2) for every such split, some i has (k_i, j_i) in B;
//  (3) A and B are downward closed.
bool verify_index_set_properties(const CommutationIndex& ix);

}  // namespace nlwave

#endif
