#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mallows/limits.hpp"
#include "mallows/stats.hpp"

namespace mallows {

/// Exact laws of the Mallows(q) permutation of size n by enumeration of S_n.
struct ExactLaws {
  int n = 0;
  double q = 0.0;
  double z_sum = 0.0;      // sum of q^Inv over S_n
  double z_product = 0.0;  // prod_k (1 + q + ... + q^(k-1))
  ReferenceLaw<std::vector<std::int64_t>> permutations;  // lexicographic order
  std::map<std::string, double> shapes;                  // shape_key -> probability
};

inline constexpr int kOracleMaxN = 7;

/// Throws std::invalid_argument for n outside [0, kOracleMaxN] or q < 0.
ExactLaws oracle_enumerate(int n, double q);

/// Expected radius-r ball census of the Mallows tree: the law of the ball
/// around a uniform vertex.
ReferenceLaw<BallSignature> exact_census_law(const ExactLaws& laws, int r);

}  // namespace mallows
