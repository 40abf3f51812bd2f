#pragma once

#include <cstdint>
#include <vector>

#include "smog/common.hpp"

namespace smog {

/// Outcome of a Monte Carlo tail-bound verification.
struct TailCheckResult {
  long trials = 0;
  long violations = 0;
  double bound_delta = 0.0;
  double violation_rate = 0.0;
  double threshold = 0.0;
  bool vacuous_threshold = false;  // threshold == 0, bound carries no content
};

/// Chi-square sum bound: simulates sum of m squared standard normals and
/// counts exceedances of m + 2 sqrt(m ln(1/delta)) + 2 ln(1/delta).
TailCheckResult mc_tail_chi2(int m, double delta, long trials,
                             std::uint64_t seed);

/// Cube sum bound: simulates |sum of m cubed standard normals| against
/// sqrt(27 e^3 m ceil(ln(1/delta))^3).
TailCheckResult mc_tail_cubes(int m, double delta, long trials,
                              std::uint64_t seed);

/// Anticoncentration of a random unit direction theta: counts trials where
/// min_q |theta'Xq| <= min_q ||Xq|| * delta / (sqrt(e p) |Q|).
TailCheckResult mc_anticoncentration(const Matrix& x,
                                     const std::vector<Vector>& q,
                                     double delta, long trials,
                                     std::uint64_t seed);

}  // namespace smog
