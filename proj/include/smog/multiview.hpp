#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "smog/common.hpp"

namespace smog {

/// Largest diagonal entry of the orthogonal projector onto range(A);
/// lies in [k/d, 1] for a rank-k matrix. Throws ParameterError when A is
/// numerically rank deficient (sigma_k <= 1e-10 sigma_1).
double coherence(const Matrix& a);

/// Haar-distributed rotation (det +1): QR of a Gaussian matrix with the
/// R-diagonal sign fix, then a last-column flip when the determinant is -1.
Matrix random_rotation(Index d, std::uint64_t seed);

/// Disjoint cover of [d] by three groups.
struct Partition3 {
  std::array<std::vector<Index>, 3> groups;
};

struct PartitionCheck {
  Partition3 partition;
  std::array<double, 3> sigma_k_per_group{};  // k-th largest singular value
                                              // of each row submatrix
  bool all_full_rank = false;
};

/// Assign each coordinate uniformly to one of three groups and report the
/// k-th singular value of every row submatrix. Empty or short groups are
/// reported with sigma_k = 0, not raised as errors. Requires d >= 3.
PartitionCheck partition_and_check(const Matrix& a, std::uint64_t seed);

}  // namespace smog
