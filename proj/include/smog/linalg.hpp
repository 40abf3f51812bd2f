#pragma once

#include "smog/common.hpp"

namespace smog {

/// Eigendecomposition of a symmetric matrix. Eigenvalues sorted
/// non-increasing; column i of `eigenvectors` pairs with `eigenvalues[i]`.
/// Columns are orthonormal and sign-fixed so the largest-magnitude entry of
/// each eigenvector is positive.
struct SymEigResult {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Symmetric eigendecomposition. The input must be square and symmetric
/// within 1e-8 relative asymmetry; it is symmetrized before factoring so the
/// reconstruction V diag(lambda) V^T matches the symmetrized input to
/// 1e-10 * ||input||_2.
SymEigResult sym_eig(const Matrix& m);

/// Best rank-k approximation in spectral norm of a symmetric matrix:
/// keeps the k eigenvalues of largest magnitude. 1 <= k <= rows required.
Matrix rank_k_approx(const Matrix& m, Index k);

/// Moore-Penrose pseudoinverse. Singular values below rel_tol * sigma_1 are
/// treated as zero; rel_tol must lie in (0,1).
Matrix pseudo_inverse(const Matrix& m, double rel_tol = 1e-10);

/// For symmetric M with eigendecomposition U diag(lambda) U^T, returns
/// U diag(sqrt(|lambda|)) U^T, zeroing eigenvalues below rel_tol * max|lambda|.
/// Magnitude form tolerates small negative eigenvalues from sampling noise.
Matrix sym_sqrt_magnitude(const Matrix& m, double rel_tol = 1e-10);

/// As above with diag(1/sqrt(|lambda|)) on the retained eigenvalues: the
/// pseudo inverse square root.
Matrix sym_inv_sqrt_magnitude(const Matrix& m, double rel_tol = 1e-10);

}  // namespace smog
