#include "smog/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace smog {

namespace {

void check_square_symmetric(const Matrix& m) {
  if (m.rows() != m.cols())
    throw ParameterError("sym_eig: matrix must be square");
  double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw ParameterError("sym_eig: matrix not symmetric (relative asymmetry " +
                         std::to_string(asym / scale) + ")");
}

void fix_signs(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index imax = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace

SymEigResult sym_eig(const Matrix& m) {
  check_square_symmetric(m);
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw ParameterError("sym_eig: eigensolver failed to converge");
  SymEigResult out;
  // Eigen returns ascending order; flip to non-increasing.
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  fix_signs(out.eigenvectors);
  return out;
}

Matrix rank_k_approx(const Matrix& m, Index k) {
  if (k < 1 || k > m.rows())
    throw ParameterError("rank_k_approx: k out of range [1, d]");
  SymEigResult eig = sym_eig(m);
  const Index d = m.rows();
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(eig.eigenvalues[a]) > std::abs(eig.eigenvalues[b]);
  });
  Matrix out = Matrix::Zero(d, d);
  for (Index t = 0; t < k; ++t) {
    Index i = order[t];
    out.noalias() += eig.eigenvalues[i] * eig.eigenvectors.col(i) *
                     eig.eigenvectors.col(i).transpose();
  }
  return out;
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw ParameterError("pseudo_inverse: rel_tol must lie in (0,1)");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  double cutoff = sv.size() > 0 ? rel_tol * sv[0] : 0.0;
  Vector inv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) inv[i] = 1.0 / sv[i];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

Matrix sym_eigenvalue_map(const Matrix& m, double rel_tol, bool inverse) {
  SymEigResult eig = sym_eig(m);
  double scale = eig.eigenvalues.cwiseAbs().maxCoeff();
  double cutoff = rel_tol * scale;
  Vector mapped = Vector::Zero(eig.eigenvalues.size());
  for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
    double a = std::abs(eig.eigenvalues[i]);
    if (a > cutoff) mapped[i] = inverse ? 1.0 / std::sqrt(a) : std::sqrt(a);
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
}

}  // namespace

Matrix sym_sqrt_magnitude(const Matrix& m, double rel_tol) {
  return sym_eigenvalue_map(m, rel_tol, false);
}

Matrix sym_inv_sqrt_magnitude(const Matrix& m, double rel_tol) {
  return sym_eigenvalue_map(m, rel_tol, true);
}

}  // namespace smog
