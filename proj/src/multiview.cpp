#include "smog/multiview.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include "smog/rng.hpp"

namespace smog {

double coherence(const Matrix& a) {
  const Index k = a.cols();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (!(sv[k - 1] > 1e-10 * sv[0]))
    throw ParameterError("coherence: matrix is numerically rank deficient");
  // Projector diagonal = squared row norms of an orthonormal range basis.
  return svd.matrixU().rowwise().squaredNorm().maxCoeff();
}

Matrix random_rotation(Index d, std::uint64_t seed) {
  if (d < 1) throw ParameterError("random_rotation: d must be at least 1");
  rng::Engine eng = rng::engine(seed);
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j) g.col(j) = rng::gaussian(eng, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  if (q.determinant() < 0.0) q.col(d - 1) = -q.col(d - 1);
  return q;
}

PartitionCheck partition_and_check(const Matrix& a, std::uint64_t seed) {
  const Index d = a.rows();
  const Index k = a.cols();
  if (d < 3) throw ParameterError("partition_and_check: need d >= 3");

  PartitionCheck out;
  rng::Engine eng = rng::engine(seed);
  std::uniform_int_distribution<int> pick(0, 2);
  for (Index i = 0; i < d; ++i)
    out.partition.groups[pick(eng)].push_back(i);

  double sigma1 = Eigen::JacobiSVD<Matrix>(a).singularValues()[0];
  out.all_full_rank = true;
  for (int t = 0; t < 3; ++t) {
    const std::vector<Index>& rows = out.partition.groups[t];
    double sigma_k = 0.0;
    if (Index(rows.size()) >= k) {
      Matrix sub(rows.size(), k);
      for (std::size_t r = 0; r < rows.size(); ++r) sub.row(r) = a.row(rows[r]);
      sigma_k = Eigen::JacobiSVD<Matrix>(sub).singularValues()[k - 1];
    }
    out.sigma_k_per_group[t] = sigma_k;
    if (!(sigma_k > 1e-10 * sigma1)) out.all_full_rank = false;
  }
  return out;
}

}  // namespace smog
