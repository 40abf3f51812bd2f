#include "smog/model.hpp"

#include <cmath>

#include "smog/linalg.hpp"
#include "smog/rng.hpp"

namespace smog {

MixtureModel make_mixture_model(Matrix means, Vector weights,
                                Vector variances) {
  MixtureModel m;
  m.d = means.rows();
  m.k = means.cols();
  if (m.d < 1 || m.k < 1)
    throw ParameterError("model: d and k must be at least 1");
  if (weights.size() != m.k)
    throw ParameterError("model: weights length must equal k");
  if (variances.size() != m.k)
    throw ParameterError("model: variances length must equal k");
  if ((variances.array() < 0.0).any())
    throw ParameterError("model: variances must be non-negative");
  if ((weights.array() < 0.0).any())
    throw ParameterError("model: weights must be non-negative");
  double total = weights.sum();
  if (!(total > 0.0)) throw ParameterError("model: weights must sum to > 0");
  m.weights = weights / total;
  m.means = std::move(means);
  m.variances = std::move(variances);
  return m;
}

MixtureModel make_mixture_model(Matrix means, Vector weights, double sigma2) {
  Vector variances = Vector::Constant(means.cols(), sigma2);
  return make_mixture_model(std::move(means), std::move(weights),
                            std::move(variances));
}

ModelDiagnostics validate_model(const MixtureModel& m) {
  if (m.means.rows() != m.d || m.means.cols() != m.k ||
      m.weights.size() != m.k || m.variances.size() != m.k)
    throw ParameterError("validate_model: inconsistent dimensions");
  if (std::abs(m.weights.sum() - 1.0) > 1e-9)
    throw ParameterError("validate_model: weights do not sum to 1");

  ModelDiagnostics diag;
  diag.w_min = m.weights.minCoeff();
  Matrix m2 = m.means * m.weights.asDiagonal() * m.means.transpose();
  SymEigResult eig = sym_eig(m2);  // PSD: eigenvalues = singular values
  double sigma1 = eig.eigenvalues[0];
  diag.sigma_k_M2 = m.k <= m.d ? eig.eigenvalues[m.k - 1] : 0.0;
  diag.rank_ok = diag.sigma_k_M2 > 1e-10 * sigma1 && diag.w_min > 0.0;
  return diag;
}

SampleSet sample(const MixtureModel& m, Index n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("sample: n must be at least 1");
  Vector cumulative(m.k);
  double acc = 0.0;
  for (Index i = 0; i < m.k; ++i) {
    acc += m.weights[i];
    cumulative[i] = acc;
  }
  cumulative[m.k - 1] = 1.0;

  rng::Engine eng = rng::engine(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SampleSet out;
  out.data.resize(n, m.d);
  for (Index j = 0; j < n; ++j) {
    double u = uniform(eng);
    Index h = 0;
    while (h < m.k - 1 && u >= cumulative[h]) ++h;
    double sigma = std::sqrt(m.variances[h]);
    for (Index a = 0; a < m.d; ++a)
      out.data(j, a) = m.means(a, h) + sigma * normal(eng);
  }
  return out;
}

Matrix PopulationMoments::m3_slice(const Vector& eta) const {
  if (eta.size() != means.rows())
    throw ParameterError("m3_slice: eta dimension mismatch");
  const Index d = means.rows();
  Matrix out = Matrix::Zero(d, d);
  for (Index i = 0; i < means.cols(); ++i) {
    double proj = eta.dot(means.col(i));
    out.noalias() +=
        weights[i] * proj * means.col(i) * means.col(i).transpose();
  }
  return out;
}

Tensor3 PopulationMoments::m3_contracted(const Matrix& r) const {
  if (r.rows() != means.rows())
    throw ParameterError("m3_contracted: R row dimension mismatch");
  Tensor3 t(r.cols());
  for (Index i = 0; i < means.cols(); ++i)
    t.add_outer3(r.transpose() * means.col(i), weights[i]);
  return t;
}

Tensor3 PopulationMoments::raw_third_contracted(const Matrix& r) const {
  Tensor3 t = m3_contracted(r);
  const Index p = r.cols();
  Vector m1r = r.transpose() * m1;
  Matrix gram = r.transpose() * r;
  gram = 0.5 * (gram + gram.transpose());
  // Canonical-order evaluation keeps the exact symmetry of t.
  for (Index a = 0; a < p; ++a)
    for (Index b = a; b < p; ++b)
      for (Index c = b; c < p; ++c) {
        double v = t(a, b, c) + m1r[a] * gram(b, c) + m1r[b] * gram(a, c) +
                   m1r[c] * gram(a, b);
        t.set_symmetric(a, b, c, v);
      }
  return t;
}

Matrix PopulationMoments::raw_second() const {
  return m2 + sigma_bar2 * Matrix::Identity(m2.rows(), m2.cols());
}

PopulationMoments population_moments(const MixtureModel& m) {
  validate_model(m);
  PopulationMoments pm;
  pm.weights = m.weights;
  pm.means = m.means;
  pm.variances = m.variances;
  pm.mean = m.means * m.weights;
  pm.sigma_bar2 = m.weights.dot(m.variances);
  pm.m1 = m.means * (m.weights.array() * m.variances.array()).matrix();
  pm.m2 = m.means * m.weights.asDiagonal() * m.means.transpose();
  return pm;
}

}  // namespace smog
