#include "smog/moments.hpp"

#include <array>
#include <cmath>

#include "smog/linalg.hpp"

namespace smog {

namespace {

inline Index tri_index(Index a, Index b) {
  // a >= b; packed upper triangle by row of the lower index
  return a * (a + 1) / 2 + b;
}

}  // namespace

MomentAccumulator::MomentAccumulator(Index d)
    : d_(d), mean_(d), raw2_(d * (d + 1) / 2) {
  if (d < 1) throw ParameterError("MomentAccumulator: d must be at least 1");
}

void MomentAccumulator::add_rows(const Eigen::Ref<const Matrix>& chunk) {
  if (chunk.cols() != d_)
    throw ParameterError("MomentAccumulator: chunk dimension mismatch");
  std::vector<double> x(static_cast<std::size_t>(d_));
  for (Index j = 0; j < chunk.rows(); ++j) {
    for (Index a = 0; a < d_; ++a) x[a] = chunk(j, a);
    for (Index a = 0; a < d_; ++a) {
      mean_[a].add(x[a]);
      KahanScalar* row = raw2_.data() + tri_index(a, 0);
      for (Index b = 0; b <= a; ++b) row[b].add(x[a] * x[b]);
    }
  }
  n_ += chunk.rows();
}

MomentSummary MomentAccumulator::finalize(Index k) const {
  if (n_ < 2) throw ParameterError("summarize: need at least 2 samples");
  if (k < 1 || k > d_) throw ParameterError("summarize: need 1 <= k <= d");
  MomentSummary s;
  s.n = n_;
  s.mu_hat.resize(d_);
  for (Index a = 0; a < d_; ++a) s.mu_hat[a] = mean_[a].sum / double(n_);
  s.raw2.resize(d_, d_);
  for (Index a = 0; a < d_; ++a)
    for (Index b = 0; b <= a; ++b) {
      double v = raw2_[tri_index(a, b)].sum / double(n_);
      s.raw2(a, b) = v;
      s.raw2(b, a) = v;
    }
  Matrix cov = s.raw2 - s.mu_hat * s.mu_hat.transpose();
  SymEigResult eig = sym_eig(cov);
  s.sigma2_hat = eig.eigenvalues[k - 1];
  return s;
}

MomentSummary summarize(const Eigen::Ref<const Matrix>& data, Index k) {
  MomentAccumulator acc(data.cols());
  acc.add_rows(data);
  return acc.finalize(k);
}

Vector noise_eigvec(const MomentSummary& summary) {
  Matrix cov = summary.raw2 - summary.mu_hat * summary.mu_hat.transpose();
  SymEigResult eig = sym_eig(cov);
  return eig.eigenvectors.col(eig.eigenvectors.cols() - 1);
}

Vector estimate_M1(const Eigen::Ref<const Matrix>& data, const Vector& v,
                   const Vector& mu_hat) {
  const Index d = data.cols();
  if (v.size() != d || mu_hat.size() != d)
    throw ParameterError("estimate_M1: dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10)
    throw ParameterError("estimate_M1: v must be a unit vector");
  std::vector<KahanScalar> acc(static_cast<std::size_t>(d));
  const double vmu = v.dot(mu_hat);
  for (Index j = 0; j < data.rows(); ++j) {
    double t = -vmu;
    for (Index a = 0; a < d; ++a) t += v[a] * data(j, a);
    double t2 = t * t;
    for (Index a = 0; a < d; ++a) acc[a].add(data(j, a) * t2);
  }
  Vector out(d);
  for (Index a = 0; a < d; ++a) out[a] = acc[a].sum / double(data.rows());
  return out;
}

Matrix m3_eta_slice(const Eigen::Ref<const Matrix>& data, const Vector& eta,
                    const Vector& m1) {
  const Index d = data.cols();
  if (eta.size() != d || m1.size() != d)
    throw ParameterError("m3_eta_slice: dimension mismatch");
  std::vector<KahanScalar> acc(static_cast<std::size_t>(d * (d + 1) / 2));
  std::vector<double> x(static_cast<std::size_t>(d));
  for (Index j = 0; j < data.rows(); ++j) {
    double s = 0.0;
    for (Index a = 0; a < d; ++a) {
      x[a] = data(j, a);
      s += eta[a] * x[a];
    }
    for (Index a = 0; a < d; ++a) {
      KahanScalar* row = acc.data() + tri_index(a, 0);
      double sa = s * x[a];
      for (Index b = 0; b <= a; ++b) row[b].add(sa * x[b]);
    }
  }
  Matrix out(d, d);
  const double inv_n = 1.0 / double(data.rows());
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b <= a; ++b) {
      double v = acc[tri_index(a, b)].sum * inv_n;
      out(a, b) = v;
      out(b, a) = v;
    }
  out.noalias() -= m1 * eta.transpose();
  out.noalias() -= eta * m1.transpose();
  out.diagonal().array() -= m1.dot(eta);
  return 0.5 * (out + out.transpose());
}

RawWhitenedThird raw_whitened_third(const Eigen::Ref<const Matrix>& data,
                                    const Matrix& w) {
  const Index d = data.cols();
  const Index k = w.cols();
  if (w.rows() != d)
    throw ParameterError("raw_whitened_third: W row dimension mismatch");
  if (data.rows() < 1)
    throw ParameterError("raw_whitened_third: empty sample");

  // Accumulate only the k(k+1)(k+2)/6 unique entries i <= j <= l.
  std::vector<std::array<Index, 3>> idx;
  for (Index i = 0; i < k; ++i)
    for (Index j = i; j < k; ++j)
      for (Index l = j; l < k; ++l) idx.push_back({i, j, l});
  std::vector<KahanScalar> acc(idx.size());
  std::vector<KahanScalar> mean_acc(static_cast<std::size_t>(k));

  std::vector<double> y(static_cast<std::size_t>(k));
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index i = 0; i < k; ++i) {
      double s = 0.0;
      for (Index a = 0; a < d; ++a) s += w(a, i) * data(r, a);
      y[i] = s;
      mean_acc[i].add(s);
    }
    for (std::size_t t = 0; t < idx.size(); ++t)
      acc[t].add(y[idx[t][0]] * y[idx[t][1]] * y[idx[t][2]]);
  }

  const double inv_n = 1.0 / double(data.rows());
  RawWhitenedThird out;
  out.tensor = Tensor3(k);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    double v = acc[t].sum * inv_n;
    Index i = idx[t][0], j = idx[t][1], l = idx[t][2];
    out.tensor(i, j, l) = v;
    out.tensor(i, l, j) = v;
    out.tensor(j, i, l) = v;
    out.tensor(j, l, i) = v;
    out.tensor(l, i, j) = v;
    out.tensor(l, j, i) = v;
  }
  out.mean.resize(k);
  for (Index i = 0; i < k; ++i) out.mean[i] = mean_acc[i].sum * inv_n;
  return out;
}

Tensor3 assemble_whitened_tensor(Tensor3 raw, const Vector& m,
                                 const Matrix& gram, double sigma2) {
  const Index k = raw.dim();
  if (m.size() != k || gram.rows() != k || gram.cols() != k)
    throw ParameterError("assemble_whitened_tensor: dimension mismatch");
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b)
      for (Index c = 0; c < k; ++c)
        raw(a, b, c) -= sigma2 * (m[a] * gram(b, c) + m[b] * gram(a, c) +
                                  m[c] * gram(a, b));
  raw.symmetrize();
  return raw;
}

WhitenedTensor whitened_third_moment(const Eigen::Ref<const Matrix>& data2,
                                     const Matrix& w, double sigma2_hat) {
  RawWhitenedThird raw = raw_whitened_third(data2, w);
  Matrix gram = w.transpose() * w;
  return assemble_whitened_tensor(std::move(raw.tensor), raw.mean, gram,
                                  sigma2_hat);
}

}  // namespace smog
