#pragma once

#include <vector>

#include "smog/common.hpp"
#include "smog/tensor.hpp"

namespace smog {

/// First- and second-order sample statistics. raw2 uses the biased 1/n
/// normalization to match the population plug-in convention.
struct MomentSummary {
  Vector mu_hat;     // sample mean
  Matrix raw2;       // (1/n) sum x x^T
  double sigma2_hat; // k-th largest eigenvalue of raw2 - mu mu^T
  Index n = 0;
};

/// Kahan-compensated scalar sum; keeps chunked and single-pass accumulation
/// in agreement at the 1e-12 level for n ~ 1e6.
struct KahanScalar {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

/// Streaming accumulator for mu_hat and raw2 over row chunks.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(Index d);
  void add_rows(const Eigen::Ref<const Matrix>& chunk);
  /// Finalize into a summary; sigma2_hat is the k-th largest eigenvalue of
  /// the empirical covariance. Requires n >= 2 and d >= k.
  MomentSummary finalize(Index k) const;
  Index count() const { return n_; }

 private:
  Index d_;
  Index n_ = 0;
  std::vector<KahanScalar> mean_;  // d entries
  std::vector<KahanScalar> raw2_;  // upper triangle, d(d+1)/2 entries
};

/// Single-pass summary of a data matrix (rows = observations).
MomentSummary summarize(const Eigen::Ref<const Matrix>& data, Index k);

/// Unit eigenvector of the empirical covariance for its smallest eigenvalue.
Vector noise_eigvec(const MomentSummary& summary);

/// (1/n) sum_j x_j (v'(x_j - mu_hat))^2 for a unit direction v.
Vector estimate_M1(const Eigen::Ref<const Matrix>& data, const Vector& v,
                   const Vector& mu_hat);

/// Third-moment slice against eta with the noise-correction terms folded in:
/// (1/n) sum_j (eta'x_j) x_j x_j' - M1 eta' - eta M1' - (M1'eta) I.
Matrix m3_eta_slice(const Eigen::Ref<const Matrix>& data, const Vector& eta,
                    const Vector& m1);

/// (1/n) sum_j (W'x_j)^(x)3, the raw whitened third moment, plus the whitened
/// mean of the same rows.
struct RawWhitenedThird {
  Tensor3 tensor;
  Vector mean;  // W' (sample mean)
};
RawWhitenedThird raw_whitened_third(const Eigen::Ref<const Matrix>& data,
                                    const Matrix& w);

/// Subtract the spherical-noise correction from a raw whitened third moment:
/// raw - sigma2 * sym3(m (x) G) with G = W'W, then symmetrize. The sum over
/// ambient coordinates collapses to the Gram matrix, so the correction costs
/// O(k^3) instead of O(d k^2) per term.
Tensor3 assemble_whitened_tensor(Tensor3 raw, const Vector& m,
                                 const Matrix& gram, double sigma2);

/// Whitened third-moment tensor of the estimator's second half-sample.
/// `data2` must be independent of the sample that produced w and sigma2_hat.
WhitenedTensor whitened_third_moment(const Eigen::Ref<const Matrix>& data2,
                                     const Matrix& w, double sigma2_hat);

}  // namespace smog
