#pragma once

#include <cstdint>

#include "smog/common.hpp"
#include "smog/tensor.hpp"

namespace smog {

/// Spherical Gaussian mixture: component i has mean `means.col(i)`,
/// covariance `variances[i] * I`, and selection probability `weights[i]`.
struct MixtureModel {
  Index d = 0;
  Index k = 0;
  Vector weights;    // length k, sums to 1
  Matrix means;      // d x k
  Vector variances;  // length k, entries >= 0
};

/// Build a model, normalizing weights to sum exactly to 1.
/// Throws ParameterError on inconsistent dimensions, non-positive weight
/// sums, or negative variances.
MixtureModel make_mixture_model(Matrix means, Vector weights,
                                Vector variances);

/// Common-variance convenience constructor.
MixtureModel make_mixture_model(Matrix means, Vector weights, double sigma2);

struct ModelDiagnostics {
  bool rank_ok = false;  // k-th singular value of M2 clears 1e-10 * sigma_1
                         // and every weight is strictly positive
  double sigma_k_M2 = 0.0;
  double w_min = 0.0;
};

/// Non-degeneracy diagnostics: checks that the weighted mean outer-product
/// matrix A diag(w) A^T has numerical rank k and that all weights are
/// strictly positive. Throws ParameterError on malformed dimensions.
ModelDiagnostics validate_model(const MixtureModel& m);

/// n observations, one per row, with the half-split used by the
/// finite-sample estimator.
struct SampleSet {
  Matrix data;  // n x d

  Index n() const { return data.rows(); }
  Index d() const { return data.cols(); }
  Eigen::Ref<const Matrix> first_half() const {
    return data.topRows(data.rows() / 2);
  }
  Eigen::Ref<const Matrix> second_half() const {
    return data.bottomRows(data.rows() - data.rows() / 2);
  }
};

/// Draw n i.i.d. observations: pick component h with probability w_h, then
/// x = mu_h + sigma_h * z with z standard normal. Deterministic given seed;
/// a standard normal vector is consumed per draw even when sigma_h = 0 so
/// streams stay aligned across variance choices.
SampleSet sample(const MixtureModel& m, Index n, std::uint64_t seed);

/// Exact moments of the observable x. The third moment is exposed only
/// through contractions; no d x d x d tensor is ever formed.
struct PopulationMoments {
  Vector mean;        // E[x] = A w
  Vector m1;          // sum_i w_i sigma_i^2 mu_i
  Matrix m2;          // sum_i w_i mu_i mu_i^T
  double sigma_bar2;  // sum_i w_i sigma_i^2

  Vector weights;  // copies of the generating parameters, used by the
  Matrix means;    // contraction functionals below
  Vector variances;

  /// E[x (x) x (x) x] - I, M1 correction, contracted against eta in the third
  /// index: sum_i w_i (eta' mu_i) mu_i mu_i^T.
  Matrix m3_slice(const Vector& eta) const;

  /// M3[R,R,R] = sum_i w_i (R' mu_i)^(x)3 for R in R^{d x r}.
  Tensor3 m3_contracted(const Matrix& r) const;

  /// Raw third moment E[x (x) x (x) x][R,R,R], i.e. m3_contracted plus the
  /// symmetrized (R'M1) (x) (R'R) correction terms.
  Tensor3 raw_third_contracted(const Matrix& r) const;

  /// Raw second moment E[x x^T] = M2 + sigma_bar2 * I.
  Matrix raw_second() const;
};

PopulationMoments population_moments(const MixtureModel& m);

}  // namespace smog
