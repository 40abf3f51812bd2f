#pragma once

#include <cstdint>

#include "smog/common.hpp"

namespace smog {

/// f(eta) = (m4(eta) - 3 m2(eta)^2) / 12 with m_p(eta) = mean (eta'x)^p.
/// Vanishes identically on Gaussian data; used by the finite-difference
/// validation of the Hessian below.
double empirical_f(const Eigen::Ref<const Matrix>& data, const Vector& eta);

struct CumulantHessian {
  Vector eta;
  Matrix h;  // symmetric k x k
};

/// Closed-form Hessian of f at eta (see docs/cumulant_hessian.md):
///   H = E[(eta'x)^2 x x'] - 2 E[(eta'x) x] E[(eta'x) x]' - m2(eta) E[x x'],
/// evaluated with empirical expectations.
CumulantHessian cumulant_hessian(const Eigen::Ref<const Matrix>& data,
                                 const Vector& eta);

/// Population Hessian for x = A h with independent unit-variance sources of
/// excess kurtosis kappa_i: sum_i kappa_i (eta'a_i)^2 a_i a_i'.
Matrix cumulant_hessian_exact(const Matrix& mixing, const Vector& kurtosis,
                              const Vector& eta);

struct IcaEstimate {
  Matrix columns;      // k x k, unit columns, estimated mixing directions
  Vector eigenvalues;  // ratio diagnostics (phi'a_i)^2 / (psi'a_i)^2
  int attempts = 0;    // phi/psi draws consumed
};

/// Spectral estimator: eigendecompose H(phi) H(psi)^{-1} for random unit
/// phi, psi. Columns are recovered up to sign, scale, and permutation;
/// each is normalized to unit length with the first significant entry made
/// positive. Re-draws directions up to 16 times on singular H(psi), complex
/// or nearly-repeated eigenvalues; persistent failure raises
/// KurtosisDegeneracyError (all excess kurtoses indistinguishable from 0).
IcaEstimate ica_estimate(const Eigen::Ref<const Matrix>& data,
                         std::uint64_t seed);

/// Exact-moment variant driven by the population Hessian.
IcaEstimate ica_estimate_exact(const Matrix& mixing, const Vector& kurtosis,
                               std::uint64_t seed);

}  // namespace smog
