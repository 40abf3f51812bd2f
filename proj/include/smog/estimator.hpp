#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "smog/common.hpp"
#include "smog/model.hpp"
#include "smog/moments.hpp"
#include "smog/tensor.hpp"

namespace smog {

/// Separation level cleared by a random unit direction with probability at
/// least 1/2: 1 / (2 sqrt(w_max) sqrt(e k) C(k+1, 2)).
double gamma_threshold(Index k, double w_max);

/// Whitening operators built from second-moment statistics.
/// Invariants: W'M2W = I_k and W'B = I_k (within 1e-8) whenever the retained
/// eigenvalues are positive.
struct WhiteningState {
  Matrix u_hat;   // d x k, orthonormal columns (top-k eigenbasis of M2_hat)
  Matrix m2_hat;  // d x d, rank-k
  Matrix w_hat;   // d x k, whitener U (U'M2U)^{+1/2}
  Matrix b_hat;   // d x k, un-whitener U (U'M2U)^{1/2}
  double sigma_k_m2 = 0.0;  // k-th largest eigenvalue magnitude of M2_hat
};

/// M2_hat = rank-k approximation of raw2 - sigma2_hat I, then the whitening
/// pair (W, B). The square roots use eigenvalue magnitudes so that small
/// negative eigenvalues from sampling noise do not poison the factorization.
/// Throws DegeneracyError when fewer than k eigenvalues clear
/// 1e-10 * sigma_1.
WhiteningState build_whitening(const MomentSummary& summary, Index k);

/// One randomized eigendecomposition trial.
struct TrialResult {
  Vector theta;        // unit direction in R^k
  Vector eigenvalues;  // of T[theta], non-increasing
  Matrix eigenvectors;
  double min_gap = 0.0;  // min over pairwise |l_i - l_j| and |l_i|
};

struct TrialRun {
  std::vector<TrialResult> trials;
  int chosen = 0;  // largest min_gap, ties to the lowest index
};

/// Run t random contractions of T_hat; per-trial seeds derive from `seed`
/// so trials are reproducible and order-independent.
TrialRun run_trials(const Tensor3& t_hat, int t, std::uint64_t seed);

struct EstimateDiagnostics {
  double sigma_k_m2_hat = 0.0;
  double gamma = 0.0;  // reported from the recovered w_max, diagnostic only
  Index n_used = 0;
  std::vector<double> trial_gaps;
  int chosen_trial = -1;
  int eta_attempts = 0;
  std::vector<int> negative_variance_components;
};

struct EstimateReport {
  Matrix means_hat;     // d x k
  Vector weights_hat;   // k
  double sigma2_hat = 0.0;      // common-variance estimate
  Vector sigma2_per_component;  // filled by the distinct-variance path
  EstimateDiagnostics diag;
};

/// Parameter recovery from a retained trial:
/// mu_i = (lambda_i / theta'v_i) B v_i, weights = pinv(means) mu_hat.
/// Throws IllConditionedTrialError when |theta'v_i| < 1e-12.
EstimateReport recover_parameters(const WhiteningState& state,
                                  const TrialResult& trial,
                                  const Vector& mu_hat);

/// Full finite-sample pipeline for a common spherical covariance: split the
/// sample in half, estimate sigma2/M2/W/B on the first half and the whitened
/// third moment on the second, run ceil(log2(1/delta)) randomized trials,
/// keep the best-separated one, and recover parameters.
EstimateReport learn_gmm_common(const SampleSet& data, Index k, double delta,
                                std::uint64_t seed,
                                std::optional<int> trials_override = {});

/// The same steps driven by exact population moments; recovers the
/// parameters exactly (up to floating point) for any non-degenerate model.
EstimateReport learn_gmm_from_moments(const PopulationMoments& pm, Index k,
                                      double delta, std::uint64_t seed);

/// Inputs for the exact-moment spectral estimator; built either from
/// population moments (oracle) or from sample statistics (plug-in).
struct SphericalMoments {
  Index k = 0;
  Vector mean;
  Vector m1;
  Matrix m2;
  std::function<Matrix(const Vector&)> m3_slice;
};

SphericalMoments spherical_from_population(const PopulationMoments& pm);
SphericalMoments spherical_from_samples(std::shared_ptr<const Matrix> data,
                                        Index k);

/// Spectral estimator with per-component variances: eigendecompose
/// M2^{+1/2} M3(eta) M2^{+1/2} restricted to the rank-k subspace, recover
/// means from the eigenpairs, then weights and variances through pinv(A).
/// Throws EtaCollisionError on repeated or vanishing eigenvalues.
EstimateReport estimate_spherical_exact(const SphericalMoments& sm,
                                        const Vector& eta);
EstimateReport estimate_spherical_exact(const PopulationMoments& pm,
                                        const Vector& eta);

/// Draw eta uniformly at random, retrying on eta collisions up to 16 times.
EstimateReport estimate_spherical_auto(const SphericalMoments& sm,
                                       std::uint64_t seed);

enum class MatchMethod { kAuto, kExhaustive, kBottleneck };

struct MatchScore {
  std::vector<int> permutation;  // permutation[j] = estimate column matched
                                 // to truth column j
  Vector per_component_l2;
  double max_rel = 0.0;
};

/// Permutation-matched scoring: minimizes the largest column error
/// (exhaustively for k <= 8, bottleneck assignment otherwise). max_rel
/// normalizes each error by ||mu_i|| + sqrt(sigma_1[M2]).
MatchScore match_and_score(const Matrix& means_hat, const MixtureModel& truth,
                           MatchMethod method = MatchMethod::kAuto);

}  // namespace smog
