#include "smog/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "smog/linalg.hpp"
#include "smog/rng.hpp"

namespace smog {

namespace {

double binomial(Index n, Index r) {
  double out = 1.0;
  for (Index i = 0; i < r; ++i) out = out * double(n - i) / double(i + 1);
  return out;
}

}  // namespace

double gamma_threshold(Index k, double w_max) {
  if (k < 1) throw ParameterError("gamma_threshold: k must be at least 1");
  if (!(w_max > 0.0 && w_max <= 1.0))
    throw ParameterError("gamma_threshold: w_max must lie in (0,1]");
  const double e = std::exp(1.0);
  return 1.0 /
         (2.0 * std::sqrt(w_max) * std::sqrt(e * double(k)) * binomial(k + 1, 2));
}

WhiteningState build_whitening(const MomentSummary& summary, Index k) {
  const Index d = summary.raw2.rows();
  if (k < 1 || k > d) throw ParameterError("build_whitening: need 1 <= k <= d");

  Matrix shifted =
      summary.raw2 - summary.sigma2_hat * Matrix::Identity(d, d);
  SymEigResult eig = sym_eig(shifted);

  // Rank-k truncation by eigenvalue magnitude.
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(eig.eigenvalues[a]) > std::abs(eig.eigenvalues[b]);
  });
  const double sigma1 = std::abs(eig.eigenvalues[order[0]]);
  const double sigma_k = std::abs(eig.eigenvalues[order[k - 1]]);
  if (!(sigma_k > 1e-10 * sigma1))
    throw DegeneracyError(
        "build_whitening: rank deficiency, sigma_k[M2_hat] = " +
            std::to_string(sigma_k),
        sigma_k);

  WhiteningState st;
  st.u_hat.resize(d, k);
  Vector lambda(k);
  for (Index t = 0; t < k; ++t) {
    st.u_hat.col(t) = eig.eigenvectors.col(order[t]);
    lambda[t] = eig.eigenvalues[order[t]];
  }
  st.m2_hat = st.u_hat * lambda.asDiagonal() * st.u_hat.transpose();
  // U'M2U is diagonal in this basis, so the square roots are entrywise.
  Vector sqrt_mag = lambda.cwiseAbs().cwiseSqrt();
  st.w_hat = st.u_hat * sqrt_mag.cwiseInverse().asDiagonal();
  st.b_hat = st.u_hat * sqrt_mag.asDiagonal();
  st.sigma_k_m2 = sigma_k;
  return st;
}

TrialRun run_trials(const Tensor3& t_hat, int t, std::uint64_t seed) {
  if (t < 1) throw ParameterError("run_trials: need at least one trial");
  const Index k = t_hat.dim();
  TrialRun run;
  run.trials.reserve(t);
  for (int i = 0; i < t; ++i) {
    rng::Engine eng = rng::engine(rng::derive(seed, "trial-theta", i));
    TrialResult trial;
    trial.theta = rng::unit_sphere(eng, k);
    SymEigResult eig = sym_eig(t_hat.contract(trial.theta));
    trial.eigenvalues = eig.eigenvalues;
    trial.eigenvectors = eig.eigenvectors;
    double gap = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < k; ++a) {
      gap = std::min(gap, std::abs(trial.eigenvalues[a]));
      for (Index b = a + 1; b < k; ++b)
        gap = std::min(gap,
                       std::abs(trial.eigenvalues[a] - trial.eigenvalues[b]));
    }
    trial.min_gap = gap;
    run.trials.push_back(std::move(trial));
  }
  run.chosen = 0;
  for (int i = 1; i < t; ++i)
    if (run.trials[i].min_gap > run.trials[run.chosen].min_gap) run.chosen = i;
  return run;
}

EstimateReport recover_parameters(const WhiteningState& state,
                                  const TrialResult& trial,
                                  const Vector& mu_hat) {
  const Index k = trial.eigenvalues.size();
  const Index d = state.b_hat.rows();
  EstimateReport rep;
  rep.means_hat.resize(d, k);
  for (Index i = 0; i < k; ++i) {
    double denom = trial.theta.dot(trial.eigenvectors.col(i));
    if (std::abs(denom) < 1e-12)
      throw IllConditionedTrialError(
          "recover_parameters: theta nearly orthogonal to eigenvector " +
          std::to_string(i));
    rep.means_hat.col(i) =
        (trial.eigenvalues[i] / denom) * (state.b_hat * trial.eigenvectors.col(i));
  }
  rep.weights_hat = pseudo_inverse(rep.means_hat) * mu_hat;
  rep.diag.sigma_k_m2_hat = state.sigma_k_m2;
  double w_max = rep.weights_hat.maxCoeff();
  // Clamp into (0,1]; the recovered weights can stray outside under noise
  // and gamma is a diagnostic, not a correctness gate.
  rep.diag.gamma = gamma_threshold(k, std::clamp(w_max, 1e-12, 1.0));
  return rep;
}

namespace {

int trials_for_delta(double delta, std::optional<int> override) {
  if (override) {
    if (*override < 1)
      throw ParameterError("trials override must be at least 1");
    return *override;
  }
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("delta must lie in (0,1)");
  return std::max(1, int(std::ceil(std::log2(1.0 / delta))));
}

EstimateReport finish_from_tensor(const WhiteningState& state,
                                  const Tensor3& t_hat, const Vector& mu_hat,
                                  double sigma2_hat, int trials,
                                  std::uint64_t seed) {
  TrialRun run = run_trials(t_hat, trials, seed);
  EstimateReport rep =
      recover_parameters(state, run.trials[run.chosen], mu_hat);
  rep.sigma2_hat = sigma2_hat;
  rep.diag.chosen_trial = run.chosen;
  rep.diag.trial_gaps.reserve(run.trials.size());
  for (const TrialResult& t : run.trials)
    rep.diag.trial_gaps.push_back(t.min_gap);
  return rep;
}

}  // namespace

EstimateReport learn_gmm_common(const SampleSet& data, Index k, double delta,
                                std::uint64_t seed,
                                std::optional<int> trials_override) {
  const Index n = data.n();
  const Index d = data.d();
  if (d < k) throw ParameterError("learn_gmm_common: need d >= k");
  if (n < 2 * k) throw ParameterError("learn_gmm_common: need n >= 2k");
  int trials = trials_for_delta(delta, trials_override);

  MomentSummary summary = summarize(data.first_half(), k);
  WhiteningState state = build_whitening(summary, k);
  WhitenedTensor t_hat = whitened_third_moment(data.second_half(),
                                               state.w_hat, summary.sigma2_hat);
  EstimateReport rep =
      finish_from_tensor(state, t_hat, summary.mu_hat, summary.sigma2_hat,
                         trials, rng::derive(seed, "learn-gmm"));
  rep.diag.n_used = n;
  return rep;
}

EstimateReport learn_gmm_from_moments(const PopulationMoments& pm, Index k,
                                      double delta, std::uint64_t seed) {
  int trials = trials_for_delta(delta, std::nullopt);
  MomentSummary summary;
  summary.mu_hat = pm.mean;
  summary.raw2 = pm.raw_second();
  summary.sigma2_hat = pm.sigma_bar2;
  summary.n = 0;
  WhiteningState state = build_whitening(summary, k);
  // Exact whitened third moment; equals the two-half construction when all
  // component variances coincide.
  Tensor3 t_exact = pm.m3_contracted(state.w_hat);
  return finish_from_tensor(state, t_exact, pm.mean, pm.sigma_bar2, trials,
                            rng::derive(seed, "learn-gmm-exact"));
}

SphericalMoments spherical_from_population(const PopulationMoments& pm) {
  SphericalMoments sm;
  sm.k = pm.weights.size();
  sm.mean = pm.mean;
  sm.m1 = pm.m1;
  sm.m2 = pm.m2;
  PopulationMoments copy = pm;
  sm.m3_slice = [copy](const Vector& eta) { return copy.m3_slice(eta); };
  return sm;
}

SphericalMoments spherical_from_samples(std::shared_ptr<const Matrix> data,
                                        Index k) {
  if (!data) throw ParameterError("spherical_from_samples: null data");
  MomentSummary summary = summarize(*data, k);
  Vector v = noise_eigvec(summary);
  Vector m1 = estimate_M1(*data, v, summary.mu_hat);

  SphericalMoments sm;
  sm.k = k;
  sm.mean = summary.mu_hat;
  sm.m1 = m1;
  sm.m2 = summary.raw2 -
          summary.sigma2_hat * Matrix::Identity(data->cols(), data->cols());
  sm.m3_slice = [data, m1](const Vector& eta) {
    return m3_eta_slice(*data, eta, m1);
  };
  return sm;
}

EstimateReport estimate_spherical_exact(const SphericalMoments& sm,
                                        const Vector& eta) {
  const Index d = sm.m2.rows();
  const Index k = sm.k;
  if (k < 1 || k > d)
    throw ParameterError("estimate_spherical_exact: need 1 <= k <= d");
  if (eta.size() != d)
    throw ParameterError("estimate_spherical_exact: eta dimension mismatch");

  SymEigResult eig = sym_eig(sm.m2);
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(eig.eigenvalues[a]) > std::abs(eig.eigenvalues[b]);
  });
  const double sigma1 = std::abs(eig.eigenvalues[order[0]]);
  const double sigma_k = std::abs(eig.eigenvalues[order[k - 1]]);
  if (!(sigma_k > 1e-10 * sigma1))
    throw DegeneracyError(
        "estimate_spherical_exact: rank deficiency, sigma_k[M2] = " +
            std::to_string(sigma_k),
        sigma_k);

  Matrix u(d, k);
  Vector lambda(k);
  for (Index t = 0; t < k; ++t) {
    u.col(t) = eig.eigenvectors.col(order[t]);
    lambda[t] = eig.eigenvalues[order[t]];
  }
  Vector sqrt_mag = lambda.cwiseAbs().cwiseSqrt();

  // M_GMM projected to the rank-k subspace, in the eigenbasis of M2.
  Matrix slice = sm.m3_slice(eta);
  Matrix core = sqrt_mag.cwiseInverse().asDiagonal() *
                (u.transpose() * slice * u) *
                sqrt_mag.cwiseInverse().asDiagonal();
  SymEigResult ce = sym_eig(core);

  double scale = ce.eigenvalues.cwiseAbs().maxCoeff();
  if (!(scale > 0.0))
    throw EtaCollisionError("estimate_spherical_exact: all eigenvalues zero");
  for (Index i = 0; i < k; ++i) {
    if (std::abs(ce.eigenvalues[i]) <= 1e-8 * scale)
      throw EtaCollisionError(
          "estimate_spherical_exact: zero eigenvalue (eta orthogonal to a "
          "component mean)");
    for (Index j = i + 1; j < k; ++j)
      if (std::abs(ce.eigenvalues[i] - ce.eigenvalues[j]) <= 1e-8 * scale)
        throw EtaCollisionError(
            "estimate_spherical_exact: repeated eigenvalues, re-draw eta");
  }

  EstimateReport rep;
  rep.means_hat.resize(d, k);
  for (Index i = 0; i < k; ++i) {
    Vector m2half_v = u * (sqrt_mag.asDiagonal() * ce.eigenvectors.col(i));
    double denom = eta.dot(m2half_v);
    if (std::abs(denom) < 1e-14 * std::max(1.0, m2half_v.norm()))
      throw EtaCollisionError(
          "estimate_spherical_exact: eta orthogonal to M2^{1/2} v");
    rep.means_hat.col(i) = (ce.eigenvalues[i] / denom) * m2half_v;
  }
  Matrix a_pinv = pseudo_inverse(rep.means_hat);
  rep.weights_hat = a_pinv * sm.mean;
  Vector alpha = a_pinv * sm.m1;  // alpha_i = w_i sigma_i^2
  rep.sigma2_per_component.resize(k);
  for (Index i = 0; i < k; ++i) {
    rep.sigma2_per_component[i] = alpha[i] / rep.weights_hat[i];
    if (rep.sigma2_per_component[i] < 0.0)
      rep.diag.negative_variance_components.push_back(int(i));
  }
  rep.sigma2_hat = rep.weights_hat.dot(rep.sigma2_per_component);
  rep.diag.sigma_k_m2_hat = sigma_k;
  rep.diag.gamma = gamma_threshold(
      k, std::clamp(rep.weights_hat.maxCoeff(), 1e-12, 1.0));
  return rep;
}

EstimateReport estimate_spherical_exact(const PopulationMoments& pm,
                                        const Vector& eta) {
  return estimate_spherical_exact(spherical_from_population(pm), eta);
}

EstimateReport estimate_spherical_auto(const SphericalMoments& sm,
                                       std::uint64_t seed) {
  const Index d = sm.m2.rows();
  for (int attempt = 0; attempt < 16; ++attempt) {
    rng::Engine eng = rng::engine(rng::derive(seed, "eta", attempt));
    Vector eta = rng::unit_sphere(eng, d);
    try {
      EstimateReport rep = estimate_spherical_exact(sm, eta);
      rep.diag.eta_attempts = attempt + 1;
      return rep;
    } catch (const EtaCollisionError&) {
      // re-draw
    }
  }
  throw EtaCollisionError(
      "estimate_spherical_auto: eta collision persisted for 16 draws");
}

namespace {

MatchScore score_permutation(const Matrix& est, const MixtureModel& truth,
                             const std::vector<int>& perm) {
  const Index k = truth.k;
  MatchScore s;
  s.permutation = perm;
  s.per_component_l2.resize(k);
  Matrix m2 = truth.means * truth.weights.asDiagonal() * truth.means.transpose();
  double sqrt_sigma1 = std::sqrt(sym_eig(m2).eigenvalues[0]);
  s.max_rel = 0.0;
  for (Index j = 0; j < k; ++j) {
    double err = (est.col(perm[j]) - truth.means.col(j)).norm();
    s.per_component_l2[j] = err;
    double rel = err / (truth.means.col(j).norm() + sqrt_sigma1);
    s.max_rel = std::max(s.max_rel, rel);
  }
  return s;
}

std::vector<int> match_exhaustive(const Matrix& cost) {
  const int k = int(cost.rows());
  std::vector<int> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_max = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) worst = std::max(worst, cost(perm[j], j));
    if (worst < best_max) {
      best_max = worst;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Perfect matching restricted to edges with cost <= limit, via augmenting
// paths. Returns the matching (estimate index per truth column) or empty.
std::vector<int> feasible_matching(const Matrix& cost, double limit) {
  const int k = int(cost.rows());
  std::vector<int> match_est(k, -1);  // estimate i -> truth j
  std::vector<int> match_truth(k, -1);
  std::vector<char> visited(k);
  std::function<bool(int)> augment = [&](int j) -> bool {
    for (int i = 0; i < k; ++i) {
      if (visited[i] || cost(i, j) > limit) continue;
      visited[i] = 1;
      if (match_est[i] < 0 || augment(match_est[i])) {
        match_est[i] = j;
        match_truth[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int j = 0; j < k; ++j) {
    std::fill(visited.begin(), visited.end(), 0);
    if (!augment(j)) return {};
  }
  return match_truth;
}

std::vector<int> match_bottleneck(const Matrix& cost) {
  std::vector<double> levels(cost.data(), cost.data() + cost.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  int lo = 0, hi = int(levels.size()) - 1;
  std::vector<int> best = feasible_matching(cost, levels[hi]);
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    std::vector<int> m = feasible_matching(cost, levels[mid]);
    if (!m.empty()) {
      best = std::move(m);
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return best;
}

}  // namespace

MatchScore match_and_score(const Matrix& means_hat, const MixtureModel& truth,
                           MatchMethod method) {
  if (means_hat.rows() != truth.d || means_hat.cols() != truth.k)
    throw ParameterError("match_and_score: dimension mismatch");
  const Index k = truth.k;
  Matrix cost(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      cost(i, j) = (means_hat.col(i) - truth.means.col(j)).norm();

  std::vector<int> perm;
  bool exhaustive = method == MatchMethod::kExhaustive ||
                    (method == MatchMethod::kAuto && k <= 8);
  perm = exhaustive ? match_exhaustive(cost) : match_bottleneck(cost);
  return score_permutation(means_hat, truth, perm);
}

}  // namespace smog
