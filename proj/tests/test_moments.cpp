#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "smog/linalg.hpp"
#include "smog/model.hpp"
#include "smog/moments.hpp"
#include "smog/rng.hpp"

using namespace smog;

namespace {

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

MixtureModel example_d3() {
  Matrix means = Matrix::Zero(3, 2);
  means(0, 0) = 1.0;
  means(1, 1) = 1.0;
  return make_mixture_model(means, Vector{{0.5, 0.5}}, Vector{{1.0, 3.0}});
}

// Population summary: the estimator-facing fields filled with exact moments.
MomentSummary population_summary(const PopulationMoments& pm, Index k) {
  MomentSummary s;
  s.mu_hat = pm.mean;
  s.raw2 = pm.raw_second();
  Matrix cov = s.raw2 - s.mu_hat * s.mu_hat.transpose();
  s.sigma2_hat = sym_eig(cov).eigenvalues[k - 1];
  s.n = 0;
  return s;
}

}  // namespace

TEST_CASE("summarize recovers the variance of a single Gaussian") {
  Matrix mean = Matrix::Zero(2, 1);
  MixtureModel m = make_mixture_model(mean, Vector{{1.0}}, 1.0);
  SampleSet data = sample(m, 100000, 11);
  MomentSummary s = summarize(data.data, 1);
  CHECK(s.sigma2_hat == doctest::Approx(1.0).epsilon(0.05));
  CHECK(s.mu_hat.norm() < 0.02);
}

TEST_CASE("population sigma2_hat equals sigma_bar2 via direct eigenvalues") {
  PopulationMoments pm = population_moments(example_d3());
  MomentSummary s = population_summary(pm, 2);
  // second-largest eigenvalue of the population covariance is sigma_bar2 = 2
  CHECK(s.sigma2_hat == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("summarize of identical points reports zero variance") {
  Matrix data(4, 3);
  for (int r = 0; r < 4; ++r) data.row(r) << 1.0, 2.0, 3.0;
  MomentSummary s = summarize(data, 2);
  CHECK(std::abs(s.sigma2_hat) < 1e-12);
}

TEST_CASE("summary covariance is PSD up to rounding") {
  for (std::uint64_t seed : {1, 2, 3}) {
    SampleSet data = sample(example_d3(), 3000, seed);
    MomentSummary s = summarize(data.data, 2);
    Matrix cov = s.raw2 - s.mu_hat * s.mu_hat.transpose();
    Vector eig = sym_eig(cov).eigenvalues;
    CHECK(eig[eig.size() - 1] >= -1e-10);
  }
}

TEST_CASE("summarize validates its preconditions") {
  Matrix one_row(1, 2);
  one_row << 1.0, 2.0;
  CHECK_THROWS_AS(summarize(one_row, 1), ParameterError);
  Matrix ok(3, 2);
  ok.setZero();
  CHECK_THROWS_AS(summarize(ok, 3), ParameterError);
}

TEST_CASE("chunked accumulation matches a single pass") {
  MixtureModel m = example_d3();
  SampleSet data = sample(m, 5000, 3);
  MomentSummary whole = summarize(data.data, 2);
  MomentAccumulator acc(3);
  Index used = 0;
  for (Index chunk : {1237, 2000, 512, 1251}) {
    acc.add_rows(data.data.middleRows(used, chunk));
    used += chunk;
  }
  REQUIRE(used == 5000);
  MomentSummary chunked = acc.finalize(2);
  CHECK((chunked.mu_hat - whole.mu_hat).cwiseAbs().maxCoeff() <=
        1e-12 * std::max(1.0, whole.mu_hat.cwiseAbs().maxCoeff()));
  CHECK((chunked.raw2 - whole.raw2).cwiseAbs().maxCoeff() <=
        1e-12 * whole.raw2.cwiseAbs().maxCoeff());
}

TEST_CASE("summarize is permutation-insensitive and re-run stable") {
  MixtureModel m = example_d3();
  SampleSet data = sample(m, 4000, 9);
  MomentSummary a = summarize(data.data, 2);
  MomentSummary b = summarize(data.data, 2);
  CHECK(a.raw2 == b.raw2);  // identical input, identical reduction order
  Matrix reversed = data.data.colwise().reverse();
  MomentSummary c = summarize(reversed, 2);
  CHECK((a.raw2 - c.raw2).cwiseAbs().maxCoeff() <=
        1e-12 * a.raw2.cwiseAbs().maxCoeff());
}

TEST_CASE("noise_eigvec picks the smallest axis") {
  MomentSummary s;
  s.mu_hat = Vector::Zero(2);
  s.raw2 = Vector{{3.0, 1.0}}.asDiagonal();
  s.sigma2_hat = 1.0;
  s.n = 2;
  Vector v = noise_eigvec(s);
  CHECK(std::abs(std::abs(v[1]) - 1.0) < 1e-12);
  CHECK(std::abs(v[0]) < 1e-12);
}

TEST_CASE("noise_eigvec is orthogonal to centered means on exact moments") {
  PopulationMoments pm = population_moments(example_d3());
  MomentSummary s = population_summary(pm, 2);
  Vector v = noise_eigvec(s);
  for (Index i = 0; i < 2; ++i)
    CHECK(std::abs(v.dot(pm.means.col(i) - pm.mean)) < 1e-10);
}

TEST_CASE("noise_eigvec returns a unit vector on isotropic covariance") {
  MomentSummary s;
  s.mu_hat = Vector::Zero(3);
  s.raw2 = Matrix::Identity(3, 3);
  s.sigma2_hat = 1.0;
  s.n = 2;
  CHECK(noise_eigvec(s).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimate_M1 Monte Carlo against the population value") {
  MixtureModel m = example_d3();
  PopulationMoments pm = population_moments(m);
  SampleSet data = sample(m, 400000, 21);
  MomentSummary s = summarize(data.data, 2);
  Vector v = noise_eigvec(s);
  Vector m1 = estimate_M1(data.data, v, s.mu_hat);
  // population value (0.5, 1.5, 0)
  CHECK((m1 - pm.m1).norm() < 0.1);
}

TEST_CASE("estimate_M1 vanishes exactly for zero-noise mixtures") {
  Matrix means = Matrix::Zero(3, 2);
  means(0, 0) = 1.0;
  means(1, 1) = 1.0;
  MixtureModel m = make_mixture_model(means, Vector{{0.5, 0.5}}, 0.0);
  SampleSet data = sample(m, 500, 2);
  MomentSummary s = summarize(data.data, 2);
  Vector v = noise_eigvec(s);
  Vector m1 = estimate_M1(data.data, v, s.mu_hat);
  CHECK(m1.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("estimate_M1 requires a unit direction") {
  Matrix data = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(
      estimate_M1(data, Vector{{2.0, 0.0}}, Vector::Zero(2)), ParameterError);
}

TEST_CASE("m3_eta_slice Monte Carlo against the population slice") {
  MixtureModel m = example_d3();
  PopulationMoments pm = population_moments(m);
  SampleSet data = sample(m, 400000, 31);
  MomentSummary s = summarize(data.data, 2);
  Vector v = noise_eigvec(s);
  Vector m1 = estimate_M1(data.data, v, s.mu_hat);
  Vector eta(3);
  eta << 0.2, -0.5, 0.8;
  Matrix slice = m3_eta_slice(data.data, eta, m1);
  CHECK(spectral_norm(slice - pm.m3_slice(eta)) < 0.15);
}

TEST_CASE("m3_eta_slice of eta = 0 is exactly zero") {
  MixtureModel m = example_d3();
  SampleSet data = sample(m, 100, 1);
  Matrix slice = m3_eta_slice(data.data, Vector::Zero(3), Vector::Zero(3));
  CHECK(slice.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("m3_eta_slice is linear and symmetric") {
  MixtureModel m = example_d3();
  SampleSet data = sample(m, 2000, 12);
  MomentSummary s = summarize(data.data, 2);
  Vector v = noise_eigvec(s);
  Vector m1 = estimate_M1(data.data, v, s.mu_hat);
  rng::Engine eng = rng::engine(14);
  Vector e1 = rng::gaussian(eng, 3);
  Vector e2 = rng::gaussian(eng, 3);
  Matrix lhs = m3_eta_slice(data.data, e1 + e2, m1);
  Matrix rhs =
      m3_eta_slice(data.data, e1, m1) + m3_eta_slice(data.data, e2, m1);
  double scale = std::max(1.0, spectral_norm(lhs));
  CHECK(spectral_norm(lhs - rhs) <= 1e-10 * scale);
  CHECK(spectral_norm(lhs - lhs.transpose()) <= 1e-12 * scale);
}

TEST_CASE("whitened tensor on exact moments matches the contracted M3") {
  // common-variance model so the mean-based correction is exact
  Matrix means = Matrix::Zero(3, 2);
  means(0, 0) = 1.0;
  means(1, 1) = 1.0;
  MixtureModel m = make_mixture_model(means, Vector{{0.4, 0.6}}, 0.5);
  PopulationMoments pm = population_moments(m);

  // exact whitener from the top-k eigenpairs of M2
  SymEigResult eig = sym_eig(pm.m2);
  Matrix w(3, 2);
  for (Index t = 0; t < 2; ++t)
    w.col(t) = eig.eigenvectors.col(t) / std::sqrt(eig.eigenvalues[t]);

  Tensor3 raw = pm.raw_third_contracted(w);
  Vector mw = w.transpose() * pm.mean;
  Matrix gram = w.transpose() * w;
  Tensor3 assembled =
      assemble_whitened_tensor(raw, mw, gram, pm.sigma_bar2);
  Tensor3 expected = pm.m3_contracted(w);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index l = 0; l < 2; ++l)
        CHECK(assembled(i, j, l) ==
              doctest::Approx(expected(i, j, l)).epsilon(1e-10));

  // Whitened exact tensor decomposes over orthonormal directions with
  // weights w_i^{-1/2}.
  Tensor3 rebuilt(2);
  for (Index i = 0; i < 2; ++i) {
    Vector u = std::sqrt(pm.weights[i]) * (w.transpose() * pm.means.col(i));
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-10));
    rebuilt.add_outer3(u, 1.0 / std::sqrt(pm.weights[i]));
  }
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index l = 0; l < 2; ++l)
        CHECK(assembled(i, j, l) ==
              doctest::Approx(rebuilt(i, j, l)).epsilon(1e-10));
}

TEST_CASE("whitened scalar tensor is 1 for a unit-weight component") {
  Matrix mean(2, 1);
  mean << 2.0, -1.0;
  MixtureModel m = make_mixture_model(mean, Vector{{1.0}}, 0.7);
  PopulationMoments pm = population_moments(m);
  SymEigResult eig = sym_eig(pm.m2);
  Matrix w = eig.eigenvectors.col(0) / std::sqrt(eig.eigenvalues[0]);
  Tensor3 t = pm.m3_contracted(w);
  CHECK(t(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("whitened_third_moment of a single noiseless point is its cube") {
  Matrix data(1, 2);
  data << 0.3, -1.7;
  WhitenedTensor t = whitened_third_moment(data, Matrix::Identity(2, 2), 0.0);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      for (Index l = 0; l < 2; ++l) {
        // canonical-order product, matching the accumulator
        double idx[3] = {data(0, std::min({i, j, l})), 0.0, 0.0};
        Index mid = i + j + l - std::min({i, j, l}) - std::max({i, j, l});
        idx[1] = data(0, mid);
        idx[2] = data(0, std::max({i, j, l}));
        CHECK(t(i, j, l) == idx[0] * idx[1] * idx[2]);
      }
}

TEST_CASE("whitened_third_moment checks dimensions") {
  Matrix data(10, 3);
  data.setZero();
  CHECK_THROWS_AS(whitened_third_moment(data, Matrix::Identity(2, 2), 0.0),
                  ParameterError);
}
