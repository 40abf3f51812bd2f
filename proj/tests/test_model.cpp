#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "smog/linalg.hpp"
#include "smog/model.hpp"
#include "smog/rng.hpp"

using namespace smog;

namespace {

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

MixtureModel two_component_example(Index d = 2) {
  // means e1, e2 (embedded in R^d), w = (1/2, 1/2), variances (1, 3)
  Matrix means = Matrix::Zero(d, 2);
  means(0, 0) = 1.0;
  means(1, 1) = 1.0;
  return make_mixture_model(means, Vector{{0.5, 0.5}}, Vector{{1.0, 3.0}});
}

}  // namespace

TEST_CASE("validate_model on a well-posed two-component model") {
  MixtureModel m = two_component_example();
  ModelDiagnostics diag = validate_model(m);
  CHECK(diag.rank_ok);
  // M2 = I/2 on the span, both eigenvalues 1/2
  CHECK(diag.sigma_k_M2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(diag.w_min == doctest::Approx(0.5));
}

TEST_CASE("validate_model flags collinear means") {
  Matrix means(2, 2);
  means << 1.0, 2.0, 0.0, 0.0;  // e1 and 2 e1
  MixtureModel m = make_mixture_model(means, Vector{{0.5, 0.5}}, 1.0);
  CHECK_FALSE(validate_model(m).rank_ok);
}

TEST_CASE("validate_model flags a vanishing weight") {
  Matrix means(2, 2);
  means << 1.0, 0.0, 0.0, 1.0;
  MixtureModel m = make_mixture_model(means, Vector{{1.0, 0.0}}, 1.0);
  ModelDiagnostics diag = validate_model(m);
  CHECK_FALSE(diag.rank_ok);
  CHECK(diag.w_min == 0.0);
}

TEST_CASE("model construction validates structure") {
  CHECK_THROWS_AS(
      make_mixture_model(Matrix::Identity(2, 2), Vector{{0.5}}, 1.0),
      ParameterError);
  CHECK_THROWS_AS(make_mixture_model(Matrix::Identity(2, 2),
                                     Vector{{0.5, 0.5}}, Vector{{-1.0, 1.0}}),
                  ParameterError);
  CHECK_THROWS_AS(make_mixture_model(Matrix::Identity(2, 2),
                                     Vector{{0.0, 0.0}}, 1.0),
                  ParameterError);
}

TEST_CASE("sampling a point mass gives exact copies of the mean") {
  Matrix mean = Matrix::Zero(3, 1);
  MixtureModel m = make_mixture_model(mean, Vector{{1.0}}, 0.0);
  SampleSet s = sample(m, 5, 123);
  CHECK(s.n() == 5);
  CHECK(s.data.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sampling is deterministic given the seed") {
  MixtureModel m = two_component_example();
  SampleSet a = sample(m, 1000, 77);
  SampleSet b = sample(m, 1000, 77);
  CHECK(a.data == b.data);
  SampleSet c = sample(m, 1000, 78);
  CHECK(a.data != c.data);
}

TEST_CASE("law of large numbers for the sample covariance") {
  Matrix mean = Matrix::Zero(3, 1);
  MixtureModel m = make_mixture_model(mean, Vector{{1.0}}, 1.0);
  SampleSet s = sample(m, 100000, 5);
  Vector mu = s.data.colwise().mean();
  Matrix cov = (s.data.transpose() * s.data) / double(s.n()) -
               mu * mu.transpose();
  CHECK(spectral_norm(cov - Matrix::Identity(3, 3)) < 0.05);
}

TEST_CASE("raw second moment converges to M2 + sigma_bar2 I") {
  Matrix mean = Matrix::Zero(2, 1);
  mean(0, 0) = 1.0;
  MixtureModel m = make_mixture_model(mean, Vector{{1.0}}, 1.5);
  PopulationMoments pm = population_moments(m);
  for (std::uint64_t seed : {1, 2, 3}) {
    SampleSet s = sample(m, 1000000, seed);
    Matrix raw2 = (s.data.transpose() * s.data) / double(s.n());
    CHECK(spectral_norm(raw2 - pm.raw_second()) <= 0.02);
  }
}

TEST_CASE("population moments of a single component") {
  Matrix mean(3, 1);
  mean << 1.0, -2.0, 0.5;
  MixtureModel m = make_mixture_model(mean, Vector{{1.0}}, 2.0);
  PopulationMoments pm = population_moments(m);
  CHECK((pm.m1 - 2.0 * mean.col(0)).norm() < 1e-14);
  CHECK(spectral_norm(pm.m2 - mean.col(0) * mean.col(0).transpose()) < 1e-14);
  CHECK(pm.sigma_bar2 == doctest::Approx(2.0));
}

TEST_CASE("population moments of the two-component example") {
  PopulationMoments pm = population_moments(two_component_example());
  CHECK(pm.sigma_bar2 == doctest::Approx(2.0));
  CHECK(pm.m1[0] == doctest::Approx(0.5));
  CHECK(pm.m1[1] == doctest::Approx(1.5));
  CHECK(spectral_norm(pm.m2 - 0.5 * Matrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("m3_slice is exactly linear in eta") {
  PopulationMoments pm = population_moments(two_component_example(3));
  rng::Engine eng = rng::engine(4);
  Vector e1 = rng::gaussian(eng, 3);
  Vector e2 = rng::gaussian(eng, 3);
  Matrix lhs = pm.m3_slice(e1 + e2);
  Matrix rhs = pm.m3_slice(e1) + pm.m3_slice(e2);
  CHECK(spectral_norm(lhs - rhs) <= 1e-12 * std::max(1.0, spectral_norm(lhs)));

  CHECK(pm.m3_slice(Vector::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("m3_slice matches the contraction of the component sum") {
  PopulationMoments pm = population_moments(two_component_example(3));
  Vector eta(3);
  eta << 0.3, -0.7, 0.2;
  // direct evaluation of sum_i w_i (eta'mu_i) mu_i mu_i'
  Matrix expected = Matrix::Zero(3, 3);
  for (Index i = 0; i < 2; ++i)
    expected += pm.weights[i] * eta.dot(pm.means.col(i)) * pm.means.col(i) *
                pm.means.col(i).transpose();
  CHECK(spectral_norm(pm.m3_slice(eta) - expected) < 1e-14);
}

TEST_CASE("m3_contracted is exactly symmetric in all six index orders") {
  MixtureModel m = two_component_example(4);
  PopulationMoments pm = population_moments(m);
  rng::Engine eng = rng::engine(17);
  Matrix r(4, 3);
  for (Index j = 0; j < 3; ++j) r.col(j) = rng::gaussian(eng, 4);
  Tensor3 t = pm.m3_contracted(r);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      for (Index l = 0; l < 3; ++l) {
        CHECK(t(i, j, l) == t(i, l, j));
        CHECK(t(i, j, l) == t(j, i, l));
        CHECK(t(i, j, l) == t(l, j, i));
        CHECK(t(i, j, l) == t(j, l, i));
        CHECK(t(i, j, l) == t(l, i, j));
      }
}

TEST_CASE("raw_third_contracted equals m3 plus the mean-correction terms") {
  PopulationMoments pm = population_moments(two_component_example(3));
  rng::Engine eng = rng::engine(23);
  Matrix r(3, 2);
  for (Index j = 0; j < 2; ++j) r.col(j) = rng::gaussian(eng, 3);
  Tensor3 raw = pm.raw_third_contracted(r);
  Tensor3 m3 = pm.m3_contracted(r);
  Vector m1r = r.transpose() * pm.m1;
  Matrix gram = r.transpose() * r;
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      for (Index c = 0; c < 2; ++c) {
        double corr = m1r[a] * gram(b, c) + m1r[b] * gram(a, c) +
                      m1r[c] * gram(a, b);
        CHECK(raw(a, b, c) ==
              doctest::Approx(m3(a, b, c) + corr).epsilon(1e-12));
      }
}
