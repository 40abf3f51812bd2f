#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <limits>
#include <random>

#include "smog/ica.hpp"
#include "smog/multiview.hpp"
#include "smog/rng.hpp"

using namespace smog;

namespace {

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

Matrix rademacher_data(const Matrix& mixing, Index n, std::uint64_t seed,
                       double noise_sigma = 0.0) {
  const Index k = mixing.rows();
  rng::Engine eng = rng::engine(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix data(n, k);
  Vector h(k);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < k; ++i) h[i] = coin(eng) < 0.5 ? -1.0 : 1.0;
    Vector x = mixing * h;
    if (noise_sigma > 0)
      for (Index i = 0; i < k; ++i) x[i] += noise_sigma * normal(eng);
    data.row(j) = x.transpose();
  }
  return data;
}

Matrix gaussian_data(Index k, Index n, std::uint64_t seed) {
  rng::Engine eng = rng::engine(seed);
  Matrix data(n, k);
  for (Index j = 0; j < n; ++j)
    data.row(j) = rng::gaussian(eng, k).transpose();
  return data;
}

// max angular error after greedy |dot| matching of unit columns
double max_angular_error(const Matrix& est, const Matrix& truth) {
  const Index k = truth.cols();
  std::vector<bool> used(k, false);
  double worst = 0.0;
  for (Index i = 0; i < k; ++i) {
    int best = -1;
    double best_dot = -1.0;
    for (Index j = 0; j < k; ++j) {
      if (used[j]) continue;
      double dot = std::abs(est.col(j).dot(truth.col(i)));
      if (dot > best_dot) {
        best_dot = dot;
        best = int(j);
      }
    }
    used[best] = true;
    worst = std::max(worst, std::acos(std::min(1.0, best_dot)));
  }
  return worst;
}

// sign/permutation-matched column distance; stable below sqrt(eps) where
// acos saturates
double max_column_dist(const Matrix& est, const Matrix& truth) {
  const Index k = truth.cols();
  std::vector<bool> used(k, false);
  double worst = 0.0;
  for (Index i = 0; i < k; ++i) {
    int best = -1;
    double best_err = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) {
      if (used[j]) continue;
      double err = std::min((est.col(j) - truth.col(i)).norm(),
                            (est.col(j) + truth.col(i)).norm());
      if (err < best_err) {
        best_err = err;
        best = int(j);
      }
    }
    used[best] = true;
    worst = std::max(worst, best_err);
  }
  return worst;
}

}  // namespace

TEST_CASE("exact Hessian for identity mixing and Rademacher sources") {
  Vector kappa = Vector::Constant(3, -2.0);
  Vector eta(3);
  eta << 0.5, -1.0, 2.0;
  Matrix h = cumulant_hessian_exact(Matrix::Identity(3, 3), kappa, eta);
  Matrix expected = (-2.0 * eta.array().square()).matrix().asDiagonal();
  CHECK(spectral_norm(h - expected) < 1e-14);
}

TEST_CASE("empirical Hessian vanishes on Gaussian data") {
  Matrix data = gaussian_data(2, 1000000, 3);
  Vector eta(2);
  eta << 0.6, -0.8;
  Matrix h = cumulant_hessian(data, eta).h;
  CHECK(spectral_norm(h) < 0.05);
}

TEST_CASE("Hessian at eta = 0 is exactly zero") {
  Matrix data = gaussian_data(3, 100, 4);
  Matrix h = cumulant_hessian(data, Vector::Zero(3)).h;
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hessian input validation") {
  Matrix data = gaussian_data(3, 10, 5);
  CHECK_THROWS_AS(cumulant_hessian(data, Vector::Zero(2)), ParameterError);
}

TEST_CASE("finite differences of empirical f match the Hessian") {
  Matrix mixing = random_rotation(3, 11);
  Matrix data = rademacher_data(mixing, 2000, 12);
  rng::Engine eng = rng::engine(13);
  const double step = 1e-3;
  for (int rep = 0; rep < 5; ++rep) {
    Vector eta = rng::unit_sphere(eng, 3);
    Matrix h = cumulant_hessian(data, eta).h;
    Matrix fd(3, 3);
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b) {
        Vector pp = eta, pm = eta, mp = eta, mm = eta;
        pp[a] += step; pp[b] += step;
        pm[a] += step; pm[b] -= step;
        mp[a] -= step; mp[b] += step;
        mm[a] -= step; mm[b] -= step;
        fd(a, b) = (empirical_f(data, pp) - empirical_f(data, pm) -
                    empirical_f(data, mp) + empirical_f(data, mm)) /
                   (4.0 * step * step);
      }
    double scale = h.cwiseAbs().maxCoeff();
    CHECK((fd - h).cwiseAbs().maxCoeff() <= 1e-3 * scale);
  }
}

TEST_CASE("exact estimator recovers the coordinate basis") {
  Vector kappa = Vector::Constant(3, -2.0);
  IcaEstimate est = ica_estimate_exact(Matrix::Identity(3, 3), kappa, 21);
  CHECK(max_column_dist(est.columns, Matrix::Identity(3, 3)) < 1e-8);
}

TEST_CASE("exact estimator recovers a random rotation") {
  Matrix mixing = random_rotation(4, 31);
  Vector kappa = Vector::Constant(4, -2.0);
  IcaEstimate est = ica_estimate_exact(mixing, kappa, 32);
  CHECK(max_column_dist(est.columns, mixing) < 1e-8);
}

TEST_CASE("empirical estimator recovers a planar rotation") {
  const double angle = 30.0 * M_PI / 180.0;
  Matrix mixing(2, 2);
  mixing << std::cos(angle), -std::sin(angle), std::sin(angle),
      std::cos(angle);
  Matrix data = rademacher_data(mixing, 1000000, 41);
  IcaEstimate est = ica_estimate(data, 42);
  CHECK(max_angular_error(est.columns, mixing) < 0.05);
}

TEST_CASE("Gaussian sources trigger the kurtosis degeneracy error") {
  Matrix data = gaussian_data(2, 100000, 51);
  CHECK_THROWS_AS(ica_estimate(data, 52), KurtosisDegeneracyError);
  Vector kappa = Vector::Zero(2);
  CHECK_THROWS_AS(ica_estimate_exact(Matrix::Identity(2, 2), kappa, 53),
                  KurtosisDegeneracyError);
}

TEST_CASE("eigenvalue diagnostics are invariant to data rescaling") {
  Matrix mixing = random_rotation(3, 61);
  Matrix data = rademacher_data(mixing, 50000, 62);
  IcaEstimate a = ica_estimate(data, 63);
  Matrix scaled = 3.5 * data;
  IcaEstimate b = ica_estimate(scaled, 63);
  CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() <=
        1e-9 * a.eigenvalues.cwiseAbs().maxCoeff());
  CHECK(max_column_dist(a.columns, b.columns) < 1e-9);
}

TEST_CASE("recovered columns are invariant to source permutation") {
  Matrix mixing = random_rotation(3, 71);
  Vector kappa = Vector::Constant(3, -2.0);
  Matrix permuted(3, 3);
  permuted.col(0) = mixing.col(2);
  permuted.col(1) = mixing.col(0);
  permuted.col(2) = mixing.col(1);
  IcaEstimate a = ica_estimate_exact(mixing, kappa, 72);
  IcaEstimate b = ica_estimate_exact(permuted, kappa, 72);
  CHECK(max_column_dist(a.columns, b.columns) < 1e-8);
}

TEST_CASE("additive Gaussian noise leaves the estimate close to the truth") {
  Matrix mixing = random_rotation(3, 81);
  Matrix data = rademacher_data(mixing, 1000000, 82, 0.5);
  IcaEstimate est = ica_estimate(data, 83);
  CHECK(max_angular_error(est.columns, mixing) <= 0.1);
}
