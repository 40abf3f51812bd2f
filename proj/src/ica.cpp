#include "smog/ica.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "smog/linalg.hpp"
#include "smog/moments.hpp"
#include "smog/rng.hpp"

namespace smog {

double empirical_f(const Eigen::Ref<const Matrix>& data, const Vector& eta) {
  const Index k = data.cols();
  if (eta.size() != k) throw ParameterError("empirical_f: dimension mismatch");
  KahanScalar m2, m4;
  for (Index j = 0; j < data.rows(); ++j) {
    double s = 0.0;
    for (Index a = 0; a < k; ++a) s += eta[a] * data(j, a);
    double s2 = s * s;
    m2.add(s2);
    m4.add(s2 * s2);
  }
  const double n = double(data.rows());
  double mm2 = m2.sum / n;
  double mm4 = m4.sum / n;
  return (mm4 - 3.0 * mm2 * mm2) / 12.0;
}

CumulantHessian cumulant_hessian(const Eigen::Ref<const Matrix>& data,
                                 const Vector& eta) {
  const Index k = data.cols();
  if (eta.size() != k)
    throw ParameterError("cumulant_hessian: dimension mismatch");
  if (data.rows() < 2)
    throw ParameterError("cumulant_hessian: need at least 2 samples");

  const Index tri = k * (k + 1) / 2;
  std::vector<KahanScalar> quad(tri);  // (eta'x)^2 x x'
  std::vector<KahanScalar> raw2(tri);  // x x'
  std::vector<KahanScalar> lin(k);     // (eta'x) x
  KahanScalar m2;
  std::vector<double> x(static_cast<std::size_t>(k));
  for (Index j = 0; j < data.rows(); ++j) {
    double s = 0.0;
    for (Index a = 0; a < k; ++a) {
      x[a] = data(j, a);
      s += eta[a] * x[a];
    }
    double s2 = s * s;
    m2.add(s2);
    Index t = 0;
    for (Index a = 0; a < k; ++a) {
      lin[a].add(s * x[a]);
      for (Index b = 0; b <= a; ++b, ++t) {
        double xab = x[a] * x[b];
        quad[t].add(s2 * xab);
        raw2[t].add(xab);
      }
    }
  }

  const double inv_n = 1.0 / double(data.rows());
  Matrix q(k, k), r(k, k);
  Vector l(k);
  Index t = 0;
  for (Index a = 0; a < k; ++a) {
    l[a] = lin[a].sum * inv_n;
    for (Index b = 0; b <= a; ++b, ++t) {
      q(a, b) = q(b, a) = quad[t].sum * inv_n;
      r(a, b) = r(b, a) = raw2[t].sum * inv_n;
    }
  }
  double mm2 = m2.sum * inv_n;

  CumulantHessian out;
  out.eta = eta;
  out.h = q - 2.0 * l * l.transpose() - mm2 * r;
  out.h = 0.5 * (out.h + out.h.transpose());
  return out;
}

Matrix cumulant_hessian_exact(const Matrix& mixing, const Vector& kurtosis,
                              const Vector& eta) {
  const Index k = mixing.rows();
  if (mixing.cols() != k)
    throw ParameterError("cumulant_hessian_exact: mixing must be square");
  if (kurtosis.size() != k || eta.size() != k)
    throw ParameterError("cumulant_hessian_exact: dimension mismatch");
  Matrix h = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    double proj = eta.dot(mixing.col(i));
    h.noalias() +=
        kurtosis[i] * proj * proj * mixing.col(i) * mixing.col(i).transpose();
  }
  return h;
}

namespace {

void fix_column_sign(Matrix& columns) {
  for (Index j = 0; j < columns.cols(); ++j) {
    for (Index i = 0; i < columns.rows(); ++i) {
      if (std::abs(columns(i, j)) > 1e-9) {
        if (columns(i, j) < 0.0) columns.col(j) = -columns.col(j);
        break;
      }
    }
  }
}

struct HessianProvider {
  std::function<Matrix(const Vector&)> at;
  double scale;  // reference magnitude: a Hessian below tol * scale is
                 // treated as numerically zero (degenerate kurtosis)
  double tol;
};

IcaEstimate ica_core(const HessianProvider& provider, Index k,
                     std::uint64_t seed) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    rng::Engine eng_phi = rng::engine(rng::derive(seed, "ica-phi", attempt));
    rng::Engine eng_psi = rng::engine(rng::derive(seed, "ica-psi", attempt));
    Vector phi = rng::unit_sphere(eng_phi, k);
    Vector psi = rng::unit_sphere(eng_psi, k);

    Matrix h_psi = provider.at(psi);
    SymEigResult psi_eig = sym_eig(h_psi);
    double psi_max = psi_eig.eigenvalues.cwiseAbs().maxCoeff();
    double psi_min = psi_eig.eigenvalues.cwiseAbs().minCoeff();
    if (psi_max <= provider.tol * provider.scale ||
        psi_min <= 1e-10 * psi_max)
      continue;  // singular or vanishing Hessian: re-draw

    Matrix h_phi = provider.at(phi);
    Matrix h_psi_inv = psi_eig.eigenvectors *
                       psi_eig.eigenvalues.cwiseInverse().asDiagonal() *
                       psi_eig.eigenvectors.transpose();
    Matrix m = h_phi * h_psi_inv;

    Eigen::EigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) continue;
    Eigen::VectorXcd ev = solver.eigenvalues();
    double radius = ev.cwiseAbs().maxCoeff();
    if (radius <= 0.0) continue;
    if (ev.imag().cwiseAbs().maxCoeff() > 1e-6 * radius)
      continue;  // complex pair: ratios not distinct at this draw

    std::vector<Index> order(k);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      return ev[a].real() > ev[b].real();
    });
    bool distinct = true;
    for (Index i = 0; i + 1 < k; ++i) {
      double a = ev[order[i]].real(), b = ev[order[i + 1]].real();
      if (std::abs(a - b) <= 1e-6 * radius) distinct = false;
    }
    if (!distinct) continue;

    IcaEstimate out;
    out.columns.resize(k, k);
    out.eigenvalues.resize(k);
    for (Index i = 0; i < k; ++i) {
      out.eigenvalues[i] = ev[order[i]].real();
      Vector col = solver.eigenvectors().col(order[i]).real();
      out.columns.col(i) = col / col.norm();
    }
    fix_column_sign(out.columns);
    out.attempts = attempt + 1;
    return out;
  }
  throw KurtosisDegeneracyError(
      "ica_estimate: cumulant Hessian stayed singular over 16 direction "
      "draws; source excess kurtosis is indistinguishable from zero");
}

}  // namespace

IcaEstimate ica_estimate(const Eigen::Ref<const Matrix>& data,
                         std::uint64_t seed) {
  const Index k = data.cols();
  if (data.rows() < 2)
    throw ParameterError("ica_estimate: need at least 2 samples");
  // Data scale for the degeneracy check: ||E[xx']||_2. An honest
  // fourth-cumulant Hessian is O(scale); pure sampling noise is
  // O(scale / sqrt(n)).
  Matrix raw2 = (data.transpose() * data) / double(data.rows());
  double scale = sym_eig(raw2).eigenvalues.cwiseAbs().maxCoeff();
  HessianProvider provider;
  provider.at = [&data](const Vector& eta) {
    return cumulant_hessian(data, eta).h;
  };
  provider.scale = std::max(scale, 1e-300);
  provider.tol = std::max(1e-8, 40.0 / std::sqrt(double(data.rows())));
  return ica_core(provider, k, seed);
}

IcaEstimate ica_estimate_exact(const Matrix& mixing, const Vector& kurtosis,
                               std::uint64_t seed) {
  const Index k = mixing.rows();
  HessianProvider provider;
  provider.at = [&mixing, &kurtosis](const Vector& eta) {
    return cumulant_hessian_exact(mixing, kurtosis, eta);
  };
  double scale = mixing.squaredNorm();
  provider.scale = std::max(scale, 1e-300);
  provider.tol = 1e-12;
  return ica_core(provider, k, seed);
}

}  // namespace smog
