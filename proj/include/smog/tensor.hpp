#pragma once

#include <cmath>
#include <vector>

#include "smog/common.hpp"

namespace smog {

/// Dense cubic third-order tensor of side `dim`, stored flat.
/// Small by construction: downstream code only ever materializes k x k x k
/// tensors (k = number of mixture components), never d x d x d.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(Index dim) : dim_(dim), v_(dim * dim * dim, 0.0) {}

  Index dim() const { return dim_; }

  double& operator()(Index i, Index j, Index l) {
    return v_[(i * dim_ + j) * dim_ + l];
  }
  double operator()(Index i, Index j, Index l) const {
    return v_[(i * dim_ + j) * dim_ + l];
  }

  /// Contract the third index: result(i,j) = sum_l T(i,j,l) theta(l).
  Matrix contract(const Vector& theta) const {
    if (theta.size() != dim_)
      throw ParameterError("Tensor3::contract: theta dimension mismatch");
    Matrix out = Matrix::Zero(dim_, dim_);
    for (Index i = 0; i < dim_; ++i)
      for (Index j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (Index l = 0; l < dim_; ++l) s += (*this)(i, j, l) * theta[l];
        out(i, j) = s;
      }
    return out;
  }

  /// Average over all 6 index permutations.
  void symmetrize() {
    for (Index i = 0; i < dim_; ++i)
      for (Index j = i; j < dim_; ++j)
        for (Index l = j; l < dim_; ++l) {
          double s = ((*this)(i, j, l) + (*this)(i, l, j) + (*this)(j, i, l) +
                      (*this)(j, l, i) + (*this)(l, i, j) + (*this)(l, j, i)) /
                     6.0;
          (*this)(i, j, l) = s;
          (*this)(i, l, j) = s;
          (*this)(j, i, l) = s;
          (*this)(j, l, i) = s;
          (*this)(l, i, j) = s;
          (*this)(l, j, i) = s;
        }
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  Tensor3& operator+=(const Tensor3& o) {
    if (o.dim_ != dim_) throw ParameterError("Tensor3: dimension mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    if (o.dim_ != dim_) throw ParameterError("Tensor3: dimension mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Tensor3& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }

  /// Accumulate the symmetric rank-one update c * y (x) y (x) y. Each entry
  /// is computed once in canonical index order and copied to its mirror
  /// positions, so the result is exactly symmetric.
  void add_outer3(const Vector& y, double c = 1.0) {
    for (Index i = 0; i < dim_; ++i)
      for (Index j = i; j < dim_; ++j) {
        double yij = c * y[i] * y[j];
        for (Index l = j; l < dim_; ++l) {
          double v = (*this)(i, j, l) + yij * y[l];
          set_symmetric(i, j, l, v);
        }
      }
  }

  /// Write the same value to every distinct permutation slot of (i,j,l).
  void set_symmetric(Index i, Index j, Index l, double v) {
    (*this)(i, j, l) = v;
    (*this)(i, l, j) = v;
    (*this)(j, i, l) = v;
    (*this)(j, l, i) = v;
    (*this)(l, i, j) = v;
    (*this)(l, j, i) = v;
  }

  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }

 private:
  Index dim_ = 0;
  std::vector<double> v_;
};

/// Whitened third-moment tensor; fully symmetric by construction.
using WhitenedTensor = Tensor3;

}  // namespace smog
