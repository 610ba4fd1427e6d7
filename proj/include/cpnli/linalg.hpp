#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "cpnli/types.hpp"

namespace cpnli {

/// Eigen-decomposition of a small Hermitian matrix with reproducible output:
/// eigenvalues descending, each eigenvector scaled so that its first
/// component of non-negligible magnitude is real and positive.
template <typename Real, int N>
struct HermitianEigen {
  Eigen::Matrix<Real, N, 1> values;
  Eigen::Matrix<std::complex<Real>, N, N> vectors;  // column k pairs with values(k)
};

template <typename Derived>
auto hermitian_eigen(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  constexpr int N = Derived::RowsAtCompileTime;
  static_assert(N != Eigen::Dynamic, "hermitian_eigen expects a fixed-size matrix");
  using Matrix = Eigen::Matrix<std::complex<Real>, N, N>;

  const Matrix h = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);

  // Eigen returns ascending order.
  HermitianEigen<Real, N> out;
  for (int k = 0; k < N; ++k) {
    out.values(k) = solver.eigenvalues()(N - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(N - 1 - k);
  }

  const Real tol = Real(1e3) * std::numeric_limits<Real>::epsilon();
  for (int k = 0; k < N; ++k) {
    auto v = out.vectors.col(k);
    for (int i = 0; i < N; ++i) {
      const Real mag = std::abs(v(i));
      if (mag > tol) {
        v *= std::conj(v(i)) / mag;
        v(i) = std::complex<Real>(std::real(v(i)), 0);
        break;
      }
    }
  }
  return out;
}

/// Eigenvalues below this (in absolute terms) are treated as roundoff zeros
/// for unit-trace PSD matrices.
template <typename Real>
constexpr Real eigenvalue_floor() {
  return Real(64) * std::numeric_limits<Real>::epsilon();
}

/// Columns sqrt(p_k) e_k of a PSD matrix, so that m = F F^dagger.
template <typename Derived>
auto psd_factor(const Eigen::MatrixBase<Derived>& m) {
  const auto eig = hermitian_eigen(m);
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  auto factor = eig.vectors;
  for (int k = 0; k < factor.cols(); ++k) {
    const Real p = eig.values(k) > eigenvalue_floor<Real>() ? eig.values(k) : Real(0);
    factor.col(k) *= std::sqrt(p);
  }
  return factor;
}

/// Principal square root of a PSD Hermitian matrix.
template <typename Derived>
auto psd_sqrt(const Eigen::MatrixBase<Derived>& m) {
  const auto eig = hermitian_eigen(m);
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  auto d = eig.values;
  for (int k = 0; k < d.size(); ++k) d(k) = d(k) > eigenvalue_floor<Real>() ? std::sqrt(d(k)) : Real(0);
  return (eig.vectors * d.asDiagonal() * eig.vectors.adjoint()).eval();
}

template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace cpnli
