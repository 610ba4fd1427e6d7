#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "cpnli/density_matrix.hpp"

namespace cpnli {

/// sigma_y (x) sigma_y in the (HH, HV, VH, VV) basis.
template <typename Real = double>
Matrix4c<Real> spin_flip() {
  Matrix4c<Real> y = Matrix4c<Real>::Zero();
  y(0, 3) = -1;
  y(1, 2) = 1;
  y(2, 1) = 1;
  y(3, 0) = -1;
  return y;
}

/// Wootters concurrence. The lambda_i are computed as the singular values of
/// tau = F^T (sigma_y (x) sigma_y) F with rho = F F^dagger, which equal the
/// square roots of the eigenvalues of rho (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)
/// but avoid taking square roots of roundoff-level eigenvalues.
template <typename Real>
Real concurrence(const BasicDensityMatrix<Real>& rho) {
  const Matrix4c<Real> f = psd_factor(rho.matrix());
  const Matrix4c<Real> tau = f.transpose() * spin_flip<Real>() * f;
  Eigen::JacobiSVD<Matrix4c<Real>> svd(tau);
  const auto& s = svd.singularValues();  // descending
  const Real c = s(0) - s(1) - s(2) - s(3);
  return std::clamp(c, Real(0), Real(1));
}

template <typename Derived>
auto concurrence(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  return concurrence(BasicDensityMatrix<Real>::from_matrix(m));
}

/// Concurrence of a pure state, |<psi| sigma_y (x) sigma_y |psi*>| / <psi|psi>.
template <typename Real>
Real concurrence(const Ket4<Real>& ket) {
  const Real n2 = ket.squaredNorm();
  if (!(n2 > Real(0))) throw ValidationError("nonzero-ket", "ket has zero norm");
  return std::min(Real(1), std::abs((ket.transpose() * spin_flip<Real>() * ket)(0)) / n2);
}

template <typename Real>
Real purity(const BasicDensityMatrix<Real>& rho) {
  return rho.matrix().squaredNorm();
}

template <typename Derived>
auto purity(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
  return purity(BasicDensityMatrix<Real>::from_matrix(m));
}

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated as the
/// squared nuclear norm of F_rho^dagger F_sigma. Symmetric by construction.
template <typename Real>
Real fidelity(const BasicDensityMatrix<Real>& rho, const BasicDensityMatrix<Real>& sigma) {
  const Matrix4c<Real> a = psd_factor(rho.matrix());
  const Matrix4c<Real> b = psd_factor(sigma.matrix());
  Eigen::JacobiSVD<Matrix4c<Real>> svd(a.adjoint() * b);
  const Real root = svd.singularValues().sum();
  return std::clamp(root * root, Real(0), Real(1));
}

template <typename DerivedA, typename DerivedB>
auto fidelity(const Eigen::MatrixBase<DerivedA>& rho, const Eigen::MatrixBase<DerivedB>& sigma) {
  using Real = typename Eigen::NumTraits<typename DerivedA::Scalar>::Real;
  return fidelity(BasicDensityMatrix<Real>::from_matrix(rho), BasicDensityMatrix<Real>::from_matrix(sigma));
}

/// (U_A (x) U_B) rho (U_A (x) U_B)^dagger
template <typename Real, typename DerivedA, typename DerivedB>
BasicDensityMatrix<Real> apply_local(const BasicDensityMatrix<Real>& rho, const Eigen::MatrixBase<DerivedA>& ua,
                                     const Eigen::MatrixBase<DerivedB>& ub) {
  const Matrix4c<Real> u = kron2(ua, ub);
  return BasicDensityMatrix<Real>::from_unnormalized(u * rho.matrix() * u.adjoint());
}

}  // namespace cpnli
