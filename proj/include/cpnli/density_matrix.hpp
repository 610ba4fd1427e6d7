#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cpnli/linalg.hpp"
#include "cpnli/types.hpp"

namespace cpnli {

template <typename Real>
struct DensityTolerance {
  static constexpr Real value = Real(1e-10);
};

/// Lists every invariant `m` violates as a two-qubit density matrix.
template <typename Derived>
std::vector<std::string> density_violations(
    const Eigen::MatrixBase<Derived>& m,
    typename Eigen::NumTraits<typename Derived::Scalar>::Real tol =
        DensityTolerance<typename Eigen::NumTraits<typename Derived::Scalar>::Real>::value) {
  std::vector<std::string> out;
  if (!m.allFinite()) {
    out.emplace_back("finite");
    return out;
  }
  const auto herm_err = max_abs(m - m.adjoint());
  if (herm_err > tol) {
    std::ostringstream os;
    os << "hermitian: |m - m^dagger|_max = " << herm_err;
    out.push_back(os.str());
  }
  const auto tr = m.trace();
  if (std::abs(tr - typename Derived::Scalar(1)) > tol) {
    std::ostringstream os;
    os << "unit-trace: trace = " << tr;
    out.push_back(os.str());
  }
  const auto lowest = hermitian_eigen(m).values.minCoeff();
  if (lowest < -tol) {
    std::ostringstream os;
    os << "positive-semidefinite: smallest eigenvalue = " << lowest;
    out.push_back(os.str());
  }
  return out;
}

/// Physical two-qubit polarization state in the (HH, HV, VH, VV) basis.
/// Construction validates Hermiticity, unit trace and positivity.
template <typename Real>
class BasicDensityMatrix {
 public:
  using Matrix = Matrix4c<Real>;

  BasicDensityMatrix() : m_(Matrix::Identity() / Real(4)) {}

  static BasicDensityMatrix from_matrix(const Matrix& m, Real tol = DensityTolerance<Real>::value) {
    const auto bad = density_violations(m, tol);
    if (!bad.empty()) {
      const auto name = bad.front().substr(0, bad.front().find(':'));
      throw ValidationError(name, bad.front());
    }
    return BasicDensityMatrix((m + m.adjoint()) / Real(2));
  }

  /// Divides by the trace first, then validates.
  static BasicDensityMatrix from_unnormalized(const Matrix& m, Real tol = DensityTolerance<Real>::value) {
    const Real tr = std::real(m.trace());
    if (!(tr > Real(0)) || !std::isfinite(tr)) throw ValidationError("positive-trace", "trace must be positive");
    return from_matrix(m / tr, tol);
  }

  static BasicDensityMatrix from_ket(const Ket4<Real>& ket) {
    const Real n2 = ket.squaredNorm();
    if (!(n2 > Real(0)) || !std::isfinite(n2)) throw ValidationError("nonzero-ket", "ket has zero or non-finite norm");
    return BasicDensityMatrix(ket * ket.adjoint() / n2);
  }

  static BasicDensityMatrix maximally_mixed() { return BasicDensityMatrix(); }

  const Matrix& matrix() const { return m_; }
  std::complex<Real> operator()(int row, int col) const { return m_(row, col); }

 private:
  explicit BasicDensityMatrix(const Matrix& m) : m_(m) {}
  Matrix m_;
};

using DensityMatrix = BasicDensityMatrix<double>;

}  // namespace cpnli
