#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cpnli {

// Two-photon polarization basis, first photon (signal) index major:
//   0 = |HH>, 1 = |HV>, 2 = |VH>, 3 = |VV>
// Every 4-vector and 4x4 matrix in the library uses this ordering.
enum class Pol2 : int { HH = 0, HV = 1, VH = 2, VV = 3 };

template <typename Real>
using Ket4 = Eigen::Matrix<std::complex<Real>, 4, 1>;

template <typename Real>
using Matrix4c = Eigen::Matrix<std::complex<Real>, 4, 4>;

template <typename Real>
using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;

using Complex = std::complex<double>;
using Ket4d = Ket4<double>;
using Matrix4cd = Matrix4c<double>;
using Matrix2cd = Matrix2c<double>;

/// Raised when a value violates a documented invariant. `invariant()` names it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string invariant, const std::string& what)
      : std::invalid_argument(invariant + ": " + what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// One violated invariant of a parameter block, addressed by config field path.
struct Violation {
  std::string path;
  std::string message;
};

namespace bell {

// (|HV> + |VH>)/sqrt(2)
template <typename Real = double>
Ket4<Real> psi_plus() {
  const Real s = Real(1) / std::sqrt(Real(2));
  return Ket4<Real>(0, s, s, 0);
}

// (|HV> - |VH>)/sqrt(2)
template <typename Real = double>
Ket4<Real> psi_minus() {
  const Real s = Real(1) / std::sqrt(Real(2));
  return Ket4<Real>(0, s, -s, 0);
}

// (|HH> + |VV>)/sqrt(2)
template <typename Real = double>
Ket4<Real> phi_plus() {
  const Real s = Real(1) / std::sqrt(Real(2));
  return Ket4<Real>(s, 0, 0, s);
}

// (|HH> - |VV>)/sqrt(2)
template <typename Real = double>
Ket4<Real> phi_minus() {
  const Real s = Real(1) / std::sqrt(Real(2));
  return Ket4<Real>(s, 0, 0, -s);
}

}  // namespace bell

/// Kronecker product A (x) B of two single-photon operators, signal index major.
template <typename DerivedA, typename DerivedB>
Matrix4c<typename Eigen::NumTraits<typename DerivedA::Scalar>::Real> kron2(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Real = typename Eigen::NumTraits<typename DerivedA::Scalar>::Real;
  Matrix4c<Real> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

}  // namespace cpnli
