#pragma once

// Independent reference computations for the unit and acceptance tests. They
// use textbook formulas rather than the library's factor-based routines.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "cpnli/interferometer.hpp"
#include "cpnli/source.hpp"
#include "cpnli/types.hpp"

namespace oracle {

using cpnli::Complex;
using cpnli::Matrix2cd;
using cpnli::Matrix4cd;

// Wootters: sqrt of the eigenvalues of rho (Y rho* Y), Y = sigma_y (x) sigma_y.
inline double concurrence(const Matrix4cd& rho) {
  Matrix4cd y = Matrix4cd::Zero();
  y(0, 3) = -1;
  y(1, 2) = 1;
  y(2, 1) = 1;
  y(3, 0) = -1;
  const Matrix4cd r = rho * y * rho.conjugate() * y;
  Eigen::ComplexEigenSolver<Matrix4cd> es(r);
  std::array<double, 4> l;
  for (int k = 0; k < 4; ++k) l[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, es.eigenvalues()(k).real()));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

inline Matrix4cd hermitian_sqrt(const Matrix4cd& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(m);
  const Eigen::Vector4d d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

// Uhlmann: (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
inline double fidelity(const Matrix4cd& rho, const Matrix4cd& sigma) {
  const Matrix4cd s = hermitian_sqrt(rho);
  const double t = hermitian_sqrt(s * sigma * s).trace().real();
  return t * t;
}

// Per-pair density matrix of the coupled configuration with rho0 = e^{2 i alpha}.
inline Matrix4cd case2_pair(double alpha) {
  const Complex r0 = std::polar(1.0, 2.0 * alpha);
  const Complex rc = std::conj(r0);
  Matrix4cd m;
  m << 1.0, -rc, -rc, -1.0,  //
      -r0, 1.0, 1.0, r0,     //
      -r0, 1.0, 1.0, r0,     //
      -1.0, rc, rc, 1.0;
  return m / 4.0;
}

// Frequency-traced state of the coupled configuration when the relative phase
// averages out: (|Psi+><Psi+| + |Phi-><Phi-|) / 2.
inline Matrix4cd case2_mixed() {
  Matrix4cd m;
  m << 1, 0, 0, -1,  //
      0, 1, 1, 0,    //
      0, 1, 1, 0,    //
      -1, 0, 0, 1;
  return m / 4.0;
}

inline Matrix4cd case1_pair() {
  Matrix4cd m = Matrix4cd::Zero();
  m(1, 1) = m(1, 2) = m(2, 1) = m(2, 2) = 0.5;
  return m;
}

inline Matrix4cd kron(const Matrix2cd& a, const Matrix2cd& b) {
  Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
template <int N>
Eigen::Matrix<Complex, N, N> random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix<Complex, N, N> z;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::Matrix<Complex, N, N>> qr(z);
  Eigen::Matrix<Complex, N, N> q = qr.householderQ();
  const auto r = qr.matrixQR();
  for (int j = 0; j < N; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

// Random full-rank or low-rank state: G G^dagger / Tr with G 4 x rank Gaussian.
inline Matrix4cd random_density(std::mt19937_64& rng, int rank = 4) {
  std::normal_distribution<double> g;
  Eigen::Matrix<Complex, 4, Eigen::Dynamic> m(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < rank; ++j) m(i, j) = Complex(g(rng), g(rng));
  Matrix4cd rho = m * m.adjoint();
  return rho / rho.trace().real();
}

// Source with a grid small enough for fast tests but dense enough for the
// default DCM bins.
inline cpnli::SpdcParams small_source(int points = 4096) {
  cpnli::SpdcParams p;
  p.grid_points = points;
  return p;
}

}  // namespace oracle
