#include "cpnli/joint_state.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace cpnli {

Eigen::VectorXd trapezoid_weights(std::span<const double> grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd w(n);
  if (n == 1) {
    w(0) = 1.0;
    return w;
  }
  w(0) = 0.5 * (grid[1] - grid[0]);
  w(n - 1) = 0.5 * (grid[n - 1] - grid[n - 2]);
  for (Eigen::Index i = 1; i + 1 < n; ++i) w(i) = 0.5 * (grid[i + 1] - grid[i - 1]);
  return w;
}

JointState::JointState(std::vector<double> detunings, Amplitudes amplitudes, double pump_frequency)
    : detunings_(std::move(detunings)), amplitudes_(std::move(amplitudes)), pump_frequency_(pump_frequency) {
  if (detunings_.empty()) throw ValidationError("non-empty-grid", "joint state needs at least one bin");
  if (static_cast<Eigen::Index>(detunings_.size()) != amplitudes_.cols())
    throw ValidationError("grid-shape", "amplitude columns must match the number of detunings");
  for (std::size_t i = 0; i < detunings_.size(); ++i) {
    if (!std::isfinite(detunings_[i])) throw ValidationError("finite", "non-finite detuning");
    if (i > 0 && !(detunings_[i] > detunings_[i - 1]))
      throw ValidationError("strictly-increasing-grid", "detunings must be strictly increasing");
  }
  if (!amplitudes_.allFinite()) throw ValidationError("finite", "non-finite amplitude");
  if (!(pump_frequency_ > 0) || !std::isfinite(pump_frequency_))
    throw ValidationError("pump-frequency", "pump frequency must be positive");
  quadrature_ = trapezoid_weights(detunings_);
}

Eigen::VectorXd JointState::bin_intensity() const {
  return amplitudes_.colwise().squaredNorm().transpose();
}

double JointState::total_weight() const {
  return bin_intensity().dot(quadrature_);
}

SchmidtResult schmidt_decompose(const JointState& state, double threshold) {
  if (state.size() < 2) throw ValidationError("grid-size", "Schmidt decomposition needs at least two bins");
  const double total = state.total_weight();
  if (!(total > 0)) throw ValidationError("positive-weight", "state has zero total weight");

  const Eigen::VectorXd sqrt_w = state.quadrature_weights().cwiseSqrt();
  const Eigen::MatrixXcd m = state.amplitudes() * sqrt_w.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const auto& s = svd.singularValues();
  const double scale = s.norm();
  const Eigen::Index modes = s.size();

  SchmidtResult out;
  out.scale = scale;
  out.coefficients = s / scale;
  out.freq_modes.resize(static_cast<Eigen::Index>(state.size()), modes);
  for (Eigen::Index k = 0; k < modes; ++k) {
    Ket4d u = svd.matrixU().col(k);
    // first non-negligible component real-positive
    Complex phase(1.0, 0.0);
    for (int p = 0; p < 4; ++p) {
      if (std::abs(u(p)) > 1e-12) {
        phase = std::conj(u(p)) / std::abs(u(p));
        break;
      }
    }
    u *= phase;
    out.pol_vectors.push_back(u);
    // M = U S V^dagger, so chi_k(i) = conj(V(i,k)) / sqrt(w_i), compensating the phase on u
    out.freq_modes.col(k) = (svd.matrixV().col(k).conjugate().array() / sqrt_w.array()) / phase;
    if (out.coefficients(k) * out.coefficients(k) > threshold) ++out.rank;
  }
  return out;
}

JointState::Amplitudes reconstruct(const SchmidtResult& schmidt) {
  JointState::Amplitudes out = JointState::Amplitudes::Zero(4, schmidt.freq_modes.rows());
  for (Eigen::Index k = 0; k < schmidt.coefficients.size(); ++k) {
    out += schmidt.scale * schmidt.coefficients(k) * schmidt.pol_vectors[static_cast<std::size_t>(k)] *
           schmidt.freq_modes.col(k).transpose();
  }
  return out;
}

DensityMatrix conditional_density(const JointState& state, std::size_t bin) {
  if (bin >= state.size()) throw std::out_of_range("bin index " + std::to_string(bin) + " outside grid");
  const Ket4d k = state.ket(bin);
  if (!(k.squaredNorm() > 0))
    throw ValidationError("positive-bin-weight",
                          "bin " + std::to_string(bin) + " carries no amplitude; skip it");
  return DensityMatrix::from_ket(k);
}

DensityMatrix trace_out_frequency(const JointState& state) {
  return trace_out_frequency(state, 0, state.size());
}

DensityMatrix trace_out_frequency(const JointState& state, std::size_t first, std::size_t last) {
  if (first >= last || last > state.size()) throw std::out_of_range("invalid bin range");
  const auto& w = state.quadrature_weights();
  Matrix4cd acc = Matrix4cd::Zero();
  for (std::size_t i = first; i < last; ++i) {
    const Ket4d k = state.ket(i);
    acc.noalias() += w(static_cast<Eigen::Index>(i)) * (k * k.adjoint());
  }
  const double tr = acc.trace().real();
  if (!(tr > 0)) throw ValidationError("positive-weight", "state has zero weight over the requested bins");
  // A sum of rank-one terms is PSD; only roundoff needs symmetrizing.
  return DensityMatrix::from_unnormalized(acc);
}

}  // namespace cpnli
