#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cpnli/density_matrix.hpp"
#include "cpnli/types.hpp"

namespace cpnli {

/// Biphoton amplitude sampled on a detuning grid. Column i holds the
/// (HH, HV, VH, VV) amplitudes of the conjugate pair
/// (omega_p/2 + detuning[i], omega_p/2 - detuning[i]); amplitudes are not
/// normalized and carry the spectral weight.
class JointState {
 public:
  using Amplitudes = Eigen::Matrix<Complex, 4, Eigen::Dynamic>;

  JointState(std::vector<double> detunings, Amplitudes amplitudes, double pump_frequency);

  std::size_t size() const { return detunings_.size(); }
  std::span<const double> detunings() const { return detunings_; }
  const Amplitudes& amplitudes() const { return amplitudes_; }
  Ket4d ket(std::size_t bin) const { return amplitudes_.col(static_cast<Eigen::Index>(bin)); }
  double pump_frequency() const { return pump_frequency_; }

  /// Trapezoidal quadrature weights of the grid (1 for a single bin).
  const Eigen::VectorXd& quadrature_weights() const { return quadrature_; }

  /// Sum over polarizations of |c|^2, per bin, without quadrature weights.
  Eigen::VectorXd bin_intensity() const;

  /// Integrated weight sum_i w_i sum_pol |c_i|^2.
  double total_weight() const;

 private:
  std::vector<double> detunings_;
  Amplitudes amplitudes_;
  double pump_frequency_;
  Eigen::VectorXd quadrature_;
};

Eigen::VectorXd trapezoid_weights(std::span<const double> grid);

/// Polarization (x) frequency Schmidt decomposition.
struct SchmidtResult {
  Eigen::VectorXd coefficients;                       // descending, sum of squares = 1
  std::vector<Ket4d> pol_vectors;                     // orthonormal
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> freq_modes;  // bins x modes, grid-orthonormal
  int rank = 0;                                       // coefficients with c^2 > threshold
  double scale = 0;                                   // sqrt(total weight)
};

constexpr double kDefaultSchmidtThreshold = 1e-6;

SchmidtResult schmidt_decompose(const JointState& state, double threshold = kDefaultSchmidtThreshold);

/// Rebuilds the 4 x N amplitude matrix from a decomposition.
JointState::Amplitudes reconstruct(const SchmidtResult& schmidt);

/// Normalized |ket><ket| of one grid bin.
DensityMatrix conditional_density(const JointState& state, std::size_t bin);

/// Frequency-traced polarization state sum_i w_i |k_i><k_i| / sum_i w_i <k_i|k_i>.
DensityMatrix trace_out_frequency(const JointState& state);

/// Same, restricted to bins [first, last).
DensityMatrix trace_out_frequency(const JointState& state, std::size_t first, std::size_t last);

}  // namespace cpnli
