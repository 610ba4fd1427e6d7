#pragma once

#include <span>
#include <vector>

#include "cpnli/joint_state.hpp"
#include "cpnli/source.hpp"

namespace cpnli {

/// Polarization-controller rotation
///   [[ e^{i phi1} cos t, -e^{i phi2} sin t ],
///    [ e^{-i phi2} sin t,  e^{-i phi1} cos t ]]
class PCUnitary {
 public:
  explicit PCUnitary(double theta = 0.0, double phi1 = 0.0, double phi2 = 0.0);

  double theta() const { return theta_; }
  double phi1() const { return phi1_; }
  double phi2() const { return phi2_; }
  const Matrix2cd& matrix() const { return u_; }

  /// U (x) U acting on both photons.
  Matrix4cd two_photon() const { return kron2(u_, u_); }

  /// max |U^dagger U - I|
  double unitarity_error() const;

 private:
  double theta_, phi1_, phi2_;
  Matrix2cd u_;
};

inline PCUnitary pc_unitary(double theta, double phi1 = 0.0, double phi2 = 0.0) { return PCUnitary(theta, phi1, phi2); }

/// Dispersive linear medium between the two generation passes, together with
/// the nonlinear medium's own mismatch, which both enter the relative phase.
struct LinearArm {
  double length = 5.0;  // m
  // SMF-28 near 1560 nm: beta2 = -21.7 ps^2/km, and for conjugate pairs
  // dk0(W) = const - beta2 W^2, i.e. k2 = -2 beta2.
  DispersionExpansion dispersion{0.0, 0.0, 4.34e-26, 0.0};
  double crystal_length = 0.20;  // m
  DispersionExpansion crystal_phase_mismatch{0.0, 0.0, 4.0e-26, 0.0};

  bool operator==(const LinearArm&) const = default;
};

/// Arm whose nonlinear contribution matches the given source.
LinearArm make_arm(const SpdcParams& source, double length, const DispersionExpansion& dispersion);

std::vector<Violation> validate(const LinearArm& arm, const std::string& prefix = "arm");

struct ImperfectionParams {
  double amplitude_ratio = 1.0;  // relative weight of the untransformed amplitude
  double theta_error = 0.0;      // rad, added to the PC angle

  bool operator==(const ImperfectionParams&) const = default;
};

std::vector<Violation> validate(const ImperfectionParams& imp, const std::string& prefix = "imperfections");

/// alpha(W) = dk0(W) L0 + dk(W) L
double alpha_phase(const LinearArm& arm, double detuning);

/// Number of cos^2(alpha) fringe periods across the grid, (alpha_max - alpha_min) / pi.
double fringe_count(const LinearArm& arm, std::span<const double> grid);

/// Per bin: (U (x) U) k + r e^{2 i alpha} k, where U includes the angle error.
/// The transformed (round-trip) amplitude is the reference; the relative
/// phase rides on the untransformed amplitude.
JointState compose_nli(const JointState& src, const PCUnitary& pc, const LinearArm& arm,
                       const ImperfectionParams& imp = {});

struct SpectralSample {
  double detuning;  // rad/s
  double value;
};

std::vector<SpectralSample> spectral_intensity(const JointState& state);

/// Concurrence of each bin's conditional state. Bins whose intensity is zero,
/// or at most `min_relative_weight` times the peak, are skipped.
std::vector<SpectralSample> concurrence_spectrum(const JointState& state, double min_relative_weight = 0.0);

/// (max - min) / (max + min)
double fringe_visibility(std::span<const double> values);

}  // namespace cpnli
