#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "cpnli/joint_state.hpp"

namespace cpnli {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Taylor expansion of a phase-mismatch function about degeneracy:
/// dk(W) = k0 + k1 W + k2 W^2 / 2 + k3 W^3 / 6.
struct DispersionExpansion {
  double k0 = 0;  // rad/m
  double k1 = 0;  // s/m
  double k2 = 0;  // s^2/m
  double k3 = 0;  // s^3/m

  double operator()(double detuning) const {
    const double w = detuning;
    return k0 + w * (k1 + w * (k2 / 2.0 + w * k3 / 6.0));
  }
  bool operator==(const DispersionExpansion&) const = default;
};

inline double phase_mismatch(const DispersionExpansion& model, double detuning) { return model(detuning); }

/// Type-II SPDC in a periodically poled fiber pumped by a CW laser.
struct SpdcParams {
  double pump_wavelength = 780e-9;  // m
  double crystal_length = 0.20;     // m
  // Default quadratic coefficient puts the sinc^2 half-maximum near +-34 nm
  // around 1560 nm.
  DispersionExpansion phase_mismatch{0.0, 0.0, 4.0e-26, 0.0};
  double emission_halfwidth = 2.0 * std::numbers::pi * 12e12;  // rad/s, grid spans +-this
  int grid_points = 16384;
  Complex amplitude_scale{1.0, 0.0};

  bool operator==(const SpdcParams&) const = default;
};

std::vector<Violation> validate(const SpdcParams& params, const std::string& prefix = "source");

double pump_angular_frequency(const SpdcParams& params);

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// phi(W) = A0 L sinc(dk(W) L / 2). Throws std::out_of_range outside the emission band.
Complex joint_amplitude(const SpdcParams& params, double detuning);

/// Uniform detuning grid over [-halfwidth, +halfwidth].
std::vector<double> detuning_grid(const SpdcParams& params);

/// Every bin holds phi(W) |Psi+>.
JointState spdc_state(const SpdcParams& params);
JointState spdc_state(const SpdcParams& params, std::vector<double> grid);

}  // namespace cpnli
