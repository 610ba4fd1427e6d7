#include "cpnli/source.hpp"

#include <cmath>
#include <stdexcept>

namespace cpnli {

namespace {

bool finite(const DispersionExpansion& d) {
  return std::isfinite(d.k0) && std::isfinite(d.k1) && std::isfinite(d.k2) && std::isfinite(d.k3);
}

}  // namespace

std::vector<Violation> validate(const SpdcParams& p, const std::string& prefix) {
  std::vector<Violation> out;
  if (!(p.pump_wavelength > 0) || !std::isfinite(p.pump_wavelength))
    out.push_back({prefix + ".pump_wavelength_nm", "must be > 0"});
  if (!(p.crystal_length > 0) || !std::isfinite(p.crystal_length))
    out.push_back({prefix + ".crystal_length_m", "must be > 0"});
  if (!(p.emission_halfwidth > 0) || !std::isfinite(p.emission_halfwidth))
    out.push_back({prefix + ".emission_halfwidth_thz", "must be > 0"});
  if (p.grid_points < 16) out.push_back({prefix + ".grid_points", "must be >= 16"});
  if (!finite(p.phase_mismatch)) out.push_back({prefix + ".phase_mismatch", "coefficients must be finite"});
  if (!std::isfinite(std::abs(p.amplitude_scale)) || std::abs(p.amplitude_scale) == 0.0)
    out.push_back({prefix + ".amplitude_scale", "must be finite and nonzero"});
  return out;
}

double pump_angular_frequency(const SpdcParams& params) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / params.pump_wavelength;
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

Complex joint_amplitude(const SpdcParams& params, double detuning) {
  if (std::abs(detuning) > params.emission_halfwidth * (1.0 + 1e-12))
    throw std::out_of_range("detuning outside the emission band");
  const double dk = params.phase_mismatch(detuning);
  return params.amplitude_scale * params.crystal_length * sinc(dk * params.crystal_length / 2.0);
}

std::vector<double> detuning_grid(const SpdcParams& params) {
  const auto n = static_cast<std::size_t>(params.grid_points);
  std::vector<double> grid(n);
  const double step = 2.0 * params.emission_halfwidth / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = -params.emission_halfwidth + step * static_cast<double>(i);
  grid.back() = params.emission_halfwidth;
  return grid;
}

JointState spdc_state(const SpdcParams& params) {
  const auto bad = validate(params);
  if (!bad.empty()) throw ValidationError(bad.front().path, bad.front().message);
  return spdc_state(params, detuning_grid(params));
}

JointState spdc_state(const SpdcParams& params, std::vector<double> grid) {
  const Ket4d psi = bell::psi_plus();
  JointState::Amplitudes amps(4, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    amps.col(static_cast<Eigen::Index>(i)) = joint_amplitude(params, grid[i]) * psi;
  return JointState(std::move(grid), std::move(amps), pump_angular_frequency(params));
}

}  // namespace cpnli
