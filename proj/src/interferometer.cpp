#include "cpnli/interferometer.hpp"

#include <algorithm>
#include <cmath>

#include "cpnli/measures.hpp"

namespace cpnli {

PCUnitary::PCUnitary(double theta, double phi1, double phi2) : theta_(theta), phi1_(phi1), phi2_(phi2) {
  const double c = std::cos(theta), s = std::sin(theta);
  u_(0, 0) = std::polar(c, phi1);
  u_(0, 1) = -std::polar(s, phi2);
  u_(1, 0) = std::polar(s, -phi2);
  u_(1, 1) = std::polar(c, -phi1);
}

double PCUnitary::unitarity_error() const {
  return max_abs(u_.adjoint() * u_ - Matrix2cd::Identity());
}

LinearArm make_arm(const SpdcParams& source, double length, const DispersionExpansion& dispersion) {
  LinearArm arm;
  arm.length = length;
  arm.dispersion = dispersion;
  arm.crystal_length = source.crystal_length;
  arm.crystal_phase_mismatch = source.phase_mismatch;
  return arm;
}

std::vector<Violation> validate(const LinearArm& arm, const std::string& prefix) {
  std::vector<Violation> out;
  if (!(arm.length > 0) || !std::isfinite(arm.length)) out.push_back({prefix + ".length_m", "must be > 0"});
  const auto& d = arm.dispersion;
  if (!std::isfinite(d.k0) || !std::isfinite(d.k1) || !std::isfinite(d.k2) || !std::isfinite(d.k3))
    out.push_back({prefix + ".dispersion", "coefficients must be finite"});
  return out;
}

std::vector<Violation> validate(const ImperfectionParams& imp, const std::string& prefix) {
  std::vector<Violation> out;
  if (!(imp.amplitude_ratio >= 0) || !std::isfinite(imp.amplitude_ratio))
    out.push_back({prefix + ".amplitude_ratio", "must be >= 0"});
  if (!std::isfinite(imp.theta_error)) out.push_back({prefix + ".theta_error_rad", "must be finite"});
  return out;
}

double alpha_phase(const LinearArm& arm, double detuning) {
  return arm.dispersion(detuning) * arm.length + arm.crystal_phase_mismatch(detuning) * arm.crystal_length;
}

double fringe_count(const LinearArm& arm, std::span<const double> grid) {
  if (grid.empty()) return 0.0;
  double lo = alpha_phase(arm, grid.front()), hi = lo;
  for (double w : grid) {
    const double a = alpha_phase(arm, w);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return (hi - lo) / std::numbers::pi;
}

JointState compose_nli(const JointState& src, const PCUnitary& pc, const LinearArm& arm,
                       const ImperfectionParams& imp) {
  const auto bad = validate(imp);
  if (!bad.empty()) throw ValidationError(bad.front().path, bad.front().message);
  const PCUnitary actual(pc.theta() + imp.theta_error, pc.phi1(), pc.phi2());
  const Matrix4cd u2 = actual.two_photon();
  const auto grid = src.detunings();
  JointState::Amplitudes out(4, static_cast<Eigen::Index>(src.size()));
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const Ket4d k = src.amplitudes().col(col);
    const Complex relative = std::polar(imp.amplitude_ratio, 2.0 * alpha_phase(arm, grid[i]));
    out.col(col) = u2 * k + relative * k;
  }
  return JointState({grid.begin(), grid.end()}, std::move(out), src.pump_frequency());
}

std::vector<SpectralSample> spectral_intensity(const JointState& state) {
  const Eigen::VectorXd w = state.bin_intensity();
  std::vector<SpectralSample> out(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) out[i] = {state.detunings()[i], w(static_cast<Eigen::Index>(i))};
  return out;
}

std::vector<SpectralSample> concurrence_spectrum(const JointState& state, double min_relative_weight) {
  const Eigen::VectorXd w = state.bin_intensity();
  const double cut = min_relative_weight * w.maxCoeff();
  std::vector<SpectralSample> out;
  out.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double wi = w(static_cast<Eigen::Index>(i));
    if (!(wi > 0) || wi <= cut) continue;
    out.push_back({state.detunings()[i], concurrence(conditional_density(state, i))});
  }
  return out;
}

double fringe_visibility(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double sum = *hi + *lo;
  return sum > 0 ? (*hi - *lo) / sum : 0.0;
}

}  // namespace cpnli
