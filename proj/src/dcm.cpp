#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cpnli/source.hpp"
#include "cpnli/tomography.hpp"

namespace cpnli {

std::vector<Violation> validate(const DcmParams& dcm, const std::string& prefix) {
  std::vector<Violation> out;
  if (!(dcm.dispersion > 0) || !std::isfinite(dcm.dispersion))
    out.push_back({prefix + ".dispersion_ps_per_nm", "must be > 0"});
  if (!(dcm.jitter > 0) || !std::isfinite(dcm.jitter)) out.push_back({prefix + ".jitter_ps", "must be > 0"});
  if (!(dcm.center_wavelength > 0) || !std::isfinite(dcm.center_wavelength))
    out.push_back({prefix + ".center_wavelength_nm", "must be > 0"});
  return out;
}

double bin_width_wavelength(const DcmParams& dcm) { return dcm.jitter / dcm.dispersion; }

double bin_width_frequency(const DcmParams& dcm) {
  return kSpeedOfLight * bin_width_wavelength(dcm) / (dcm.center_wavelength * dcm.center_wavelength);
}

double detuning_to_wavelength(double pump_frequency, double detuning) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / (pump_frequency / 2.0 + detuning);
}

namespace {

double wavelength_to_detuning(double pump_frequency, double wavelength) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength - pump_frequency / 2.0;
}

void label_pair(WavelengthBin& bin, double pump_frequency) {
  const double w = wavelength_to_detuning(pump_frequency, bin.center_wavelength);
  const double a = detuning_to_wavelength(pump_frequency, w);
  const double b = detuning_to_wavelength(pump_frequency, -w);
  bin.signal_wavelength = std::max(a, b);
  bin.idler_wavelength = std::min(a, b);
  bin.split_ok = bin.signal_wavelength > kBandSplitWavelength && bin.idler_wavelength < kBandSplitWavelength;
}

}  // namespace

std::vector<WavelengthBin> wavelength_bins(const DcmParams& dcm, std::span<const double> detunings,
                                           double pump_frequency) {
  const auto bad = validate(dcm);
  if (!bad.empty()) throw ValidationError(bad.front().path, bad.front().message);
  if (detunings.empty()) return {};

  const double width = bin_width_wavelength(dcm);
  std::vector<double> lambda(detunings.size());
  for (std::size_t i = 0; i < detunings.size(); ++i) lambda[i] = detuning_to_wavelength(pump_frequency, detunings[i]);

  double coarsest = 0;
  for (std::size_t i = 1; i < lambda.size(); ++i) coarsest = std::max(coarsest, std::abs(lambda[i] - lambda[i - 1]));
  if (coarsest > width) {
    std::ostringstream os;
    os << "grid spacing " << coarsest * 1e9 << " nm exceeds the DCM bin width " << width * 1e9
       << " nm; use a denser detuning grid";
    throw ValidationError("grid-resolution", os.str());
  }

  auto index_of = [&](double l) { return static_cast<long long>(std::floor((l - dcm.center_wavelength) / width + 0.5)); };

  std::vector<WavelengthBin> bins;
  std::size_t start = 0;
  long long current = index_of(lambda[0]);
  auto close = [&](std::size_t end) {
    WavelengthBin b;
    b.index = current;
    b.center_wavelength = dcm.center_wavelength + static_cast<double>(current) * width;
    b.lower_wavelength = b.center_wavelength - width / 2.0;
    b.upper_wavelength = b.center_wavelength + width / 2.0;
    b.first = start;
    b.last = end;
    label_pair(b, pump_frequency);
    bins.push_back(b);
  };
  for (std::size_t i = 1; i < lambda.size(); ++i) {
    const long long j = index_of(lambda[i]);
    if (j != current) {
      close(i);
      start = i;
      current = j;
    }
  }
  close(lambda.size());
  // Detuning increases along the grid, so wavelength decreases.
  std::reverse(bins.begin(), bins.end());
  return bins;
}

std::vector<std::size_t> split_band_bins(const JointState& state) {
  std::vector<std::size_t> out;
  const auto grid = state.detunings();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = detuning_to_wavelength(state.pump_frequency(), grid[i]);
    const double b = detuning_to_wavelength(state.pump_frequency(), -grid[i]);
    if (std::max(a, b) > kBandSplitWavelength && std::min(a, b) < kBandSplitWavelength) out.push_back(i);
  }
  return out;
}

}  // namespace cpnli
