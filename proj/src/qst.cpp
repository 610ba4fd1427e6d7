#include <cmath>
#include <sstream>

#include "cpnli/measures.hpp"
#include "cpnli/seed.hpp"
#include "cpnli/tomography.hpp"

namespace cpnli {

namespace {

// Resamples only feed a spread estimate; a looser stop keeps them cheap.
constexpr MleOptions kBootstrapMle{1e-6, 10000};

}  // namespace

std::vector<Violation> validate(const QstSettings& s, const std::string& prefix) {
  std::vector<Violation> out;
  if (!(s.brightness > 0) || !std::isfinite(s.brightness))
    out.push_back({prefix + ".brightness_per_s", "must be > 0"});
  if (!(s.acquisition_time > 0) || !std::isfinite(s.acquisition_time))
    out.push_back({prefix + ".time_per_projector_s", "must be > 0"});
  if (s.resamples < 0) out.push_back({prefix + ".resamples", "must be >= 0"});
  if (!(s.background >= 0) || !std::isfinite(s.background))
    out.push_back({prefix + ".background_per_s", "must be >= 0"});
  if (!(s.band >= 0) || !std::isfinite(s.band)) out.push_back({prefix + ".band_nm", "must be >= 0"});
  if (!(s.min_relative_weight >= 0) || !(s.min_relative_weight < 1))
    out.push_back({prefix + ".min_relative_weight", "must be in [0, 1)"});
  return out;
}

StateEstimate tomograph(const DensityMatrix& truth, const QstSettings& settings, std::uint64_t seed,
                        const ProjectorSet16& projectors, long long bin) {
  StateEstimate out;
  out.truth = truth;
  const Rates16 rates = expected_rates(truth, settings.brightness, projectors, settings.background);
  out.record = simulate_counts(rates, settings.acquisition_time, seed, bin);
  out.estimate = mle_reconstruct(out.record, projectors);
  out.true_concurrence = concurrence(truth);
  out.concurrence = concurrence(out.estimate.rho);
  out.fidelity = fidelity(truth, out.estimate.rho);

  // Parametric bootstrap: Poisson resamples around the observed counts.
  Rates16 observed;
  for (std::size_t j = 0; j < 16; ++j) observed[j] = static_cast<double>(out.record.counts[j]);
  double sum = 0, sum2 = 0;
  int used = 0;
  for (int b = 0; b < settings.resamples; ++b) {
    const CountRecord resample = simulate_counts(observed, 1.0, derive_seed(seed, 1 + static_cast<std::uint64_t>(b)), bin);
    if (resample.total() == 0) continue;
    const double c = concurrence(mle_reconstruct(resample, projectors, kBootstrapMle).rho);
    sum += c;
    sum2 += c * c;
    ++used;
  }
  if (used > 1) {
    const double mean = sum / used;
    out.concurrence_error = std::sqrt(std::max(0.0, (sum2 - used * mean * mean) / (used - 1)));
  }
  return out;
}

QstSweep frequency_resolved_qst(const JointState& state, const DcmParams& dcm, const QstSettings& settings) {
  const auto bad = validate(settings);
  if (!bad.empty()) throw ValidationError(bad.front().path, bad.front().message);

  const auto projectors = ProjectorSet16::standard();
  const auto bins = wavelength_bins(dcm, state.detunings(), state.pump_frequency());
  const Eigen::VectorXd intensity = state.bin_intensity().cwiseProduct(state.quadrature_weights());

  std::vector<double> weight(bins.size());
  double peak = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    weight[b] = intensity.segment(static_cast<Eigen::Index>(bins[b].first),
                                  static_cast<Eigen::Index>(bins[b].last - bins[b].first))
                    .sum();
    peak = std::max(peak, weight[b]);
  }

  QstSweep sweep;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const auto& bin = bins[b];
    if (settings.band > 0 && std::abs(bin.center_wavelength - dcm.center_wavelength) > settings.band / 2.0) continue;
    if (!(weight[b] > settings.min_relative_weight * peak) || !(weight[b] > 0)) {
      std::ostringstream os;
      os << "bin " << bin.index << " (" << bin.center_wavelength * 1e9 << " nm) skipped: relative weight "
         << (peak > 0 ? weight[b] / peak : 0.0);
      sweep.log.push_back(os.str());
      continue;
    }
    const DensityMatrix truth = trace_out_frequency(state, bin.first, bin.last);
    const std::uint64_t seed = derive_seed(settings.seed, bin_stream(bin.index));
    sweep.bins.push_back({bin, tomograph(truth, settings, seed, projectors, bin.index)});
  }
  return sweep;
}

DensityMatrix full_band_state(const JointState& state, bool band_split) {
  if (!band_split) return trace_out_frequency(state);
  const auto keep = split_band_bins(state);
  const auto& w = state.quadrature_weights();
  Matrix4cd acc = Matrix4cd::Zero();
  for (std::size_t i : keep) {
    const Ket4d k = state.ket(i);
    acc.noalias() += w(static_cast<Eigen::Index>(i)) * (k * k.adjoint());
  }
  if (!(acc.trace().real() > 0))
    throw ValidationError("positive-weight", "no amplitude in the band-split spectral range");
  return DensityMatrix::from_unnormalized(acc);
}

StateEstimate full_band_qst(const JointState& state, const QstSettings& settings, bool band_split) {
  const auto bad = validate(settings);
  if (!bad.empty()) throw ValidationError(bad.front().path, bad.front().message);
  return tomograph(full_band_state(state, band_split), settings, derive_seed(settings.seed, kFullBandStream),
                   ProjectorSet16::standard());
}

}  // namespace cpnli
