#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cpnli/joint_state.hpp"
#include "cpnli/linalg.hpp"

namespace cpnli {

// ---------------------------------------------------------------------------
// Dispersion-compensating-module spectral binning

struct DcmParams {
  double dispersion = 707e-12 / 1e-9;  // s per m of wavelength (707 ps/nm)
  double jitter = 256e-12;             // s
  double center_wavelength = 1560e-9;  // m

  bool operator==(const DcmParams&) const = default;
};

std::vector<Violation> validate(const DcmParams& dcm, const std::string& prefix = "dcm");

/// jitter / dispersion, in m.
double bin_width_wavelength(const DcmParams& dcm);

/// c * dlambda / lambda^2 at the center wavelength, in Hz.
double bin_width_frequency(const DcmParams& dcm);

/// L/C band splitter edge: signal above, idler below.
inline constexpr double kBandSplitWavelength = 1564e-9;

struct WavelengthBin {
  long long index = 0;             // 0 is centered on the DCM center wavelength
  double center_wavelength = 0;    // m, signal-arm coordinate (omega_p/2 + detuning)
  double lower_wavelength = 0;     // m
  double upper_wavelength = 0;     // m
  std::size_t first = 0, last = 0; // grid bins [first, last)
  double signal_wavelength = 0;    // m, longer-wavelength photon of the central pair
  double idler_wavelength = 0;     // m
  bool split_ok = false;           // signal > 1564 nm and idler < 1564 nm
};

/// Wavelength of the photon at omega_p/2 + detuning.
double detuning_to_wavelength(double pump_frequency, double detuning);

/// Groups grid points into DCM-resolution wavelength bins, ordered by
/// increasing wavelength. Throws if the grid is too coarse for the bin width.
std::vector<WavelengthBin> wavelength_bins(const DcmParams& dcm, std::span<const double> detunings,
                                           double pump_frequency);

// ---------------------------------------------------------------------------
// Projective measurements

struct Projector {
  std::string label;  // e.g. "HD": signal analyzer H, idler analyzer D
  Matrix4cd matrix;
};

/// {H, V, D, R} x {H, V, D, R} product projectors with D = (H+V)/sqrt2, R = (H - iV)/sqrt2.
class ProjectorSet16 {
 public:
  static ProjectorSet16 standard();

  const std::array<Projector, 16>& projectors() const { return set_; }
  /// Column j is the analyzer ket of projector j (P_j = k_j k_j^dagger).
  const Eigen::Matrix<Complex, 4, 16>& kets() const { return kets_; }
  const Projector& operator[](std::size_t j) const { return set_[j]; }
  std::size_t index_of(const std::string& label) const;

  /// Row j holds Tr(P_j B_k) for the Pauli-product basis B_k = s_a (x) s_b.
  Eigen::Matrix<double, 16, 16> design_matrix() const;
  double condition_number() const;
  int design_rank() const;

 private:
  std::array<Projector, 16> set_;
  Eigen::Matrix<Complex, 4, 16> kets_;
};

using Rates16 = std::array<double, 16>;

/// rate_j = brightness Tr(P_j rho) + background
Rates16 expected_rates(const DensityMatrix& rho, double brightness, const ProjectorSet16& projectors,
                       double background = 0.0);

struct CountRecord {
  long long bin = 0;
  double acquisition_time = 0;  // s per projector
  std::uint64_t seed = 0;
  Rates16 rates{};
  std::array<std::int64_t, 16> counts{};

  std::int64_t total() const;
  std::array<double, 16> observations() const;
  bool operator==(const CountRecord&) const = default;
};

/// Poisson(rate_j * time) per projector from a generator seeded with `seed`.
CountRecord simulate_counts(const Rates16& rates, double acquisition_time, std::uint64_t seed, long long bin = 0);

/// Columnar text: bin,projector,rate_per_s,counts,time_s,seed
void write_counts(std::ostream& os, std::span<const CountRecord> records, const ProjectorSet16& projectors);
std::vector<CountRecord> read_counts(std::istream& is, const ProjectorSet16& projectors);

// ---------------------------------------------------------------------------
// Maximum-likelihood reconstruction

struct MleOptions {
  double gradient_tolerance = 1e-8;  // on the per-count log-likelihood
  int max_iterations = 10000;
};

struct MleResult {
  DensityMatrix rho;
  double log_likelihood = 0;  // sum_j n_j log mu_j - mu_j with the fitted total rate
  double gradient_norm = 0;
  int iterations = 0;
  bool converged = false;
};

/// Parameter vector (16 reals) of an upper-triangular T with real diagonal;
/// rho = T^dagger T / Tr(T^dagger T).
using CholeskyParams = Eigen::Matrix<double, 16, 1>;

Matrix4cd cholesky_factor(const CholeskyParams& x);
DensityMatrix cholesky_density(const CholeskyParams& x);

/// Negative per-count profile log-likelihood and its gradient in x.
double mle_objective(const CholeskyParams& x, std::span<const double, 16> counts, const ProjectorSet16& projectors,
                     CholeskyParams* gradient = nullptr);

/// Least-squares inversion of the counts with negative eigenvalues clipped,
/// mixed with `admixture` of I/4.
DensityMatrix linear_inversion(std::span<const double, 16> counts, const ProjectorSet16& projectors,
                               double admixture = 1e-3);

MleResult mle_reconstruct(std::span<const double, 16> counts, const ProjectorSet16& projectors,
                          const MleOptions& options = {});
MleResult mle_reconstruct(const CountRecord& record, const ProjectorSet16& projectors,
                          const MleOptions& options = {});

// ---------------------------------------------------------------------------
// Simulated tomography runs

struct QstSettings {
  double brightness = 1e4;         // counts/s at the analyzers
  double acquisition_time = 10.0;  // s per projector
  std::uint64_t seed = 1;
  int resamples = 100;
  double background = 0.0;          // counts/s per projector
  double band = 60e-9;              // m of signal wavelength around the DCM center; 0 keeps all bins
  double min_relative_weight = 1e-3;  // bins below this fraction of the peak bin are skipped

  bool operator==(const QstSettings&) const = default;
};

std::vector<Violation> validate(const QstSettings& settings, const std::string& prefix = "tomography");

struct StateEstimate {
  DensityMatrix truth;
  CountRecord record;
  MleResult estimate;
  double true_concurrence = 0;
  double concurrence = 0;
  double concurrence_error = 0;  // bootstrap standard error
  double fidelity = 0;
};

/// Simulate one 16-projector measurement of `truth` and reconstruct it, with a
/// parametric bootstrap over Poisson resamples of the observed counts.
StateEstimate tomograph(const DensityMatrix& truth, const QstSettings& settings, std::uint64_t seed,
                        const ProjectorSet16& projectors, long long bin = 0);

struct BinEstimate {
  WavelengthBin bin;
  StateEstimate state;
};

struct QstSweep {
  std::vector<BinEstimate> bins;
  std::vector<std::string> log;
};

QstSweep frequency_resolved_qst(const JointState& state, const DcmParams& dcm, const QstSettings& settings);

/// Frequency-traced polarization state, optionally restricted to pairs the
/// L/C band splitter separates (signal above, idler below the split edge).
DensityMatrix full_band_state(const JointState& state, bool band_split);

/// Tomography of the frequency-integrated state (no DCM).
StateEstimate full_band_qst(const JointState& state, const QstSettings& settings, bool band_split = true);

/// Grid bins whose conjugate pair is separated by the L/C band splitter.
std::vector<std::size_t> split_band_bins(const JointState& state);

}  // namespace cpnli
