#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cpnli/interferometer.hpp"
#include "cpnli/source.hpp"
#include "cpnli/tomography.hpp"

namespace cpnli {

// Run configuration. Fields hold the values exactly as written in the
// document (units in the key names); the *_params() accessors convert to SI.

enum class Experiment { spectrum, concurrence_sweep, tomography, schmidt, case1, case2 };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

struct SourceConfig {
  double pump_wavelength_nm = 780.0;
  double crystal_length_m = 0.20;
  double emission_halfwidth_thz = 12.0;  // optical frequency detuning, grid spans +-this
  int grid_points = 16384;
  double amplitude_scale = 1.0;
  DispersionExpansion phase_mismatch = SpdcParams{}.phase_mismatch;

  SpdcParams params() const;
  bool operator==(const SourceConfig&) const = default;
};

struct ArmConfig {
  double length_m = 5.0;
  DispersionExpansion dispersion = LinearArm{}.dispersion;

  bool operator==(const ArmConfig&) const = default;
};

struct PcConfig {
  double theta_rad = 0.0;
  double phi1_rad = 0.0;
  double phi2_rad = 0.0;

  bool operator==(const PcConfig&) const = default;
};

struct DcmConfig {
  double dispersion_ps_per_nm = 707.0;
  double jitter_ps = 256.0;
  double center_wavelength_nm = 1560.0;

  DcmParams params() const;
  bool operator==(const DcmConfig&) const = default;
};

struct TomographyConfig {
  double brightness_per_s = 1e4;
  double time_per_projector_s = 10.0;
  std::uint64_t seed = 1;
  int resamples = 100;
  double background_per_s = 0.0;
  double band_nm = 60.0;
  double min_relative_weight = 1e-3;

  QstSettings settings() const;
  bool operator==(const TomographyConfig&) const = default;
};

struct RunConfig {
  Experiment experiment = Experiment::case1;
  std::string output_path = "out";
  SourceConfig source;
  ArmConfig arm;
  PcConfig pc;
  ImperfectionParams imperfections;
  DcmConfig dcm;
  TomographyConfig tomography;

  SpdcParams spdc_params() const { return source.params(); }
  LinearArm arm_params() const;
  PCUnitary pc_params() const { return PCUnitary(pc.theta_rad, pc.phi1_rad, pc.phi2_rad); }
  DcmParams dcm_params() const { return dcm.params(); }
  QstSettings qst_settings() const { return tomography.settings(); }

  bool operator==(const RunConfig&) const = default;
};

/// Malformed document: wrong type, unknown key, unknown experiment name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Missing keys take their defaults; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);

/// Every violated invariant with its field path; empty means runnable.
std::vector<Violation> validate(const RunConfig& config);

/// Imperfection values fitted by tools/scan_imperfections against the lab
/// concurrences of the decoupled (0.95) and coupled (0.10) configurations.
inline constexpr ImperfectionParams kLabImperfections{1.0, 0.04};

/// Named presets: case1, case2 (ideal), case1-lab, case2-lab (with kLabImperfections).
std::vector<std::string> preset_names();
RunConfig preset(std::string_view name);

}  // namespace cpnli
