#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpnli/config.hpp"

namespace cpnli {

std::string_view version();

/// Columnar data: one header line of unit-suffixed column names, then one
/// comma-separated row per sample. Numbers use the shortest text that reads
/// back to the same double; skipped values are written as `nan`.
struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  std::size_t column(const std::string& name) const;
  bool operator==(const DataTable&) const = default;
};

void write_table(std::ostream& os, const DataTable& table);

/// Rejects an empty header, duplicate or blank column names, and rows whose
/// width differs from the header or that hold non-numeric fields.
DataTable read_table(std::istream& is);

/// Column layouts shared with the plotting front-end.
namespace columns {
inline const std::vector<std::string> spectrum{"detuning_THz", "signal_wavelength_nm", "source_intensity",
                                               "output_intensity"};
inline const std::vector<std::string> concurrence_sweep{"detuning_THz", "signal_wavelength_nm", "intensity",
                                                        "concurrence"};
inline const std::vector<std::string> case_spectrum{"detuning_THz", "signal_wavelength_nm", "source_intensity",
                                                    "output_intensity", "concurrence"};
inline const std::vector<std::string> tomography_bins{"bin",           "center_wavelength_nm", "signal_wavelength_nm",
                                                      "idler_wavelength_nm", "concurrence_true", "concurrence",
                                                      "concurrence_err",     "fidelity",           "purity"};
inline const std::vector<std::string> density_elements{"bin", "row", "col", "real", "imag"};
}  // namespace columns

struct RunOutput {
  std::string stem;      // file-name prefix, the experiment name
  DataTable data;        // <stem>.csv
  nlohmann::json summary;  // <stem>.summary.json
  std::string counts;    // <stem>.counts.csv, tomography only
  DataTable matrices;    // <stem>.matrices.csv, tomography only
};

/// Runs the configured experiment. Throws ValidationError on invalid input.
RunOutput execute(const RunConfig& config);

/// Writes every file to a temporary name first and renames once all writes
/// have succeeded. On failure the temporaries and any file already renamed by
/// this call are removed. Returns the final paths.
std::vector<std::filesystem::path> write_outputs(const RunOutput& output, const std::filesystem::path& dir);

}  // namespace cpnli
