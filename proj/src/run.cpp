#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <system_error>

#include "cpnli/interferometer.hpp"
#include "cpnli/measures.hpp"
#include "cpnli/run.hpp"

#ifndef CPNLI_VERSION
#define CPNLI_VERSION "0.0.0"
#endif

namespace cpnli {

using nlohmann::json;

std::string_view version() { return CPNLI_VERSION; }

// ---------------------------------------------------------------------------
// Columnar files

void DataTable::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match the header");
  rows.push_back(std::move(row));
}

std::size_t DataTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return j;
  throw std::out_of_range("no column '" + name + "'");
}

namespace {

void put_number(std::ostream& os, double x) {
  if (std::isnan(x)) {
    os << "nan";
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  os.write(buf, res.ptr - buf);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void write_table(std::ostream& os, const DataTable& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j) os << (j ? "," : "") << table.columns[j];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << ',';
      put_number(os, row[j]);
    }
    os << '\n';
  }
}

DataTable read_table(std::istream& is) {
  DataTable t;
  std::string line;
  if (!std::getline(is, line) || line.empty()) throw std::runtime_error("data file: missing header");
  t.columns = split(line);
  std::set<std::string> names;
  for (const auto& c : t.columns)
    if (c.empty() || !names.insert(c).second) throw std::runtime_error("data file: bad column name '" + c + "'");

  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != t.columns.size())
      throw std::runtime_error("data file: row " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                               " fields, header has " + std::to_string(t.columns.size()));
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (fields[j] == "nan") {
        row[j] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const char* first = fields[j].data();
      const char* last = first + fields[j].size();
      const auto res = std::from_chars(first, last, row[j]);
      if (res.ec != std::errc() || res.ptr != last)
        throw std::runtime_error("data file: row " + std::to_string(lineno) + " column '" + t.columns[j] +
                                 "' is not a number");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

constexpr double kTHz = 2.0 * std::numbers::pi * 1e12;  // rad/s per THz of optical frequency

json matrix_json(const Matrix4cd& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < 4; ++r) {
    json rr = json::array(), ii = json::array();
    for (int c = 0; c < 4; ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"real", re}, {"imag", im}};
}

json reduced_json(const DensityMatrix& rho) {
  return {{"concurrence", concurrence(rho)}, {"purity", purity(rho)}, {"matrix", matrix_json(rho.matrix())}};
}

json estimate_json(const StateEstimate& e) {
  json counts = json::array();
  for (auto c : e.record.counts) counts.push_back(c);
  return {{"true_concurrence", e.true_concurrence},
          {"concurrence", e.concurrence},
          {"concurrence_err", e.concurrence_error},
          {"fidelity", e.fidelity},
          {"purity", purity(e.estimate.rho)},
          {"log_likelihood", e.estimate.log_likelihood},
          {"mle_iterations", e.estimate.iterations},
          {"mle_converged", e.estimate.converged},
          {"seed", e.record.seed},
          {"counts", counts},
          {"matrix", matrix_json(e.estimate.rho.matrix())}};
}

json schmidt_json(const SchmidtResult& s) {
  json coeffs = json::array();
  for (Eigen::Index k = 0; k < s.coefficients.size(); ++k) coeffs.push_back(s.coefficients(k));
  return {{"rank", s.rank}, {"coefficients", coeffs}, {"threshold", kDefaultSchmidtThreshold}};
}

struct Pipeline {
  const RunConfig& config;
  SpdcParams spdc;
  LinearArm arm;
  JointState source;
  DcmParams dcm;
  QstSettings qst;

  explicit Pipeline(const RunConfig& c)
      : config(c),
        spdc(c.spdc_params()),
        arm(c.arm_params()),
        source(spdc_state(spdc)),
        dcm(c.dcm_params()),
        qst(c.qst_settings()) {}

  double wavelength_nm(double detuning) const {
    return detuning_to_wavelength(source.pump_frequency(), detuning) * 1e9;
  }

  JointState output(const PCUnitary& pc) const { return compose_nli(source, pc, arm, config.imperfections); }

  json derived() const {
    return {{"fringe_count", fringe_count(arm, source.detunings())},
            {"bin_width_nm", bin_width_wavelength(dcm) * 1e9},
            {"bin_width_GHz", bin_width_frequency(dcm) * 1e-9},
            {"grid_points", source.size()},
            {"grid_spacing_GHz", (source.detunings()[1] - source.detunings()[0]) / (2.0 * std::numbers::pi) * 1e-9},
            {"degenerate_wavelength_nm", wavelength_nm(0.0)}};
  }

  // Fringe visibility of the output spectrum relative to the source envelope,
  // over bins holding at least 1e-6 of the peak source intensity.
  double envelope_visibility(const JointState& out) const {
    const auto src = source.bin_intensity(), dst = out.bin_intensity();
    const double floor = 1e-6 * src.maxCoeff();
    std::vector<double> ratio;
    for (Eigen::Index i = 0; i < src.size(); ++i)
      if (src(i) > floor) ratio.push_back(dst(i) / src(i));
    return fringe_visibility(ratio);
  }

  // Concurrence per grid bin, NaN where the bin carries too little weight.
  std::vector<double> concurrences(const JointState& out) const {
    std::vector<double> c(out.size(), std::numeric_limits<double>::quiet_NaN());
    std::size_t i = 0;
    const auto samples = concurrence_spectrum(out, qst.min_relative_weight);
    for (const auto& s : samples) {
      while (out.detunings()[i] != s.detuning) ++i;
      c[i] = s.value;
    }
    return c;
  }

  // Min and max over samples whose wavelength lies within the configured band.
  json band_extrema(const std::vector<double>& detunings, const std::vector<double>& values) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i])) continue;
      if (qst.band > 0 && std::abs(wavelength_nm(detunings[i]) * 1e-9 - dcm.center_wavelength) > qst.band / 2.0)
        continue;
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
    if (!(lo <= hi)) return nullptr;
    return {{"band_nm", config.tomography.band_nm}, {"min", lo}, {"max", hi}};
  }
};

RunOutput spectrum(const Pipeline& p) {
  const JointState out = p.output(p.config.pc_params());
  const auto src = p.source.bin_intensity(), dst = out.bin_intensity();
  RunOutput r;
  r.data.columns = columns::spectrum;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = out.detunings()[i];
    const auto k = static_cast<Eigen::Index>(i);
    r.data.add({w / kTHz, p.wavelength_nm(w), src(k), dst(k)});
  }
  r.summary["visibility"] = p.envelope_visibility(out);
  return r;
}

RunOutput sweep(const Pipeline& p) {
  const JointState out = p.output(p.config.pc_params());
  const auto intensity = out.bin_intensity();
  const auto c = p.concurrences(out);
  RunOutput r;
  r.data.columns = columns::concurrence_sweep;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = out.detunings()[i];
    r.data.add({w / kTHz, p.wavelength_nm(w), intensity(static_cast<Eigen::Index>(i)), c[i]});
  }
  r.summary["concurrence_band"] = p.band_extrema({out.detunings().begin(), out.detunings().end()}, c);
  return r;
}

RunOutput tomography(const Pipeline& p) {
  const JointState out = p.output(p.config.pc_params());
  const QstSweep qst = frequency_resolved_qst(out, p.dcm, p.qst);
  const auto projectors = ProjectorSet16::standard();

  RunOutput r;
  r.data.columns = columns::tomography_bins;
  r.matrices.columns = columns::density_elements;
  std::vector<CountRecord> records;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& b : qst.bins) {
    const auto& e = b.state;
    r.data.add({static_cast<double>(b.bin.index), b.bin.center_wavelength * 1e9, b.bin.signal_wavelength * 1e9,
                b.bin.idler_wavelength * 1e9, e.true_concurrence, e.concurrence, e.concurrence_error, e.fidelity,
                purity(e.estimate.rho)});
    for (int row = 0; row < 4; ++row)
      for (int col = 0; col < 4; ++col) {
        const Complex z = e.estimate.rho(row, col);
        r.matrices.add({static_cast<double>(b.bin.index), double(row), double(col), z.real(), z.imag()});
      }
    records.push_back(e.record);
    lo = std::min(lo, e.concurrence);
    hi = std::max(hi, e.concurrence);
  }
  std::ostringstream counts;
  write_counts(counts, records, projectors);
  r.counts = counts.str();

  r.summary["bins_measured"] = qst.bins.size();
  r.summary["skipped"] = qst.log;
  if (!qst.bins.empty()) r.summary["concurrence_range"] = {{"min", lo}, {"max", hi}};
  r.summary["full_band"] = estimate_json(full_band_qst(out, p.qst));
  return r;
}

RunOutput schmidt(const Pipeline& p) {
  const JointState out = p.output(p.config.pc_params());
  const SchmidtResult s = schmidt_decompose(out);
  RunOutput r;
  r.data.columns = {"detuning_THz", "signal_wavelength_nm"};
  const int modes = std::max(1, s.rank);
  for (int k = 0; k < modes; ++k) r.data.columns.push_back("mode" + std::to_string(k + 1) + "_intensity");
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = out.detunings()[i];
    std::vector<double> row{w / kTHz, p.wavelength_nm(w)};
    for (int k = 0; k < modes; ++k) row.push_back(std::norm(s.freq_modes(static_cast<Eigen::Index>(i), k)));
    r.data.add(std::move(row));
  }
  r.summary["schmidt"] = schmidt_json(s);
  json pols = json::array();
  for (int k = 0; k < modes; ++k) {
    json re = json::array(), im = json::array();
    for (int j = 0; j < 4; ++j) {
      re.push_back(s.pol_vectors[static_cast<std::size_t>(k)](j).real());
      im.push_back(s.pol_vectors[static_cast<std::size_t>(k)](j).imag());
    }
    pols.push_back({{"real", re}, {"imag", im}});
  }
  r.summary["schmidt"]["polarization_vectors"] = pols;
  return r;
}

// Table 1 columns: theta = 0 decouples, theta = pi/4 couples. The configured
// controller phases and imperfections are kept.
RunOutput table_case(const Pipeline& p, double theta) {
  const PCUnitary pc(theta, p.config.pc.phi1_rad, p.config.pc.phi2_rad);
  const JointState out = p.output(pc);
  const auto src = p.source.bin_intensity(), dst = out.bin_intensity();
  const auto c = p.concurrences(out);

  RunOutput r;
  r.data.columns = columns::case_spectrum;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = out.detunings()[i];
    const auto k = static_cast<Eigen::Index>(i);
    r.data.add({w / kTHz, p.wavelength_nm(w), src(k), dst(k), c[i]});
  }
  r.summary["pc_theta_rad"] = theta;
  r.summary["visibility"] = p.envelope_visibility(out);
  r.summary["schmidt"] = schmidt_json(schmidt_decompose(out));
  r.summary["reduced_state"] = reduced_json(trace_out_frequency(out));
  r.summary["band_split_state"] = reduced_json(full_band_state(out, true));
  r.summary["concurrence_band"] = p.band_extrema({out.detunings().begin(), out.detunings().end()}, c);
  r.summary["full_band"] = estimate_json(full_band_qst(out, p.qst));
  return r;
}

}  // namespace

RunOutput execute(const RunConfig& config) {
  const auto bad = validate(config);
  if (!bad.empty()) throw ValidationError(bad.front().path, bad.front().message);

  const Pipeline p(config);
  RunOutput r;
  switch (config.experiment) {
    case Experiment::spectrum: r = spectrum(p); break;
    case Experiment::concurrence_sweep: r = sweep(p); break;
    case Experiment::tomography: r = tomography(p); break;
    case Experiment::schmidt: r = schmidt(p); break;
    case Experiment::case1: r = table_case(p, 0.0); break;
    case Experiment::case2: r = table_case(p, std::numbers::pi / 4.0); break;
  }
  r.stem = std::string(to_string(config.experiment));
  json summary = {{"software", {{"name", "cpnli-sim"}, {"version", std::string(version())}}},
                  {"experiment", r.stem},
                  {"config", to_json(config)},
                  {"derived", p.derived()}};
  summary["results"] = std::move(r.summary);
  r.summary = std::move(summary);
  return r;
}

std::vector<std::filesystem::path> write_outputs(const RunOutput& output, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::vector<std::pair<fs::path, std::string>> files;
  {
    std::ostringstream os;
    write_table(os, output.data);
    files.emplace_back(dir / (output.stem + ".csv"), os.str());
  }
  files.emplace_back(dir / (output.stem + ".summary.json"), output.summary.dump(2) + "\n");
  if (!output.counts.empty()) files.emplace_back(dir / (output.stem + ".counts.csv"), output.counts);
  if (!output.matrices.columns.empty()) {
    std::ostringstream os;
    write_table(os, output.matrices);
    files.emplace_back(dir / (output.stem + ".matrices.csv"), os.str());
  }

  std::vector<fs::path> temps, renamed;
  auto discard = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    for (const auto& f : renamed) fs::remove(f, ec);
  };
  try {
    for (const auto& [path, text] : files) {
      fs::path tmp = path;
      tmp += ".partial";
      temps.push_back(tmp);
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os << text;
      os.close();
      if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
      fs::rename(temps[i], files[i].first);
      renamed.push_back(files[i].first);
    }
  } catch (...) {
    discard();
    throw;
  }

  std::vector<fs::path> out;
  for (const auto& f : files) out.push_back(f.first);
  return out;
}

}  // namespace cpnli
