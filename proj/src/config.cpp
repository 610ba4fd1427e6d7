#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cpnli/config.hpp"

namespace cpnli {

using nlohmann::json;

namespace {

constexpr std::pair<Experiment, std::string_view> kExperimentNames[] = {
    {Experiment::spectrum, "spectrum"},     {Experiment::concurrence_sweep, "concurrence-sweep"},
    {Experiment::tomography, "tomography"}, {Experiment::schmidt, "schmidt"},
    {Experiment::case1, "case1"},           {Experiment::case2, "case2"},
};

// Walks one JSON object, remembering which keys were consumed so that the
// rest can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(at(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else if (v->get<long long>() < 0) {
          throw ConfigError(at(key), "must be >= 0");
        } else {
          out = static_cast<Int>(v->get<long long>());
        }
      } else {
        const long long x = v->get<long long>();
        if (x < std::numeric_limits<Int>::min() || x > std::numeric_limits<Int>::max())
          throw ConfigError(at(key), "out of range");
        out = static_cast<Int>(x);
      }
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename F>
  void child(const char* key, F&& read) {
    if (const json* v = take(key)) {
      Section s(*v, at(key));
      read(s);
      s.finish();
    }
  }

  void finish() const {
    for (const auto& [key, value] : node_.items())
      if (!seen_.count(key)) throw ConfigError(at(key.c_str()), "unknown key");
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }
  std::string at(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_expansion(Section& s, DispersionExpansion& d) {
  s.number("k0_rad_per_m", d.k0);
  s.number("k1_s_per_m", d.k1);
  s.number("k2_s2_per_m", d.k2);
  s.number("k3_s3_per_m", d.k3);
}

json expansion_json(const DispersionExpansion& d) {
  return {{"k0_rad_per_m", d.k0}, {"k1_s_per_m", d.k1}, {"k2_s2_per_m", d.k2}, {"k3_s3_per_m", d.k3}};
}

void append(std::vector<Violation>& out, std::vector<Violation> more) {
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [value, name] : kExperimentNames)
    if (value == e) return name;
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [value, n] : kExperimentNames)
    if (n == name) return value;
  return std::nullopt;
}

SpdcParams SourceConfig::params() const {
  SpdcParams p;
  p.pump_wavelength = pump_wavelength_nm * 1e-9;
  p.crystal_length = crystal_length_m;
  p.phase_mismatch = phase_mismatch;
  p.emission_halfwidth = 2.0 * std::numbers::pi * emission_halfwidth_thz * 1e12;
  p.grid_points = grid_points;
  p.amplitude_scale = Complex(amplitude_scale, 0.0);
  return p;
}

DcmParams DcmConfig::params() const {
  DcmParams p;
  p.dispersion = dispersion_ps_per_nm * 1e-12 / 1e-9;
  p.jitter = jitter_ps * 1e-12;
  p.center_wavelength = center_wavelength_nm * 1e-9;
  return p;
}

QstSettings TomographyConfig::settings() const {
  QstSettings s;
  s.brightness = brightness_per_s;
  s.acquisition_time = time_per_projector_s;
  s.seed = seed;
  s.resamples = resamples;
  s.background = background_per_s;
  s.band = band_nm * 1e-9;
  s.min_relative_weight = min_relative_weight;
  return s;
}

LinearArm RunConfig::arm_params() const { return make_arm(spdc_params(), arm.length_m, arm.dispersion); }

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  std::string experiment(to_string(c.experiment));
  root.string("experiment", experiment);
  if (auto e = parse_experiment(experiment)) {
    c.experiment = *e;
  } else {
    throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  }
  root.string("output_path", c.output_path);
  root.child("source", [&](Section& s) {
    s.number("pump_wavelength_nm", c.source.pump_wavelength_nm);
    s.number("crystal_length_m", c.source.crystal_length_m);
    s.number("emission_halfwidth_thz", c.source.emission_halfwidth_thz);
    s.integer("grid_points", c.source.grid_points);
    s.number("amplitude_scale", c.source.amplitude_scale);
    s.child("phase_mismatch", [&](Section& d) { read_expansion(d, c.source.phase_mismatch); });
  });
  root.child("arm", [&](Section& s) {
    s.number("length_m", c.arm.length_m);
    s.child("dispersion", [&](Section& d) { read_expansion(d, c.arm.dispersion); });
  });
  root.child("pc", [&](Section& s) {
    s.number("theta_rad", c.pc.theta_rad);
    s.number("phi1_rad", c.pc.phi1_rad);
    s.number("phi2_rad", c.pc.phi2_rad);
  });
  root.child("imperfections", [&](Section& s) {
    s.number("amplitude_ratio", c.imperfections.amplitude_ratio);
    s.number("theta_error_rad", c.imperfections.theta_error);
  });
  root.child("dcm", [&](Section& s) {
    s.number("dispersion_ps_per_nm", c.dcm.dispersion_ps_per_nm);
    s.number("jitter_ps", c.dcm.jitter_ps);
    s.number("center_wavelength_nm", c.dcm.center_wavelength_nm);
  });
  root.child("tomography", [&](Section& s) {
    s.number("brightness_per_s", c.tomography.brightness_per_s);
    s.number("time_per_projector_s", c.tomography.time_per_projector_s);
    s.integer("seed", c.tomography.seed);
    s.integer("resamples", c.tomography.resamples);
    s.number("background_per_s", c.tomography.background_per_s);
    s.number("band_nm", c.tomography.band_nm);
    s.number("min_relative_weight", c.tomography.min_relative_weight);
  });
  root.finish();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<document>", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

json to_json(const RunConfig& c) {
  json doc;
  doc["experiment"] = std::string(to_string(c.experiment));
  doc["output_path"] = c.output_path;
  doc["source"] = {{"pump_wavelength_nm", c.source.pump_wavelength_nm},
                   {"crystal_length_m", c.source.crystal_length_m},
                   {"emission_halfwidth_thz", c.source.emission_halfwidth_thz},
                   {"grid_points", c.source.grid_points},
                   {"amplitude_scale", c.source.amplitude_scale},
                   {"phase_mismatch", expansion_json(c.source.phase_mismatch)}};
  doc["arm"] = {{"length_m", c.arm.length_m}, {"dispersion", expansion_json(c.arm.dispersion)}};
  doc["pc"] = {{"theta_rad", c.pc.theta_rad}, {"phi1_rad", c.pc.phi1_rad}, {"phi2_rad", c.pc.phi2_rad}};
  doc["imperfections"] = {{"amplitude_ratio", c.imperfections.amplitude_ratio},
                          {"theta_error_rad", c.imperfections.theta_error}};
  doc["dcm"] = {{"dispersion_ps_per_nm", c.dcm.dispersion_ps_per_nm},
                {"jitter_ps", c.dcm.jitter_ps},
                {"center_wavelength_nm", c.dcm.center_wavelength_nm}};
  doc["tomography"] = {{"brightness_per_s", c.tomography.brightness_per_s},
                       {"time_per_projector_s", c.tomography.time_per_projector_s},
                       {"seed", c.tomography.seed},
                       {"resamples", c.tomography.resamples},
                       {"background_per_s", c.tomography.background_per_s},
                       {"band_nm", c.tomography.band_nm},
                       {"min_relative_weight", c.tomography.min_relative_weight}};
  return doc;
}

std::vector<Violation> validate(const RunConfig& c) {
  std::vector<Violation> out;
  const auto pc_angle = [&](const char* key, double v) {
    if (!std::isfinite(v)) out.push_back({std::string("pc.") + key, "must be finite"});
  };
  append(out, validate(c.spdc_params(), "source"));
  append(out, validate(c.arm_params(), "arm"));
  pc_angle("theta_rad", c.pc.theta_rad);
  pc_angle("phi1_rad", c.pc.phi1_rad);
  pc_angle("phi2_rad", c.pc.phi2_rad);
  append(out, validate(c.imperfections, "imperfections"));
  append(out, validate(c.dcm_params(), "dcm"));
  append(out, validate(c.qst_settings(), "tomography"));
  if (c.output_path.empty()) out.push_back({"output_path", "must not be empty"});
  return out;
}

std::vector<std::string> preset_names() { return {"case1", "case2", "case1-lab", "case2-lab"}; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "case1" || name == "case1-lab") {
    c.experiment = Experiment::case1;
  } else if (name == "case2" || name == "case2-lab") {
    c.experiment = Experiment::case2;
    c.pc.theta_rad = std::numbers::pi / 4.0;
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  if (name.ends_with("-lab")) c.imperfections = kLabImperfections;
  c.output_path = "out/" + std::string(name);
  return c;
}

}  // namespace cpnli
