// cpnli-sim: batch front-end for the common-path nonlinear interferometer model.
//
//   cpnli-sim run --config <path> [--experiment <name>] [--seed <n>] [--out <dir>]
//   cpnli-sim validate --config <path>
//   cpnli-sim presets [--name <preset>]
//
// Exit codes: 0 success, 2 config error, 3 runtime error. Errors are written to
// stderr as one JSON object per line.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpnli/config.hpp"
#include "cpnli/run.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

using nlohmann::json;

json violations_json(const std::vector<cpnli::Violation>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back({{"path", x.path}, {"message", x.message}});
  return out;
}

int config_error(const std::string& path, const std::string& message) {
  std::cerr << json{{"error", "config"}, {"violations", json::array({{{"path", path}, {"message", message}}})}}.dump()
            << '\n';
  return kConfigError;
}

int config_error(const std::vector<cpnli::Violation>& v) {
  std::cerr << json{{"error", "config"}, {"violations", violations_json(v)}}.dump() << '\n';
  return kConfigError;
}

int runtime_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", "runtime"}, {"code", code}, {"message", message}}.dump() << '\n';
  return kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Common-path nonlinear interferometer simulator", "cpnli-sim"};
  app.set_version_flag("--version", std::string(cpnli::version()));
  app.require_subcommand(1);

  std::string config_path, experiment, out_dir, preset_name;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run an experiment and write its data and summary files");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--experiment", experiment, "spectrum | concurrence-sweep | tomography | schmidt | case1 | case2");
  auto* seed_opt = run->add_option("--seed", seed, "Top-level random seed");
  run->add_option("--out", out_dir, "Output directory (default: output_path from the config)");

  auto* check = app.add_subcommand("validate", "Report every invalid configuration field");
  check->add_option("--config", config_path, "Run configuration (JSON)")->required();

  auto* presets = app.add_subcommand("presets", "Print the named preset configurations");
  presets->add_option("--name", preset_name, "Print only this preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*presets) {
    try {
      if (!preset_name.empty()) {
        std::cout << cpnli::to_json(cpnli::preset(preset_name)).dump(2) << '\n';
      } else {
        json all = json::object();
        for (const auto& name : cpnli::preset_names()) all[name] = cpnli::to_json(cpnli::preset(name));
        std::cout << all.dump(2) << '\n';
      }
    } catch (const std::invalid_argument& e) {
      return config_error("name", e.what());
    }
    return 0;
  }

  cpnli::RunConfig config;
  try {
    config = cpnli::load_config(config_path);
  } catch (const cpnli::ConfigError& e) {
    return config_error(e.path(), e.what());
  }

  if (*check) {
    const auto v = cpnli::validate(config);
    std::cout << json{{"valid", v.empty()}, {"violations", violations_json(v)}}.dump() << '\n';
    return v.empty() ? 0 : kConfigError;
  }

  if (!experiment.empty()) {
    const auto e = cpnli::parse_experiment(experiment);
    if (!e) return config_error("experiment", "unknown experiment '" + experiment + "'");
    config.experiment = *e;
  }
  if (*seed_opt) config.tomography.seed = seed;
  if (!out_dir.empty()) config.output_path = out_dir;

  const auto v = cpnli::validate(config);
  if (!v.empty()) return config_error(v);

  try {
    const auto output = cpnli::execute(config);
    const auto paths = cpnli::write_outputs(output, config.output_path);
    json written = json::array();
    for (const auto& p : paths) written.push_back(p.string());
    std::cout << json{{"experiment", output.stem}, {"files", written}}.dump() << '\n';
  } catch (const cpnli::ValidationError& e) {
    return runtime_error(e.invariant(), e.what());
  } catch (const std::exception& e) {
    return runtime_error("internal", e.what());
  }
  return 0;
}
