#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result sim(const std::string& args) {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "cpnli_cli_io";
    fs::create_directories(d);
    return d;
  }();
  const auto out = dir / "stdout", err = dir / "stderr";
  const std::string cmd = std::string(CPNLI_SIM) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

struct Workspace {
  fs::path path = fs::temp_directory_path() / "cpnli_cli_ws";
  Workspace() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workspace() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("presets prints the named configurations") {
    const auto r = sim("presets");
    REQUIRE(r.status == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc.contains("case1"));
    CHECK(doc.contains("case2"));
    CHECK(doc["case2"]["experiment"] == "case2");

    const auto one = sim("presets --name case1-lab");
    REQUIRE(one.status == 0);
    CHECK(json::parse(one.out)["experiment"] == "case1");
    CHECK(sim("presets --name nope").status == 2);
  }

  TEST_CASE("validate") {
    Workspace ws;
    const auto good = sim("validate --config " + ws.write("good.json", "{}"));
    CHECK(good.status == 0);
    CHECK(json::parse(good.out)["valid"] == true);

    const auto bad = sim("validate --config " +
                         ws.write("bad.json", R"({"source": {"grid_points": 4}, "dcm": {"jitter_ps": -1}})"));
    CHECK(bad.status == 2);
    const auto doc = json::parse(bad.out);
    CHECK(doc["valid"] == false);
    REQUIRE(doc["violations"].size() == 2);
    CHECK(doc["violations"][0]["path"] == "source.grid_points");
    CHECK(doc["violations"][1]["path"] == "dcm.jitter_ps");

    const auto unknown = sim("validate --config " + ws.write("unknown.json", R"({"sauce": {}})"));
    CHECK(unknown.status == 2);
    CHECK(json::parse(unknown.err)["violations"][0]["path"] == "sauce");

    CHECK(sim("validate --config " + (ws.path / "missing.json").string()).status == 2);
    CHECK(sim("validate").status == 2);
    CHECK(sim("bogus").status == 2);
  }

  TEST_CASE("run writes outputs and honours the overrides") {
    Workspace ws;
    const auto cfg = ws.write("c.json", R"({"source": {"grid_points": 4096}, "tomography": {"resamples": 3,
                                           "band_nm": 3}, "output_path": ")" +
                                            (ws.path / "default").string() + R"("})");
    const auto out = (ws.path / "o").string();
    const auto r = sim("run --config " + cfg + " --experiment tomography --seed 5 --out " + out);
    REQUIRE(r.status == 0);
    CHECK(json::parse(r.out)["files"].size() == 4);
    const auto summary = json::parse(slurp(fs::path(out) / "tomography.summary.json"));
    CHECK(summary["config"]["tomography"]["seed"] == 5);
    CHECK(summary["config"]["experiment"] == "tomography");
    CHECK(!fs::exists(ws.path / "default"));

    const std::vector<std::string> names{"tomography.csv", "tomography.summary.json", "tomography.counts.csv",
                                         "tomography.matrices.csv"};
    std::vector<std::string> first;
    for (const auto& f : names) first.push_back(slurp(fs::path(out) / f));
    const auto again = sim("run --config " + cfg + " --experiment tomography --seed 5 --out " + out);
    REQUIRE(again.status == 0);
    for (std::size_t i = 0; i < names.size(); ++i) CHECK(slurp(fs::path(out) / names[i]) == first[i]);
  }

  TEST_CASE("run reports config and runtime errors with their exit codes") {
    Workspace ws;
    const auto bad = sim("run --config " + ws.write("bad.json", R"({"source": {"grid_points": 4}})") + " --out " +
                         (ws.path / "never").string());
    CHECK(bad.status == 2);
    CHECK(json::parse(bad.err)["error"] == "config");
    CHECK(!fs::exists(ws.path / "never"));

    CHECK(sim("run --config " + ws.write("ok.json", "{}") + " --experiment nonsense").status == 2);

    // A grid too coarse for the DCM bins is only detected while running.
    const auto coarse = sim("run --config " +
                            ws.write("coarse.json", R"({"experiment": "tomography", "source": {"grid_points": 64}})") +
                            " --out " + (ws.path / "coarse").string());
    CHECK(coarse.status == 3);
    const auto err = json::parse(coarse.err);
    CHECK(err["error"] == "runtime");
    CHECK(err["code"] == "grid-resolution");
    CHECK(!fs::exists(ws.path / "coarse" / "tomography.csv"));
  }
}
