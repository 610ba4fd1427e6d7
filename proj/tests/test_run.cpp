#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "cpnli/run.hpp"

using namespace cpnli;
namespace fs = std::filesystem;

namespace {

RunConfig quick(Experiment e) {
  RunConfig c;
  c.experiment = e;
  c.source.grid_points = 4096;
  c.tomography.resamples = 5;
  c.tomography.band_nm = 4;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("cpnli_test_" + name)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("run") {
  TEST_CASE("data tables round trip through the columnar format") {
    DataTable t;
    t.columns = {"detuning_THz", "concurrence"};
    t.add({-1.25, 0.5});
    t.add({0.1 + 0.2, std::numeric_limits<double>::quiet_NaN()});
    t.add({1e-300, 1.0});
    std::stringstream ss;
    write_table(ss, t);
    CHECK(ss.str().rfind("detuning_THz,concurrence\n", 0) == 0);
    const auto back = read_table(ss);
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[1][0] == 0.1 + 0.2);
    CHECK(std::isnan(back.rows[1][1]));
    CHECK(back.rows[2][0] == 1e-300);
    CHECK(back.column("concurrence") == 1);
    CHECK_THROWS_AS(back.column("missing"), std::out_of_range);
    CHECK_THROWS_AS(t.add({1.0}), std::logic_error);
  }

  TEST_CASE("corrupted tables are rejected") {
    for (const char* text : {"", "a,,b\n1,2,3\n", "a,a\n1,2\n", "a,b\n1\n", "a,b\n1,x\n", "a,b\n1,2.5.1\n"}) {
      std::istringstream in(text);
      CHECK_THROWS_AS(read_table(in), std::runtime_error);
    }
  }

  TEST_CASE("case1 summary") {
    const auto out = execute(quick(Experiment::case1));
    CHECK(out.stem == "case1");
    CHECK(out.data.columns == columns::case_spectrum);
    CHECK(out.data.rows.size() == 4096);
    const auto& s = out.summary;
    CHECK(s["software"]["version"] == std::string(version()));
    CHECK(s["config"] == to_json(quick(Experiment::case1)));
    CHECK(s["derived"]["bin_width_nm"].get<double>() == doctest::Approx(0.362).epsilon(5e-4));
    CHECK(s["derived"]["fringe_count"].get<double>() > 100);
    const auto& r = s["results"];
    CHECK(r["schmidt"]["rank"] == 1);
    CHECK(r["reduced_state"]["concurrence"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r["full_band"]["concurrence"].get<double>() > 0.95);
  }

  TEST_CASE("case2 summary") {
    const auto out = execute(quick(Experiment::case2));
    const auto& r = out.summary["results"];
    CHECK(r["pc_theta_rad"].get<double>() == doctest::Approx(std::numbers::pi / 4));
    CHECK(r["schmidt"]["rank"] == 2);
    CHECK(r["reduced_state"]["concurrence"].get<double>() < 0.1);
    CHECK(r["reduced_state"]["purity"].get<double>() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(r["visibility"].get<double>() < 1e-10);
  }

  TEST_CASE("other experiments produce their tables") {
    const auto spec = execute(quick(Experiment::spectrum));
    CHECK(spec.data.columns == columns::spectrum);

    const auto sweep = execute(quick(Experiment::concurrence_sweep));
    CHECK(sweep.data.columns == columns::concurrence_sweep);
    CHECK(sweep.summary["results"]["concurrence_band"]["max"].get<double>() == doctest::Approx(1.0));

    const auto sch = execute(quick(Experiment::schmidt));
    CHECK(sch.data.columns.size() == 3);
    CHECK(sch.data.columns[2] == "mode1_intensity");

    const auto tomo = execute(quick(Experiment::tomography));
    CHECK(tomo.data.columns == columns::tomography_bins);
    CHECK(tomo.matrices.columns == columns::density_elements);
    CHECK(tomo.matrices.rows.size() == 16 * tomo.data.rows.size());
    CHECK(!tomo.counts.empty());
    CHECK(tomo.summary["results"]["bins_measured"] == tomo.data.rows.size());
  }

  TEST_CASE("invalid configuration raises before any work") {
    auto c = quick(Experiment::case1);
    c.dcm.jitter_ps = -1;
    CHECK_THROWS_AS(execute(c), ValidationError);
  }

  TEST_CASE("identical configurations give byte-identical files") {
    TempDir a("det_a"), b("det_b");
    const auto c = quick(Experiment::tomography);
    const auto pa = write_outputs(execute(c), a.path);
    const auto pb = write_outputs(execute(c), b.path);
    REQUIRE(pa.size() == 4);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].filename() == pb[i].filename());
      CHECK(slurp(pa[i]) == slurp(pb[i]));
    }
    for (const auto& entry : fs::directory_iterator(a.path))
      CHECK(entry.path().extension() != ".partial");

    auto other = c;
    other.tomography.seed = 2;
    const auto pc = write_outputs(execute(other), b.path);
    CHECK(slurp(pa[2]) != slurp(pc[2]));
  }

  TEST_CASE("failed writes leave nothing behind") {
    TempDir d("atomic");
    fs::create_directories(d.path);
    // A directory squatting on the final name makes the rename fail.
    fs::create_directories(d.path / "case1.summary.json");
    const auto out = execute(quick(Experiment::case1));
    CHECK_THROWS(write_outputs(out, d.path));
    std::vector<std::string> left;
    for (const auto& entry : fs::directory_iterator(d.path)) left.push_back(entry.path().filename().string());
    CHECK(left == std::vector<std::string>{"case1.summary.json"});
  }
}
