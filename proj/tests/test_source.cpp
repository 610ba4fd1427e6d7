#include <numbers>

#include "doctest.h"

#include "cpnli/measures.hpp"
#include "cpnli/source.hpp"
#include "support.hpp"

using namespace cpnli;

TEST_SUITE("source") {
  TEST_CASE("phase mismatch expansion") {
    const DispersionExpansion d{1.5, 2e-9, 1e-24, 3e-37};
    CHECK(phase_mismatch(d, 0.0) == 1.5);

    // Single quadratic term: 1e-24 * (1e12)^2 / 2.
    const DispersionExpansion q{0, 0, 1e-24, 0};
    CHECK(phase_mismatch(q, 1e12) == doctest::Approx(0.5).epsilon(1e-15));

    const double w = 3.7e13;
    CHECK(phase_mismatch(d, w) ==
          doctest::Approx(1.5 + 2e-9 * w + 1e-24 * w * w / 2 + 3e-37 * w * w * w / 6).epsilon(1e-14));

    const DispersionExpansion even{0.3, 0, 4e-26, 0};
    for (double x : {1e12, 5e13, 7.3e13}) CHECK(phase_mismatch(even, x) == phase_mismatch(even, -x));
  }

  TEST_CASE("parameter validation names each field") {
    CHECK(validate(SpdcParams{}).empty());
    SpdcParams p;
    p.grid_points = 4;
    p.crystal_length = 0;
    p.emission_halfwidth = -1;
    p.pump_wavelength = std::numeric_limits<double>::quiet_NaN();
    p.phase_mismatch.k1 = std::numeric_limits<double>::infinity();
    p.amplitude_scale = 0;
    const auto v = validate(p);
    std::vector<std::string> paths;
    for (const auto& x : v) paths.push_back(x.path);
    CHECK(paths == std::vector<std::string>{"source.pump_wavelength_nm", "source.crystal_length_m",
                                            "source.emission_halfwidth_thz", "source.grid_points",
                                            "source.phase_mismatch", "source.amplitude_scale"});
    CHECK(v[3].message.find(">= 16") != std::string::npos);
    CHECK_THROWS_AS(spdc_state(p), ValidationError);
  }

  TEST_CASE("joint amplitude follows the sinc law") {
    SpdcParams p;
    p.phase_mismatch = {0, 0, 0, 0};
    p.amplitude_scale = Complex(0.0, 2.0);
    CHECK(std::abs(joint_amplitude(p, 1e13) - Complex(0.0, 2.0 * p.crystal_length)) < 1e-15);

    p.phase_mismatch = {2.0 * std::numbers::pi / p.crystal_length, 0, 0, 0};
    CHECK(std::abs(joint_amplitude(p, 0.0)) < 1e-15);

    CHECK_THROWS_AS(joint_amplitude(SpdcParams{}, 1.01 * SpdcParams{}.emission_halfwidth), std::out_of_range);
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(1e-9) == doctest::Approx(1.0));
    CHECK(sinc(std::numbers::pi / 2) == doctest::Approx(2.0 / std::numbers::pi));
  }

  TEST_CASE("detuning grid is uniform, symmetric and spans the band") {
    const auto p = oracle::small_source(1001);
    const auto g = detuning_grid(p);
    REQUIRE(g.size() == 1001);
    CHECK(g.front() == doctest::Approx(-p.emission_halfwidth));
    CHECK(g.back() == doctest::Approx(p.emission_halfwidth));
    CHECK(g[500] == doctest::Approx(0.0));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(-g[g.size() - 1 - i]).epsilon(1e-12));
  }

  TEST_CASE("source state carries Psi+ with a sinc^2 envelope") {
    const auto p = oracle::small_source(2048);
    const auto s = spdc_state(p);
    CHECK(s.pump_frequency() == doctest::Approx(2 * std::numbers::pi * kSpeedOfLight / 780e-9));
    const auto intensity = s.bin_intensity();
    for (std::size_t i = 0; i < s.size(); i += 97) {
      const double w = s.detunings()[i];
      const double x = p.phase_mismatch(w) * p.crystal_length / 2;
      const double env = p.crystal_length * p.crystal_length * (x == 0 ? 1.0 : std::pow(std::sin(x) / x, 2));
      CHECK(intensity(static_cast<Eigen::Index>(i)) == doctest::Approx(env).epsilon(1e-12));
      if (env > 1e-6 * p.crystal_length * p.crystal_length) {
        const auto rho = conditional_density(s, i);
        CHECK(max_abs(rho.matrix() - oracle::case1_pair()) < 1e-12);
        CHECK(concurrence(rho) == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
    for (std::size_t i = 0; i < s.size(); ++i)
      CHECK(intensity(static_cast<Eigen::Index>(i)) ==
            doctest::Approx(intensity(static_cast<Eigen::Index>(s.size() - 1 - i))).epsilon(1e-12));
    CHECK(concurrence(trace_out_frequency(s)) == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("default envelope half maximum sits near +-34 nm") {
    // Half maximum of sinc^2 at x = 1.39156; x = k2 W^2 L / 4.
    const SpdcParams p;
    const double w = std::sqrt(4 * 1.391557 / (p.phase_mismatch.k2 * p.crystal_length));
    const double nu0 = kSpeedOfLight / 1560e-9;
    const double dlambda = kSpeedOfLight / (nu0 - w / (2 * std::numbers::pi)) - 1560e-9;
    CHECK(dlambda * 1e9 == doctest::Approx(34).epsilon(0.05));
    const double x = p.phase_mismatch(w) * p.crystal_length / 2;
    CHECK(std::pow(sinc(x), 2) == doctest::Approx(0.5).epsilon(1e-5));
  }
}
