// Grid scan over the imperfection model (amplitude ratio r, controller angle
// error) for the preset that brings the band-split, frequency-integrated
// concurrence of the decoupled and coupled configurations closest to the
// laboratory values 0.95 and 0.10. The best candidates are then re-checked
// with simulated tomography at the default acquisition settings.
//
//   scan_imperfections [--r-min 0.5] [--r-max 1.0] [--r-steps 101]
//                      [--err-max 0.2] [--err-steps 81] [--top 5]

#include <algorithm>
#include <cstdio>
#include <numbers>

#include "CLI11.hpp"

#include "cpnli/config.hpp"
#include "cpnli/interferometer.hpp"
#include "cpnli/measures.hpp"

namespace {

struct Candidate {
  cpnli::ImperfectionParams imp;
  double c1 = 0, c2 = 0, cost = 0;
};

}  // namespace

int main(int argc, char** argv) {
  double r_min = 0.5, r_max = 1.0, err_max = 0.2;
  int r_steps = 101, err_steps = 81, top = 5;
  double target1 = 0.95, target2 = 0.10;

  CLI::App app{"Scan imperfection parameters against the lab concurrences", "scan_imperfections"};
  app.add_option("--r-min", r_min);
  app.add_option("--r-max", r_max);
  app.add_option("--r-steps", r_steps)->check(CLI::PositiveNumber);
  app.add_option("--err-max", err_max, "rad");
  app.add_option("--err-steps", err_steps)->check(CLI::PositiveNumber);
  app.add_option("--top", top)->check(CLI::PositiveNumber);
  app.add_option("--target-case1", target1);
  app.add_option("--target-case2", target2);
  CLI11_PARSE(app, argc, argv);

  const cpnli::RunConfig base;
  const auto source = cpnli::spdc_state(base.spdc_params());
  const auto arm = base.arm_params();
  const cpnli::PCUnitary decoupled(0.0), coupled(std::numbers::pi / 4.0);

  std::vector<Candidate> all;
  for (int i = 0; i < r_steps; ++i) {
    const double r = r_steps == 1 ? r_min : r_min + (r_max - r_min) * i / (r_steps - 1);
    for (int j = 0; j < err_steps; ++j) {
      const double err = err_steps == 1 ? 0.0 : err_max * j / (err_steps - 1);
      Candidate c;
      c.imp = {r, err};
      c.c1 = cpnli::concurrence(cpnli::full_band_state(cpnli::compose_nli(source, decoupled, arm, c.imp), true));
      c.c2 = cpnli::concurrence(cpnli::full_band_state(cpnli::compose_nli(source, coupled, arm, c.imp), true));
      c.cost = (c.c1 - target1) * (c.c1 - target1) + (c.c2 - target2) * (c.c2 - target2);
      all.push_back(c);
    }
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });

  const auto qst = base.qst_settings();
  std::printf("%10s %14s %10s %10s %12s %12s\n", "r", "theta_err_rad", "C1_exact", "C2_exact", "C1_qst", "C2_qst");
  for (int k = 0; k < std::min<int>(top, static_cast<int>(all.size())); ++k) {
    const auto& c = all[static_cast<std::size_t>(k)];
    const auto e1 = cpnli::full_band_qst(cpnli::compose_nli(source, decoupled, arm, c.imp), qst);
    const auto e2 = cpnli::full_band_qst(cpnli::compose_nli(source, coupled, arm, c.imp), qst);
    std::printf("%10.4f %14.5f %10.4f %10.4f %6.3f+-%.3f %6.3f+-%.3f\n", c.imp.amplitude_ratio, c.imp.theta_error,
                c.c1, c.c2, e1.concurrence, e1.concurrence_error, e2.concurrence, e2.concurrence_error);
  }
  return 0;
}
