// Plants a block in Gaussian noise and localizes it with each method.

#include <cstdio>

#include "mscan.hpp"

int main() {
  using namespace mscan;

  GenerationSpec spec;
  spec.M = 200;
  spec.N = 240;
  spec.m_star = 34;
  spec.n_star = 28;
  spec.theta = 3.0 * theta_crit(spec.M, spec.N, spec.m_star, spec.n_star);
  spec.seed = 7;
  const auto [X, truth] = generate(spec);

  AdaptiveConfig adaptive;
  adaptive.m0 = adaptive.n0 = 5;
  adaptive.restarts = 20;
  GssConfig golden;
  golden.m_bar = golden.n_bar = 100;

  const ScanResult a = adaptive_las(X, adaptive, 1);
  const ScanResult g = gss(X, golden);
  const Selection s = spectral_localize(X, {.accept_unconverged = true});
  const Selection m = gmg_localize(X);

  std::printf("theta = %.4f (3 x theta_crit)\n", spec.theta);
  std::printf("%-12s %6s %6s %10s %8s\n", "method", "rows", "cols", "objective", "err");
  auto report = [&](const char* name, const Selection& sel) {
    std::printf("%-12s %6zu %6zu %10.4f %8.4f\n", name, sel.height(), sel.width(),
                mscan_objective(X, sel), err_measure(sel, truth));
  };
  report("adaptiveLas", a.selection);
  report("gss", g.selection);
  report("spectral", s);
  report("gmg", m);
  report("truth", truth);
}
