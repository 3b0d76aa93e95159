// Field state at half revival with and without gravity, drawn as a coarse
// ASCII Husimi plot. Usage: cat_state_demo [delta0 in rad/s]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "jcgrav/observables.hpp"
#include "jcgrav/ode.hpp"

int main(int argc, char** argv) {
  using namespace jcgrav;
  PhysicalParams base;
  if (argc > 1) base.delta0 = std::strtod(argv[1], nullptr);
  const auto field = coherent_amplitudes(base.alpha, adaptive_nmax(base.alpha));
  const auto grid = build_momentum_grid(base.sigma0, 16);
  const double t = kHalfRevivalLambdaT / base.lambda;
  const char* shades = " .:-=+*#%@";

  for (double qg : {0.0, 1.5e7}) {
    PhysicalParams p = base;
    p.qg = qg;
    const auto st = branch_states_ode(t, p, field, grid);
    const auto o = overlaps(st);
    const auto q = q_function(st, {9.0, 49});
    const auto peaks = q_peak_analysis(q);
    const auto cat = cat_fidelity(st, field);
    std::printf("qg = %g, delta0 = %g, lambda t = 7 pi / 2\n", qg, p.delta0);
    std::printf("  W = %.6f  S = %.6f  fidelity(weighted) = %.4f  peaks = %zu  bimodal = %s\n", inversion(o),
                entropy(o).s_f, cat.weighted, peaks.peaks.size(), peaks.bimodal ? "yes" : "no");
    double qmax = 0;
    for (double v : q.values) qmax = std::max(qmax, v);
    for (std::size_t iy = q.ny(); iy-- > 0;) {
      if (iy % 2) continue;
      std::string row = "  ";
      for (std::size_t ix = 0; ix < q.nx(); ++ix) row += shades[static_cast<int>(9.0 * q.at(ix, iy) / qmax)];
      std::puts(row.c_str());
    }
    std::puts("");
  }
}
