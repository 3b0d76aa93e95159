#pragma once

// Overlap time series for a whole sweep. The ODE path integrates each block
// once across all sample times instead of restarting per sample.

#include <cstddef>
#include <span>
#include <vector>

#include "jcgrav/analytic.hpp"
#include "jcgrav/observables.hpp"
#include "jcgrav/ode.hpp"
#include "jcgrav/parallel.hpp"

namespace jcgrav {

/// Overlaps at each time (seconds, ascending, >= 0) from the ODE backend.
/// Per-node partial sums are reduced in node order, so results do not depend
/// on the thread count.
inline std::vector<OverlapTriple> ode_overlap_series(std::span<const double> times, const PhysicalParams& params,
                                                     const CoherentField& field, const MomentumGrid& grid,
                                                     const OdeOptions& opt = {},
                                                     std::size_t threads = default_thread_count(),
                                                     Dop853Stats* stats = nullptr) {
  check_ode_tolerance(opt.tol);
  const std::size_t nt = times.size();
  const std::size_t dim = branch_dim(field);
  std::vector<std::vector<OverlapTriple>> partial(grid.size());
  std::vector<Dop853Stats> node_stats(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t k) {
        std::vector<std::vector<BlockAmplitudes>> blocks(field.nmax + 1);
        for (std::size_t n = 0; n <= field.nmax; ++n) {
          if (field.w[n] == cplx{0.0, 0.0}) continue;
          blocks[n] = evolve_block_series(n, grid.nodes[k], times, params, block_tolerance(opt, field.w[n]),
                                          opt.frame, &node_stats[k], opt.max_steps);
        }
        std::vector<cplx> c(dim), d(dim);
        partial[k].resize(nt);
        for (std::size_t i = 0; i < nt; ++i) {
          std::fill(c.begin(), c.end(), cplx{0.0, 0.0});
          std::fill(d.begin(), d.end(), cplx{0.0, 0.0});
          for (std::size_t n = 0; n <= field.nmax; ++n) {
            if (blocks[n].empty()) continue;
            c[n] = field.w[n] * blocks[n][i].c_e;
            d[n + 1] = field.w[n] * blocks[n][i].c_g;
          }
          partial[k][i] = detail::node_overlaps(c, d);
        }
      },
      threads);
  std::vector<OverlapTriple> out(nt);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t i = 0; i < nt; ++i) detail::accumulate(out[i], grid.weights[k], partial[k][i]);
    if (stats) {
      stats->accepted += node_stats[k].accepted;
      stats->rejected += node_stats[k].rejected;
      stats->evaluations += node_stats[k].evaluations;
    }
  }
  return out;
}

/// Overlaps at each time from the analytic backend.
inline std::vector<OverlapTriple> analytic_overlap_series(std::span<const double> times, const PhysicalParams& params,
                                                          const CoherentField& field, const MomentumGrid& grid,
                                                          const AnalyticOptions& opt = {},
                                                          std::size_t threads = default_thread_count()) {
  std::vector<OverlapTriple> out(times.size());
  parallel_for(
      times.size(), [&](std::size_t i) { out[i] = overlaps(branch_states_analytic(times[i], params, field, grid, opt)); },
      threads);
  return out;
}

}  // namespace jcgrav
