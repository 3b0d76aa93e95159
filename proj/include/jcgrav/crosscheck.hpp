#pragma once

// Side-by-side comparison of the analytic and ODE backends over one sweep.
// Disagreement is reported, never raised: it measures how far the closed-form
// solution can be trusted.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "jcgrav/run.hpp"
#include "jcgrav/sweep.hpp"

namespace jcgrav {

struct CrosscheckOptions {
  double qg = 0.0;
  double tmax = 2.0;  // lambda t
  double tol = 1e-10;
  std::optional<double> lambda;  // override of the coupling, rad/s
  std::size_t samples = 201;
  std::size_t momentum_nodes = kDefaultMomentumNodes;
  bool literal_paper_mode = false;
};

/// Documented agreement of the two backends for lambda t <= 2 at qg = 0.
inline constexpr double kShortTimeInversionTolerance = 0.1;

struct CrosscheckReport {
  CrosscheckOptions options;
  double max_inversion_deviation = 0.0;
  double max_inversion_deviation_at = 0.0;  // lambda t
  double max_entropy_deviation = 0.0;       // over samples where both entropies exist
  std::size_t entropy_undefined = 0;        // analytic samples whose overlaps admit no entropy
  double max_analytic_norm_defect = 0.0;    // max |cc + dd - 1| of the analytic state
  double max_ode_norm_defect = 0.0;
};

inline CrosscheckReport crosscheck(const CrosscheckOptions& opt, const PhysicalParams& base = {}) {
  if (!(opt.tmax > 0.0)) throw DomainError("crosscheck: tmax > 0 required");
  if (opt.samples < 2) throw DomainError("crosscheck: samples >= 2 required");
  PhysicalParams pp = base;
  pp.qg = opt.qg;
  if (opt.lambda) pp.lambda = *opt.lambda;
  validate(pp);
  // lambda t is converted with the reference coupling when lambda itself is zero.
  const double rate = pp.lambda > 0.0 ? pp.lambda : ReferenceConstants::lambda;
  const auto lt = linspace(0.0, opt.tmax, opt.samples);
  std::vector<double> ts(lt.size());
  for (std::size_t i = 0; i < lt.size(); ++i) ts[i] = lt[i] / rate;
  const CoherentField field = coherent_amplitudes(pp.alpha, adaptive_nmax(pp.alpha));
  const MomentumGrid grid = build_momentum_grid(pp.sigma0, opt.momentum_nodes);
  OdeOptions oopt;
  oopt.tol = opt.tol;
  AnalyticOptions aopt;
  aopt.literal_paper_mode = opt.literal_paper_mode;
  const auto ode = ode_overlap_series(ts, pp, field, grid, oopt);
  const auto ana = analytic_overlap_series(ts, pp, field, grid, aopt);

  CrosscheckReport r;
  r.options = opt;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    const double dw = std::abs(inversion(ana[i]) - inversion(ode[i]));
    if (dw > r.max_inversion_deviation) {
      r.max_inversion_deviation = dw;
      r.max_inversion_deviation_at = lt[i];
    }
    r.max_analytic_norm_defect = std::max(r.max_analytic_norm_defect, std::abs(ana[i].cc + ana[i].dd - 1.0));
    r.max_ode_norm_defect = std::max(r.max_ode_norm_defect, std::abs(ode[i].cc + ode[i].dd - 1.0));
    try {
      const double sa = entropy(renormalize(ana[i])).s_f;
      const double so = entropy(ode[i]).s_f;
      r.max_entropy_deviation = std::max(r.max_entropy_deviation, std::abs(sa - so));
    } catch (const InconsistentStateError&) {
      ++r.entropy_undefined;
    }
  }
  return r;
}

/// key = value summary, one line per field.
inline std::string to_text(const CrosscheckReport& r) {
  using detail::format_double;
  std::ostringstream os;
  os << "qg = " << format_double(r.options.qg) << "\n";
  os << "tmax = " << format_double(r.options.tmax) << "\n";
  os << "tol = " << format_double(r.options.tol) << "\n";
  os << "samples = " << r.options.samples << "\n";
  os << "literal_paper_mode = " << (r.options.literal_paper_mode ? "true" : "false") << "\n";
  os << "max_inversion_deviation = " << format_double(r.max_inversion_deviation) << "\n";
  os << "max_inversion_deviation_at = " << format_double(r.max_inversion_deviation_at) << "\n";
  os << "max_entropy_deviation = " << format_double(r.max_entropy_deviation) << "\n";
  os << "entropy_undefined_samples = " << r.entropy_undefined << "\n";
  os << "max_analytic_norm_defect = " << format_double(r.max_analytic_norm_defect) << "\n";
  os << "max_ode_norm_defect = " << format_double(r.max_ode_norm_defect) << "\n";
  return os.str();
}

}  // namespace jcgrav
