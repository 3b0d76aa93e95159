#pragma once

// Executes a Scenario and writes its tables: one CSV per (observable, backend,
// q.g), Q grids in long CSV and matrix text form, and a run_metadata file.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jcgrav/analytic.hpp"
#include "jcgrav/observables.hpp"
#include "jcgrav/ode.hpp"
#include "jcgrav/scenario.hpp"
#include "jcgrav/sweep.hpp"
#include "jcgrav/version.hpp"

namespace jcgrav {

enum class BackendKind { analytic, ode };

inline const char* to_string(BackendKind b) { return b == BackendKind::analytic ? "analytic" : "ode"; }

struct SeriesResult {
  BackendKind backend;
  double qg;
  std::vector<double> lambda_t;
  std::vector<OverlapTriple> overlaps;
};

struct SnapshotResult {
  BackendKind backend;
  double qg;
  double lambda_t;
  OverlapTriple overlaps;
  std::optional<QGrid> q;
  std::optional<PeakReport> peaks;
  std::optional<CatFidelity> cat;
};

struct RunResult {
  Scenario scenario;
  std::size_t nmax = 0;
  double captured_mass = 0.0;
  std::vector<SeriesResult> series;
  std::vector<SnapshotResult> snapshots;
  std::optional<BranchAuditReport> audit;
  bool analytic_uses_quadrature = false;
  Dop853Stats ode_stats;
  std::vector<std::string> warnings;
};

using ProgressFn = std::function<void(const std::string&)>;

inline std::vector<BackendKind> backends_of(Backend b) {
  switch (b) {
    case Backend::analytic: return {BackendKind::analytic};
    case Backend::ode: return {BackendKind::ode};
    case Backend::both: return {BackendKind::analytic, BackendKind::ode};
  }
  return {};
}

/// Runs every (backend, q.g) pair of a validated scenario. Sweep observables
/// use all sample times; Q grids and cat reports use the last sample (the
/// single instant when t_at is set).
inline RunResult run_scenario(const Scenario& s, const ProgressFn& progress = {},
                              std::size_t threads = default_thread_count()) {
  validate(s);
  auto say = [&](const std::string& m) {
    if (progress) progress(m);
  };
  RunResult r;
  r.scenario = s;
  r.nmax = s.nmax.value_or(adaptive_nmax(s.params.alpha));
  const CoherentField field = coherent_amplitudes(s.params.alpha, r.nmax);
  r.captured_mass = field.captured_mass();
  const MomentumGrid grid = build_momentum_grid(s.params.sigma0, s.momentum_nodes);
  const std::vector<double> lt = s.time.samples();
  std::vector<double> ts(lt.size());
  for (std::size_t i = 0; i < lt.size(); ++i) ts[i] = lt[i] * s.seconds_per_lambda_t();

  const bool want_series = s.outputs.count(Output::inversion) || s.outputs.count(Output::entropy);
  const bool want_snapshot = s.outputs.count(Output::qgrid) || s.outputs.count(Output::cat_report);
  const auto kinds = backends_of(s.backend);

  AnalyticOptions aopt;
  aopt.literal_paper_mode = s.literal_paper_mode;
  aopt.quad_rel_tol = s.tol.quad;
  bool any_chirp = false;
  for (double qg : s.qg_list) any_chirp = any_chirp || qg > 0.0;
  if (std::find(kinds.begin(), kinds.end(), BackendKind::analytic) != kinds.end() && any_chirp) {
    say("branch audit");
    try {
      r.audit = audit_branches(s.params);
    } catch (const NoVariantMatchError& e) {
      r.audit = e.report();
      r.analytic_uses_quadrature = true;
      aopt.use_quadrature = true;
      r.warnings.push_back(std::string("branch audit found no matching variant; analytic backend uses quadrature: ") +
                           e.what());
    }
  }

  OdeOptions oopt;
  oopt.tol = s.tol.ode;
  oopt.frame = s.ode_frame;
  oopt.weight_scaled_tolerance = s.weight_scaled_tolerance;

  for (BackendKind kind : kinds) {
    for (double qg : s.qg_list) {
      PhysicalParams pp = s.params;
      pp.qg = qg;
      char tag[96];
      std::snprintf(tag, sizeof tag, "%s backend, qg = %g", to_string(kind), qg);
      if (want_series) {
        say(std::string("sweep: ") + tag);
        SeriesResult sr{kind, qg, lt, {}};
        sr.overlaps = kind == BackendKind::ode ? ode_overlap_series(ts, pp, field, grid, oopt, threads, &r.ode_stats)
                                               : analytic_overlap_series(ts, pp, field, grid, aopt, threads);
        r.series.push_back(std::move(sr));
      }
      if (want_snapshot) {
        say(std::string("snapshot: ") + tag);
        const double t = ts.back();
        const BranchState st = kind == BackendKind::ode ? branch_states_ode(t, pp, field, grid, oopt, &r.ode_stats)
                                                        : branch_states_analytic(t, pp, field, grid, aopt);
        SnapshotResult sn{kind, qg, lt.back(), overlaps(st), std::nullopt, std::nullopt, std::nullopt};
        if (s.outputs.count(Output::qgrid)) {
          sn.q = q_function(st, s.qgrid, threads);
          sn.peaks = q_peak_analysis(*sn.q);
          if (sn.q->boundary_leak())
            r.warnings.push_back(std::string("Q grid boundary reaches ") + detail::format_double(sn.q->boundary_max) +
                                 " (> 1e-6) for " + tag + "; the grid truncates the distribution");
        }
        if (s.outputs.count(Output::cat_report)) sn.cat = cat_fidelity(st, field);
        r.snapshots.push_back(std::move(sn));
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Output

inline std::string qg_tag(double qg) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", qg);
  return buf;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

inline std::string scalar_csv(const std::vector<double>& x, const std::vector<double>& v) {
  std::string out = "lambda_t,value\n";
  for (std::size_t i = 0; i < x.size(); ++i) out += format_double(x[i]) + "," + format_double(v[i]) + "\n";
  return out;
}

}  // namespace detail

/// Entropy per sample; renormalizes within the 1e-3 slack of entropy().
inline std::vector<double> entropy_series(const std::vector<OverlapTriple>& o) {
  std::vector<double> v(o.size());
  for (std::size_t i = 0; i < o.size(); ++i) v[i] = entropy(o[i]).s_f;
  return v;
}

inline std::vector<double> inversion_series(const std::vector<OverlapTriple>& o) {
  std::vector<double> v(o.size());
  for (std::size_t i = 0; i < o.size(); ++i) v[i] = inversion(o[i]);
  return v;
}

/// Writes every table of `r` into the existing directory `dir` and returns the
/// file names in the order written. Throws IoError if `dir` is missing.
inline std::vector<std::string> write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  using detail::format_double;
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("output directory does not exist: " + dir.string());
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& content) {
    detail::write_file(dir / name, content);
    files.push_back(name);
  };
  const Scenario& s = r.scenario;

  for (const auto& sr : r.series) {
    const std::string suffix = std::string(to_string(sr.backend)) + "_qg" + qg_tag(sr.qg) + ".csv";
    if (s.outputs.count(Output::inversion))
      emit("inversion_" + suffix, detail::scalar_csv(sr.lambda_t, inversion_series(sr.overlaps)));
    if (s.outputs.count(Output::entropy))
      emit("entropy_" + suffix, detail::scalar_csv(sr.lambda_t, entropy_series(sr.overlaps)));
  }
  for (const auto& sn : r.snapshots) {
    const std::string stem = std::string(to_string(sn.backend)) + "_qg" + qg_tag(sn.qg);
    if (sn.q) {
      const QGrid& q = *sn.q;
      std::string csv = "x,y,q\n";
      std::string mat;
      mat += "# Husimi Q at lambda_t = " + format_double(sn.lambda_t) + "\n";
      mat += "# rows: y ascending, columns: x ascending\n";
      mat += "# nx = " + std::to_string(q.nx()) + ", ny = " + std::to_string(q.ny()) + "\n";
      mat += "# x: " + format_double(q.x_axis.front()) + " .. " + format_double(q.x_axis.back()) +
             ", y: " + format_double(q.y_axis.front()) + " .. " + format_double(q.y_axis.back()) + "\n";
      for (std::size_t iy = 0; iy < q.ny(); ++iy) {
        for (std::size_t ix = 0; ix < q.nx(); ++ix) {
          csv += format_double(q.x_axis[ix]) + "," + format_double(q.y_axis[iy]) + "," + format_double(q.at(ix, iy)) +
                 "\n";
          mat += (ix ? " " : "") + format_double(q.at(ix, iy));
        }
        mat += "\n";
      }
      emit("qgrid_" + stem + ".csv", csv);
      emit("qgrid_" + stem + ".txt", mat);
    }
    if (sn.cat || sn.q) {
      std::ostringstream os;
      os << "backend = " << to_string(sn.backend) << "\n";
      os << "qg = " << format_double(sn.qg) << "\n";
      os << "lambda_t = " << format_double(sn.lambda_t) << "\n";
      os << "inversion = " << format_double(inversion(sn.overlaps)) << "\n";
      os << "cc = " << format_double(sn.overlaps.cc) << "\n";
      os << "dd = " << format_double(sn.overlaps.dd) << "\n";
      os << "entropy = " << format_double(entropy(sn.overlaps).s_f) << "\n";
      if (sn.cat) {
        os << "fidelity_weighted = " << format_double(sn.cat->weighted) << "\n";
        os << "fidelity_coherent = " << format_double(sn.cat->coherent) << "\n";
      }
      if (sn.q) {
        const PeakReport& p = *sn.peaks;
        os << "q_riemann_sum = " << format_double(sn.q->riemann_sum()) << "\n";
        os << "q_boundary_max = " << format_double(sn.q->boundary_max) << "\n";
        os << "peaks = " << p.peaks.size() << "\n";
        for (std::size_t i = 0; i < p.peaks.size(); ++i) {
          os << "peak." << i << " = " << format_double(p.peaks[i].x) << ", " << format_double(p.peaks[i].y) << ", "
             << format_double(p.peaks[i].height) << ", " << format_double(p.peaks[i].width) << "\n";
        }
        os << "height_ratio = " << format_double(p.height_ratio) << "\n";
        os << "separation = " << format_double(p.separation) << "\n";
        os << "mean_width = " << format_double(p.mean_width) << "\n";
        os << "bimodal = " << (p.bimodal ? "true" : "false") << "\n";
      }
      emit((sn.cat ? "cat_report_" : "snapshot_") + stem + ".txt", os.str());
    }
  }

  std::ostringstream md;
  md << "# run metadata\n";
  md << "version = " << kVersion << "\n";
  md << "nmax = " << r.nmax << "\n";
  md << "captured_mass = " << format_double(r.captured_mass) << "\n";
  md << "seconds_per_lambda_t = " << format_double(s.seconds_per_lambda_t()) << "\n";
  md << "ode.accepted_steps = " << r.ode_stats.accepted << "\n";
  md << "ode.rejected_steps = " << r.ode_stats.rejected << "\n";
  md << "phase_integrals = "
     << (r.analytic_uses_quadrature ? "quadrature"
                                    : "closed form (audited Erf variant via Faddeeva w); elementary at qg = 0")
     << "\n";
  if (r.audit) {
    md << "branch_audit.lattice_points = " << r.audit->points << "\n";
    md << "branch_audit.e_plus = " << describe(r.audit->best_plus) << "\n";
    md << "branch_audit.e_plus_residual = " << format_double(r.audit->best_plus_residual) << "\n";
    md << "branch_audit.e_plus_matches_printed = " << (r.audit->best_plus == kPrintedPlus ? "true" : "false") << "\n";
    md << "branch_audit.e_minus = " << describe(r.audit->best_minus) << "\n";
    md << "branch_audit.e_minus_residual = " << format_double(r.audit->best_minus_residual) << "\n";
    md << "branch_audit.e_minus_matches_printed = " << (r.audit->best_minus == kPrintedMinus ? "true" : "false")
       << "\n";
  } else {
    md << "branch_audit = not run (analytic backend unused or qg = 0 only)\n";
  }
  for (std::size_t i = 0; i < r.warnings.size(); ++i) md << "warning." << i << " = " << r.warnings[i] << "\n";
  for (std::size_t i = 0; i < files.size(); ++i) md << "file." << i << " = " << files[i] << "\n";
  md << "\n# scenario\n" << serialize(s);
  emit("run_metadata.txt", md.str());
  return files;
}

}  // namespace jcgrav
