#pragma once

// Observables of a branch state: inversion, field entropy, Husimi Q function
// with peak analysis, and the factored cat-state fidelity. Momentum enters
// incoherently: every quantity is quadratic per node and then weighted by w_k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "jcgrav/core.hpp"
#include "jcgrav/parallel.hpp"

namespace jcgrav {

// ---------------------------------------------------------------------------
// Overlaps, inversion, entropy

struct OverlapTriple {
  double cc = 0.0;  // <C|C>
  double dd = 0.0;  // <D|D>
  cplx cd{0.0, 0.0};  // <C|D>
};

namespace detail {

/// Unweighted overlaps of one node. C and D are indexed by Fock level, so
/// <C|D> pairs equal photon numbers: C_{n+1}^* with the ground-branch
/// amplitude grown from w_n.
inline OverlapTriple node_overlaps(std::span<const cplx> c, std::span<const cplx> d) {
  OverlapTriple o;
  for (std::size_t n = 0; n < c.size(); ++n) {
    o.cc += std::norm(c[n]);
    o.dd += std::norm(d[n]);
    o.cd += std::conj(c[n]) * d[n];
  }
  return o;
}

inline void accumulate(OverlapTriple& total, double weight, const OverlapTriple& node) {
  total.cc += weight * node.cc;
  total.dd += weight * node.dd;
  total.cd += weight * node.cd;
}

}  // namespace detail

inline OverlapTriple overlaps(const BranchState& state) {
  OverlapTriple o;
  for (std::size_t k = 0; k < state.nodes(); ++k)
    detail::accumulate(o, state.grid.weights[k], detail::node_overlaps(state.C_row(k), state.D_row(k)));
  return o;
}

/// W = <C|C> - <D|D>.
inline double inversion(const OverlapTriple& o) { return o.cc - o.dd; }

/// Overlaps divided by cc + dd.
inline OverlapTriple renormalize(const OverlapTriple& o) {
  const double s = o.cc + o.dd;
  if (!(s > 0.0)) throw InconsistentStateError("renormalize: cc + dd must be positive");
  return {o.cc / s, o.dd / s, o.cd / s};
}

inline constexpr double kNormSlack = 1e-3;
inline constexpr double kDiscriminantSlack = 1e-9;

struct EntropyPair {
  double pi_plus = 1.0;
  double pi_minus = 0.0;
  double s_f = 0.0;  // nats
};

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Eigenvalues of the reduced field (equivalently atomic) density matrix and
/// the von Neumann entropy. Overlaps are renormalized when cc + dd is within
/// 1e-3 of 1.
inline EntropyPair entropy(const OverlapTriple& raw) {
  const double s = raw.cc + raw.dd;
  if (!(std::abs(s - 1.0) <= kNormSlack))
    throw InconsistentStateError("entropy: cc + dd = " + std::to_string(s) + " is not within 1e-3 of 1");
  const OverlapTriple o = renormalize(raw);
  double disc = 1.0 - 4.0 * (o.cc * o.dd - std::norm(o.cd));
  if (disc < -kDiscriminantSlack || disc > 1.0 + kDiscriminantSlack)
    throw InconsistentStateError("entropy: discriminant " + std::to_string(disc) + " outside [0, 1]");
  disc = std::clamp(disc, 0.0, 1.0);
  const double r = std::sqrt(disc);
  EntropyPair e;
  e.pi_plus = 0.5 + 0.5 * r;
  e.pi_minus = 0.5 - 0.5 * r;
  e.s_f = -xlogx(e.pi_plus) - xlogx(e.pi_minus);
  e.s_f = std::clamp(e.s_f, 0.0, std::numbers::ln2);
  return e;
}

/// Atomic reduced density matrix in the {|e>, |g>} basis.
struct AtomicMatrix {
  double ee, gg;
  cplx eg;  // <e|rho|g> = <D|C>
};

inline AtomicMatrix atomic_density_matrix(const OverlapTriple& o) { return {o.cc, o.dd, std::conj(o.cd)}; }

// ---------------------------------------------------------------------------
// Husimi Q function

struct QGridSpec {
  double extent = 9.0;  // square [-extent, extent]^2
  std::size_t n = 201;  // points per axis
};

inline constexpr double kQBoundaryThreshold = 1e-6;

struct QGrid {
  std::vector<double> x_axis;
  std::vector<double> y_axis;
  std::vector<double> values;  // values[iy * nx + ix], beta = x + i y
  double boundary_max = 0.0;

  std::size_t nx() const noexcept { return x_axis.size(); }
  std::size_t ny() const noexcept { return y_axis.size(); }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx() + ix]; }
  double dx() const { return nx() > 1 ? x_axis[1] - x_axis[0] : 0.0; }
  double dy() const { return ny() > 1 ? y_axis[1] - y_axis[0] : 0.0; }
  /// Q above 1e-6 on the border means the grid cuts off part of the distribution.
  bool boundary_leak() const { return boundary_max > kQBoundaryThreshold; }

  double riemann_sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * dx() * dy();
  }
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

/// <beta|n> = exp(-|beta|^2/2) conj(beta)^n / sqrt(n!), n = 0..dim-1.
inline void coherent_bra(cplx beta, std::span<cplx> out) {
  if (out.empty()) return;
  out[0] = std::exp(-0.5 * std::norm(beta));
  const cplx bc = std::conj(beta);
  for (std::size_t n = 1; n < out.size(); ++n) out[n] = out[n - 1] * bc / std::sqrt(static_cast<double>(n));
}

/// Q(beta) = (1/pi) sum_k w_k (|<beta|C_k>|^2 + |<beta|D_k>|^2) on a square grid.
inline QGrid q_function(const BranchState& state, const QGridSpec& spec = {},
                        std::size_t threads = default_thread_count()) {
  if (spec.n < 3) throw DomainError("q_function: at least 3 points per axis required");
  if (!(spec.extent > 0.0)) throw DomainError("q_function: extent > 0 required");
  QGrid g;
  g.x_axis = linspace(-spec.extent, spec.extent, spec.n);
  g.y_axis = g.x_axis;
  g.values.assign(spec.n * spec.n, 0.0);
  const std::size_t dim = state.dim;
  parallel_for(
      spec.n,
      [&](std::size_t iy) {
        std::vector<cplx> bra(dim);
        for (std::size_t ix = 0; ix < spec.n; ++ix) {
          coherent_bra({g.x_axis[ix], g.y_axis[iy]}, bra);
          double q = 0.0;
          for (std::size_t k = 0; k < state.nodes(); ++k) {
            const auto c = state.C_row(k);
            const auto d = state.D_row(k);
            cplx sc{0.0, 0.0}, sd{0.0, 0.0};
            for (std::size_t n = 0; n < dim; ++n) {
              sc += bra[n] * c[n];
              sd += bra[n] * d[n];
            }
            q += state.grid.weights[k] * (std::norm(sc) + std::norm(sd));
          }
          g.values[iy * spec.n + ix] = q / std::numbers::pi;
        }
      },
      threads);
  for (std::size_t i = 0; i < spec.n; ++i) {
    g.boundary_max = std::max({g.boundary_max, g.at(i, 0), g.at(i, spec.n - 1), g.at(0, i), g.at(spec.n - 1, i)});
  }
  return g;
}

struct QPeak {
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;
  double width = 0.0;  // FWHM from the local curvature (geometric mean of both axes)
};

struct PeakReport {
  std::vector<QPeak> peaks;  // by decreasing height
  double height_ratio = 0.0;  // second / first, when two or more peaks
  double separation = 0.0;    // distance of the two highest peaks
  double mean_width = 0.0;    // of the two highest peaks
  bool bimodal = false;
};

inline constexpr double kPeakFloor = 0.05;
inline constexpr double kBimodalHeightRatio = 0.5;
inline constexpr double kBimodalSeparationWidths = 2.0;

/// Local maxima above 5% of the global maximum (strictly above all eight
/// neighbours), refined by a parabola through three points along each axis.
/// Bimodal iff exactly two peaks, height ratio >= 0.5 and separation of at
/// least twice the mean width.
inline PeakReport q_peak_analysis(const QGrid& q) {
  PeakReport rep;
  const std::size_t nx = q.nx(), ny = q.ny();
  if (nx < 3 || ny < 3) return rep;
  const double gmax = *std::max_element(q.values.begin(), q.values.end());
  if (!(gmax > 0.0)) return rep;
  const double hx = q.dx(), hy = q.dy();
  const double fwhm_per_sigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);
  for (std::size_t iy = 1; iy + 1 < ny; ++iy) {
    for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
      const double f0 = q.at(ix, iy);
      if (f0 < kPeakFloor * gmax) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (!(f0 > q.at(ix + dx, iy + dy))) {
            is_max = false;
            break;
          }
        }
      if (!is_max) continue;
      const double xm = q.at(ix - 1, iy), xp = q.at(ix + 1, iy);
      const double ym = q.at(ix, iy - 1), yp = q.at(ix, iy + 1);
      const double cx = xm - 2.0 * f0 + xp;  // negative at a strict maximum
      const double cy = ym - 2.0 * f0 + yp;
      const double ox = cx < 0.0 ? 0.5 * (xm - xp) / cx : 0.0;
      const double oy = cy < 0.0 ? 0.5 * (ym - yp) / cy : 0.0;
      QPeak p;
      p.x = q.x_axis[ix] + ox * hx;
      p.y = q.y_axis[iy] + oy * hy;
      p.height = f0 - 0.25 * (xm - xp) * ox - 0.25 * (ym - yp) * oy;
      const double sx = cx < 0.0 ? std::sqrt(-f0 / (cx / (hx * hx))) : hx;
      const double sy = cy < 0.0 ? std::sqrt(-f0 / (cy / (hy * hy))) : hy;
      p.width = fwhm_per_sigma * std::sqrt(sx * sy);
      rep.peaks.push_back(p);
    }
  }
  std::stable_sort(rep.peaks.begin(), rep.peaks.end(),
                   [](const QPeak& a, const QPeak& b) { return a.height > b.height; });
  if (rep.peaks.size() >= 2) {
    const auto& a = rep.peaks[0];
    const auto& b = rep.peaks[1];
    rep.height_ratio = b.height / a.height;
    rep.separation = std::hypot(a.x - b.x, a.y - b.y);
    rep.mean_width = 0.5 * (a.width + b.width);
  }
  rep.bimodal = rep.peaks.size() == 2 && rep.height_ratio >= kBimodalHeightRatio &&
                rep.separation >= kBimodalSeparationWidths * rep.mean_width;
  return rep;
}

// ---------------------------------------------------------------------------
// Cat-state fidelity

struct CatFidelity {
  double weighted = 0.0;  // field factor proportional to sum n w_n |n>
  double coherent = 0.0;  // field factor proportional to sum w_n |n>
};

namespace detail {

inline double factored_fidelity(const BranchState& state, std::vector<cplx> f) {
  f.resize(state.dim, cplx{0.0, 0.0});
  double norm = 0.0;
  for (const auto& x : f) norm += std::norm(x);
  if (!(norm > 0.0)) throw DomainError("cat_fidelity: field factor vanishes");
  const double inv = 1.0 / std::sqrt(norm);
  double fid = 0.0;
  for (std::size_t k = 0; k < state.nodes(); ++k) {
    const auto c = state.C_row(k);
    const auto d = state.D_row(k);
    cplx fc{0.0, 0.0}, fd{0.0, 0.0};
    for (std::size_t n = 0; n < state.dim; ++n) {
      fc += std::conj(f[n]) * c[n];
      fd += std::conj(f[n]) * d[n];
    }
    // atomic factor (|e> + i|g>)/sqrt 2
    const cplx amp = (fc - cplx{0.0, 1.0} * fd) * (inv / std::numbers::sqrt2);
    fid += state.grid.weights[k] * std::norm(amp);
  }
  return std::clamp(fid, 0.0, 1.0);
}

}  // namespace detail

/// Fidelity of the momentum-traced state with (|e> + i|g>)/sqrt 2 times a
/// normalized field factor built from the initial amplitudes.
inline CatFidelity cat_fidelity(const BranchState& state, const CoherentField& field) {
  std::vector<cplx> weighted(field.w.size()), plain(field.w);
  for (std::size_t n = 0; n < field.w.size(); ++n) weighted[n] = static_cast<double>(n) * field.w[n];
  return {detail::factored_fidelity(state, std::move(weighted)), detail::factored_fidelity(state, std::move(plain))};
}

inline CatFidelity cat_fidelity(const BranchState& state, const PhysicalParams& params) {
  if (state.dim < 2) throw DomainError("cat_fidelity: branch state too small");
  return cat_fidelity(state, coherent_amplitudes(params.alpha, state.dim - 2));
}

// ---------------------------------------------------------------------------
// Collapse and revival

/// Oscillation envelope: for each sample, max |v - mean| over the samples within
/// a centred window of the given width (clipped at the ends of the sweep).
inline std::vector<double> oscillation_envelope(std::span<const double> x, std::span<const double> v,
                                                double width = 1.0) {
  if (x.size() != v.size()) throw DomainError("oscillation_envelope: size mismatch");
  const std::size_t n = x.size();
  std::vector<double> env(n, 0.0);
  std::size_t lo = 0, hi = 0;  // window [lo, hi)
  for (std::size_t i = 0; i < n; ++i) {
    while (lo < n && x[lo] < x[i] - 0.5 * width) ++lo;
    if (hi < lo) hi = lo;
    while (hi < n && x[hi] <= x[i] + 0.5 * width) ++hi;
    double mean = 0.0;
    for (std::size_t j = lo; j < hi; ++j) mean += v[j];
    mean /= static_cast<double>(hi - lo);
    double m = 0.0;
    for (std::size_t j = lo; j < hi; ++j) m = std::max(m, std::abs(v[j] - mean));
    env[i] = m;
  }
  return env;
}

struct CollapseRevival {
  double initial = 0.0;       // envelope at the first sample
  double collapse_at = -1.0;  // first x with envelope < collapse fraction of initial
  double revival_peak = 0.0;  // largest envelope after the collapse
  double revival_at = -1.0;
  bool collapsed = false;
  bool revived = false;
};

inline constexpr double kCollapseFraction = 0.25;
inline constexpr double kRevivalFraction = 0.5;

inline CollapseRevival analyse_collapse_revival(std::span<const double> x, std::span<const double> env) {
  CollapseRevival r;
  if (env.empty()) return r;
  r.initial = env[0];
  std::size_t i = 0;
  for (; i < env.size(); ++i)
    if (env[i] < kCollapseFraction * r.initial) break;
  if (i == env.size()) return r;
  r.collapsed = true;
  r.collapse_at = x[i];
  for (std::size_t j = i; j < env.size(); ++j)
    if (env[j] > r.revival_peak) {
      r.revival_peak = env[j];
      r.revival_at = x[j];
    }
  r.revived = r.revival_peak > kRevivalFraction * r.initial;
  return r;
}

/// Revival time of the gravity-free inversion in units of 1/lambda, and the
/// half width of the window used to measure revival contrast.
inline constexpr double kRevivalLambdaT = 7.0 * std::numbers::pi;
inline constexpr double kRevivalHalfWindow = 2.5;

/// Largest envelope value within |x - centre| <= half_width (clipped to the sweep).
inline double revival_contrast(std::span<const double> x, std::span<const double> env,
                               double centre = kRevivalLambdaT, double half_width = kRevivalHalfWindow) {
  double m = 0.0;
  const double lo = std::max(centre - half_width, x.empty() ? 0.0 : x.front());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= lo && x[i] <= centre + half_width) m = std::max(m, env[i]);
  return m;
}

}  // namespace jcgrav
