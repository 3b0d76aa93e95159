#pragma once

// Direct integration of the two-level blocks {|e,n>, |g,n+1>} of the chirped
// Jaynes-Cummings Hamiltonian, one momentum node at a time.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jcgrav/analytic.hpp"
#include "jcgrav/core.hpp"
#include "jcgrav/dop853_tableau.hpp"

namespace jcgrav {

// ---------------------------------------------------------------------------
// DOP853

struct Dop853Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace detail {

template <std::size_t D>
double rms_scaled(const std::array<double, D>& v, const std::array<double, D>& scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double x = v[i] / scale[i];
    s += x * x;
  }
  return std::sqrt(s / static_cast<double>(D));
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 with the explicit Dormand-Prince 8(5,3)
/// pair and calls observe(i, y) at each t_out[i] (ascending, >= t0). Steps are
/// shortened to land exactly on output times. Error control follows Hairer's
/// DOP853: mixed 5th/3rd order estimate, scale atol + rtol max(|y|, |y_new|).
///
/// Throws IntegrationError on step-size underflow or after max_steps steps.
template <std::size_t D, class Rhs, class Observer>
Dop853Stats dop853_integrate(Rhs&& f, double t0, std::array<double, D> y, std::span<const double> t_out,
                             double rtol, double atol, Observer&& observe, std::size_t max_steps = 10'000'000) {
  namespace tab = detail::dop853;
  using State = std::array<double, D>;
  constexpr double kSafety = 0.9;
  constexpr double kMinFactor = 0.2;
  constexpr double kMaxFactor = 10.0;
  constexpr double kExponent = -1.0 / 8.0;

  Dop853Stats stats;
  if (t_out.empty()) return stats;
  if (!(rtol > 0.0) || !(atol > 0.0)) throw DomainError("dop853_integrate: tolerances must be positive");
  for (std::size_t i = 0; i < t_out.size(); ++i) {
    if (!(t_out[i] >= (i == 0 ? t0 : t_out[i - 1])))
      throw DomainError("dop853_integrate: output times must be ascending and >= t0");
  }

  auto eval = [&](double t, const State& s) {
    ++stats.evaluations;
    return f(t, s);
  };

  double t = t0;
  std::size_t next = 0;
  while (next < t_out.size() && t_out[next] == t0) observe(next++, y);
  if (next == t_out.size()) return stats;

  State f0 = eval(t, y);
  State scale;
  for (std::size_t i = 0; i < D; ++i) scale[i] = atol + rtol * std::abs(y[i]);

  // Initial step (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    const double d0 = detail::rms_scaled(y, scale);
    const double d1 = detail::rms_scaled(f0, scale);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * (t_out.back() - t0) : 0.01 * d0 / d1;
    State y1;
    for (std::size_t i = 0; i < D; ++i) y1[i] = y[i] + h0 * f0[i];
    const State f1 = eval(t + h0, y1);
    State df;
    for (std::size_t i = 0; i < D; ++i) df[i] = f1[i] - f0[i];
    const double d2 = detail::rms_scaled(df, scale) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6 * (t_out.back() - t0), h0 * 1e-3)
                                                    : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
    h = std::min({100.0 * h0, h1, t_out.back() - t0});
  }

  std::array<State, tab::kC.size()> k;
  bool rejected_last = false;
  while (next < t_out.size()) {
    if (stats.accepted + stats.rejected >= max_steps)
      throw IntegrationError("dop853_integrate: step budget of " + std::to_string(max_steps) + " exhausted", t);
    const double min_step = 10.0 * std::abs(std::nextafter(t, std::numeric_limits<double>::infinity()) - t);
    if (h < min_step) throw IntegrationError("dop853_integrate: step size underflow", t);

    const double target = t_out[next];
    const double natural = h;
    bool truncated = false;
    if (t + h >= target) {
      h = target - t;
      truncated = true;
    }

    k[0] = f0;
    for (std::size_t s = 1; s < tab::kC.size(); ++s) {
      State ys = y;
      for (std::size_t j = 0; j < s; ++j) {
        const double a = tab::kA[s][j];
        if (a == 0.0) continue;
        for (std::size_t i = 0; i < D; ++i) ys[i] += h * a * k[j][i];
      }
      k[s] = eval(t + tab::kC[s] * h, ys);
    }
    State y_new = y;
    State err5{}, err3{};
    for (std::size_t j = 0; j < tab::kC.size(); ++j) {
      for (std::size_t i = 0; i < D; ++i) {
        y_new[i] += h * tab::kB[j] * k[j][i];
        err5[i] += tab::kE5[j] * k[j][i];
        err3[i] += tab::kE3[j] * k[j][i];
      }
    }
    for (std::size_t i = 0; i < D; ++i) scale[i] = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    double e5 = 0.0, e3 = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      e5 += (err5[i] / scale[i]) * (err5[i] / scale[i]);
      e3 += (err3[i] / scale[i]) * (err3[i] / scale[i]);
    }
    double err_norm = 0.0;
    if (e5 > 0.0 || e3 > 0.0) err_norm = h * e5 / std::sqrt((e5 + 0.01 * e3) * static_cast<double>(D));

    if (err_norm < 1.0) {
      double factor = err_norm == 0.0 ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err_norm, kExponent));
      if (rejected_last) factor = std::min(1.0, factor);
      const double proposal = h * factor;
      t = truncated ? target : t + h;
      y = y_new;
      f0 = eval(t, y);
      ++stats.accepted;
      // A step cut short to hit an output time says little about the natural size.
      h = (truncated && !rejected_last) ? std::max(proposal, natural) : proposal;
      rejected_last = false;
      while (next < t_out.size() && t_out[next] == t) observe(next++, y);
    } else {
      h *= std::max(kMinFactor, kSafety * std::pow(err_norm, kExponent));
      rejected_last = true;
      ++stats.rejected;
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Two-level blocks

/// Excited amplitude of |e,n> and ground amplitude of |g,n+1>.
struct BlockAmplitudes {
  cplx c_e{1.0, 0.0};
  cplx c_g{0.0, 0.0};
};

/// Literal: i c_e' = kappa exp(i phase) c_g with phase = Delta0(p) t - qg t^2/2.
/// Rotating: amplitudes c_e = exp(i phase/2) a, c_g = exp(-i phase/2) b, for
/// which the coupling matrix has no oscillating entries.
enum class Frame { rotating, literal };

inline const char* to_string(Frame f) { return f == Frame::rotating ? "rotating" : "literal"; }

inline constexpr double kMinOdeTolerance = 1e-12;
inline constexpr double kMaxOdeTolerance = 1e-6;

struct OdeOptions {
  double tol = 1e-10;
  Frame frame = Frame::rotating;
  // Loosen the tolerance of block n to tol/|w_n| (within [tol, 1e-6]), since its
  // contribution to every observable carries the weight |w_n|^2.
  bool weight_scaled_tolerance = true;
  std::size_t max_steps = 10'000'000;
};

inline void check_ode_tolerance(double tol) {
  if (!(tol >= kMinOdeTolerance && tol <= kMaxOdeTolerance))
    throw DomainError("ODE tolerance must lie in [1e-12, 1e-6], got " + std::to_string(tol));
}

/// Amplitudes of block n at every time in `times` (seconds, ascending, >= 0),
/// starting from |e,n> at t = 0.
inline std::vector<BlockAmplitudes> evolve_block_series(std::size_t n, double p, std::span<const double> times,
                                                        const PhysicalParams& params, double tol,
                                                        Frame frame = Frame::rotating, Dop853Stats* stats = nullptr,
                                                        std::size_t max_steps = 10'000'000) {
  check_ode_tolerance(tol);
  const double kappa = params.lambda * std::sqrt(static_cast<double>(n + 1));
  const double delta = detuning0_of_p(p, params);
  const double qg = params.qg;
  std::vector<BlockAmplitudes> out(times.size());
  using State = std::array<double, 4>;  // Re/Im of the two amplitudes
  const State y0{1.0, 0.0, 0.0, 0.0};
  Dop853Stats st;
  if (kappa == 0.0) {
    // Uncoupled: the amplitudes never move.
    for (auto& o : out) o = {};
  } else if (frame == Frame::literal) {
    auto rhs = [&](double t, const State& y) {
      const double ph = delta * t - 0.5 * qg * t * t;
      const double c = std::cos(ph), s = std::sin(ph);
      // c_e' = -i kappa e^{i ph} c_g ; c_g' = -i kappa e^{-i ph} c_e
      const double gr = c * y[2] - s * y[3], gi = s * y[2] + c * y[3];
      const double er = c * y[0] + s * y[1], ei = c * y[1] - s * y[0];
      return State{kappa * gi, -kappa * gr, kappa * ei, -kappa * er};
    };
    st = dop853_integrate<4>(
        rhs, 0.0, y0, times, tol, tol,
        [&](std::size_t i, const State& y) { out[i] = {{y[0], y[1]}, {y[2], y[3]}}; }, max_steps);
  } else {
    auto rhs = [&](double t, const State& y) {
      const double h = 0.5 * (delta - qg * t);
      // a' = -i (h a + kappa b) ; b' = -i (kappa a - h b)
      const double ur = h * y[0] + kappa * y[2], ui = h * y[1] + kappa * y[3];
      const double vr = kappa * y[0] - h * y[2], vi = kappa * y[1] - h * y[3];
      return State{ui, -ur, vi, -vr};
    };
    st = dop853_integrate<4>(
        rhs, 0.0, y0, times, tol, tol,
        [&](std::size_t i, const State& y) {
          const cplx rot = std::polar(1.0, 0.5 * (delta * times[i] - 0.5 * qg * times[i] * times[i]));
          out[i] = {rot * cplx{y[0], y[1]}, std::conj(rot) * cplx{y[2], y[3]}};
        },
        max_steps);
  }
  if (stats) {
    stats->accepted += st.accepted;
    stats->rejected += st.rejected;
    stats->evaluations += st.evaluations;
  }
  return out;
}

/// Amplitudes of block n at time t.
inline BlockAmplitudes evolve_block(std::size_t n, double p, double t, const PhysicalParams& params, double tol,
                                    Frame frame = Frame::rotating) {
  const double ts[1] = {t};
  return evolve_block_series(n, p, ts, params, tol, frame).front();
}

/// Tolerance actually used for block n.
inline double block_tolerance(const OdeOptions& opt, cplx w_n) {
  if (!opt.weight_scaled_tolerance) return opt.tol;
  const double m = std::abs(w_n);
  if (m == 0.0) return kMaxOdeTolerance;
  return std::clamp(opt.tol / m, opt.tol, kMaxOdeTolerance);
}

/// Branch states at time t from direct integration of every block and node.
/// Blocks with w_n = 0 are skipped (their amplitudes stay zero).
inline BranchState branch_states_ode(double t, const PhysicalParams& params, const CoherentField& field,
                                     const MomentumGrid& grid, const OdeOptions& opt = {},
                                     Dop853Stats* stats = nullptr) {
  if (!(t >= 0.0)) throw DomainError("branch_states_ode: t >= 0 required");
  check_ode_tolerance(opt.tol);
  BranchState st(t, grid, branch_dim(field));
  const double ts[1] = {t};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t n = 0; n <= field.nmax; ++n) {
      if (field.w[n] == cplx{0.0, 0.0}) continue;
      const auto amp = evolve_block_series(n, grid.nodes[k], ts, params, block_tolerance(opt, field.w[n]), opt.frame,
                                           stats, opt.max_steps)
                           .front();
      st.C(k, n) = field.w[n] * amp.c_e;
      st.D(k, n + 1) = field.w[n] * amp.c_g;
    }
  }
  return st;
}

}  // namespace jcgrav
