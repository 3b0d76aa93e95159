#pragma once

// Closed-form solution of the gravitationally chirped Jaynes-Cummings model:
// Doppler/gravity detunings, the phase integrals E+ and E-, the branch
// coefficients a_n and b_n and the branch states built from them.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "jcgrav/core.hpp"
#include "jcgrav/quadrature.hpp"
#include "jcgrav/special_functions.hpp"

namespace jcgrav {

inline constexpr cplx kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Detunings

/// Delta0(p) = Delta0 - q p_phys / 2M, rad/s.
inline double detuning0_of_p(double p, const PhysicalParams& params) {
  return params.delta0 - p * params.p_unit * params.omega_rec;
}

/// Delta1(p, t) = Delta0(p) - (q.g) t / 2, rad/s.
inline double detuning1(double p, double t, const PhysicalParams& params) {
  return detuning0_of_p(p, params) - 0.5 * params.qg * t;
}

/// t * Delta1(p, t) = Delta0(p) t - (q.g) t^2 / 2: the interaction-picture phase.
inline double chirp_phase(double p, double t, const PhysicalParams& params) {
  return detuning0_of_p(p, params) * t - 0.5 * params.qg * t * t;
}

// ---------------------------------------------------------------------------
// Phase integrals

/// E+ = int_0^t exp(+i phase(t')) dt' and E- with the opposite sign, in seconds.
struct PhaseIntegrals {
  cplx e_plus{0.0, 0.0};
  cplx e_minus{0.0, 0.0};
};

/// Unchirped integral (exp(i Delta t) - 1) / (i Delta), with the Delta -> 0 limit t.
inline PhaseIntegrals phase_integral_unchirped(double delta, double t) {
  if (delta == 0.0) return {{t, 0.0}, {t, 0.0}};
  const double x = delta * t;
  const double s = std::sin(0.5 * x);
  // exp(ix) - 1 = -2 sin^2(x/2) + i sin x, divided by i delta.
  const cplx ep{std::sin(x) / delta, 2.0 * s * s / delta};
  return {ep, std::conj(ep)};
}

/// Adaptive-quadrature oracle for E+ and E-; absolute tolerance rel_tol * t.
inline PhaseIntegrals phase_integral_quadrature(double p, double t, const PhysicalParams& params,
                                                double rel_tol = 1e-12) {
  if (!(t >= 0.0)) throw DomainError("phase_integral_quadrature: t >= 0 required");
  if (t == 0.0) return {};
  const double delta = detuning0_of_p(p, params);
  const double qg = params.qg;
  auto phase = [&](double s) { return delta * s - 0.5 * qg * s * s; };
  // Start with roughly one panel per half oscillation of the integrand.
  const double max_rate = std::abs(delta) + qg * t;
  const auto panels = static_cast<std::size_t>(std::min(1e5, std::ceil(max_rate * t / std::numbers::pi))) + 1;
  const double tol = rel_tol * t;
  auto plus = integrate_adaptive([&](double s) { return std::polar(1.0, phase(s)); }, 0.0, t, tol, panels);
  auto minus = integrate_adaptive([&](double s) { return std::polar(1.0, -phase(s)); }, 0.0, t, tol, panels);
  return {plus.value, minus.value};
}

/// Branch constants appearing in the Erf representation of E+-:
/// (-1)^(3/4) = exp(3 i pi/4) and i (-1)^(3/4) = exp(5 i pi/4), principal values.
enum class Rotation { cube_root_minus_one, i_cube_root_minus_one };

inline cplx rotation_value(Rotation r) {
  const double h = std::numbers::sqrt2 / 2.0;
  return r == Rotation::cube_root_minus_one ? cplx{-h, h} : cplx{-h, -h};
}

/// One sign/branch variant of
///   pref * sqrt(pi/qg) * exp(s i Delta^2 / 2qg) *
///     ( -Erf[r1 Delta/sqrt(2qg)] + Erf[r2 (Delta/sqrt(2qg) - sqrt(qg/2) t)] ),
/// with pref = (1 -+ i)/2 for E+ and E- respectively.
struct ErfVariant {
  int exp_sign;  // +1 or -1
  Rotation first;
  Rotation second;

  bool operator==(const ErfVariant&) const = default;
};

inline std::string describe(const ErfVariant& v) {
  auto r = [](Rotation x) { return x == Rotation::cube_root_minus_one ? "(-1)^(3/4)" : "i(-1)^(3/4)"; };
  return std::string("exp(") + (v.exp_sign > 0 ? "+" : "-") + "i D^2/2qg) [-Erf(" + r(v.first) + " a) + Erf(" +
         r(v.second) + " (a - b t))]";
}

/// All eight variants, in a fixed order.
inline std::array<ErfVariant, 8> all_erf_variants() {
  std::array<ErfVariant, 8> out{};
  std::size_t i = 0;
  for (int s : {-1, +1})
    for (auto r1 : {Rotation::cube_root_minus_one, Rotation::i_cube_root_minus_one})
      for (auto r2 : {Rotation::cube_root_minus_one, Rotation::i_cube_root_minus_one}) out[i++] = {s, r1, r2};
  return out;
}

/// Variants as printed in the source derivation.
inline constexpr ErfVariant kPrintedPlus{-1, Rotation::i_cube_root_minus_one, Rotation::cube_root_minus_one};
inline constexpr ErfVariant kPrintedMinus{+1, Rotation::i_cube_root_minus_one, Rotation::i_cube_root_minus_one};

/// Variants selected by the branch audit against the quadrature oracle
/// (`jcgrav audit-branches`). Each differs from the printed form.
inline constexpr ErfVariant kAuditedPlus{+1, Rotation::i_cube_root_minus_one, Rotation::i_cube_root_minus_one};
inline constexpr ErfVariant kAuditedMinus{-1, Rotation::cube_root_minus_one, Rotation::cube_root_minus_one};

/// Direct evaluation of one Erf variant. Accurate only while Delta^2/2qg is
/// moderate (the exp and Erf phases are computed separately); use
/// phase_integral_closed for production work.
inline cplx erf_form(bool plus, const ErfVariant& v, double delta, double qg, double t) {
  if (!(qg > 0.0)) throw DomainError("erf_form: qg > 0 required");
  const cplx pref = plus ? cplx{0.5, -0.5} : cplx{0.5, 0.5};
  const double a = delta / std::sqrt(2.0 * qg);
  const double b = std::sqrt(0.5 * qg);
  const cplx phase = std::polar(1.0, v.exp_sign * delta * delta / (2.0 * qg));
  const cplx bracket = -erf_complex(rotation_value(v.first) * a) + erf_complex(rotation_value(v.second) * (a - b * t));
  return pref * std::sqrt(std::numbers::pi / qg) * phase * bracket;
}

/// The same variant, with every Erf written as sigma (1 - exp(-z^2) w(i sigma z)),
/// sigma = sign Re z, and the exp(s i Delta^2/2qg) prefactor merged with
/// exp(-z^2) before exponentiating. Phases that cancel analytically are formed
/// as bt (2a - bt), so the result keeps full precision where the variant is
/// the right one.
inline cplx erf_form_stable(bool plus, const ErfVariant& v, double delta, double qg, double t) {
  if (!(qg > 0.0)) throw DomainError("erf_form_stable: qg > 0 required");
  const cplx pref = plus ? cplx{0.5, -0.5} : cplx{0.5, 0.5};
  const double a = delta / std::sqrt(2.0 * qg);
  const double b = std::sqrt(0.5 * qg);
  const double s = v.exp_sign;
  const double big = a * a;
  // exp(-z^2) = exp(i k x^2) for z = r x: k = +1 for (-1)^(3/4), -1 for i(-1)^(3/4).
  auto k_of = [](Rotation r) { return r == Rotation::cube_root_minus_one ? 1.0 : -1.0; };
  auto term = [&](Rotation r, double x, double merged_phase) {
    const cplx z = rotation_value(r) * x;
    const double sigma = z.real() >= 0.0 ? 1.0 : -1.0;
    const cplx wz = faddeeva(cplx{0.0, sigma} * z);
    return sigma * (std::polar(1.0, s * big) - std::polar(1.0, merged_phase) * wz);
  };
  const double k1 = k_of(v.first);
  const double k2 = k_of(v.second);
  const double x2 = a - b * t;
  const double phase1 = (s + k1) * big;
  const double phase2 = (k2 == -s) ? s * (b * t) * (2.0 * a - b * t) : s * big + k2 * x2 * x2;
  // The constant parts exp(s i a^2) cancel between terms with equal sigma.
  const cplx z1 = rotation_value(v.first) * a;
  const cplx z2 = rotation_value(v.second) * x2;
  const double sig1 = z1.real() >= 0.0 ? 1.0 : -1.0;
  const double sig2 = z2.real() >= 0.0 ? 1.0 : -1.0;
  cplx bracket;
  if (sig1 == sig2) {
    const cplx w1 = faddeeva(cplx{0.0, sig1} * z1);
    const cplx w2 = faddeeva(cplx{0.0, sig2} * z2);
    bracket = sig1 * (std::polar(1.0, phase1) * w1 - std::polar(1.0, phase2) * w2);
  } else {
    bracket = -term(v.first, a, phase1) + term(v.second, x2, phase2);
  }
  return pref * std::sqrt(std::numbers::pi / qg) * bracket;
}

/// Closed form of E+- for qg > 0.
///
/// This is the audited Erf variant rewritten with w(z) = exp(-z^2) erfc(-iz):
///   E+ = (1-i)/2 sqrt(pi/qg) [exp(i phase(t)) w(z1) - w(z0)],
///   z0 = exp(3i pi/4) a,  z1 = exp(3i pi/4) (a - b t),
/// where the exp(i Delta^2/2qg) factor cancels analytically, so the result
/// stays accurate for arbitrarily small qg. For a < 0 the reflected pair
/// w(-z0) - exp(i phase) w(-z1) is used so z0 is never reflected.
inline PhaseIntegrals phase_integral_closed(double p, double t, const PhysicalParams& params) {
  const double qg = params.qg;
  if (!(qg > 0.0)) throw DomainError("phase_integral_closed: qg > 0 required (use phase_integral_unchirped)");
  if (!(t >= 0.0)) throw DomainError("phase_integral_closed: t >= 0 required");
  if (t == 0.0) return {};
  const double delta = detuning0_of_p(p, params);
  const double a = delta / std::sqrt(2.0 * qg);
  const double b = std::sqrt(0.5 * qg);
  const cplx rot = rotation_value(Rotation::cube_root_minus_one);
  const cplx z0 = rot * a;
  const cplx z1 = rot * (a - b * t);
  const cplx ph = std::polar(1.0, chirp_phase(p, t, params));
  cplx bracket;
  if (a < 0.0) {
    bracket = faddeeva(-z0) - ph * faddeeva(-z1);
  } else if (a - b * t >= 0.0) {
    bracket = ph * faddeeva(z1) - faddeeva(z0);
  } else {
    // Past the stationary point z1 leaves the upper half plane. Reflect with
    // w(z) = 2 exp(-z^2) - w(-z); the phase of exp(-z1^2) cancels the chirp
    // phase exactly, leaving exp(i a^2).
    bracket = 2.0 * std::polar(1.0, a * a) - ph * faddeeva(-z1) - faddeeva(z0);
  }
  const cplx ep = cplx{0.5, -0.5} * std::sqrt(std::numbers::pi / qg) * bracket;
  return {ep, std::conj(ep)};
}

/// E+- by the best available route: 0 at t = 0, elementary at qg = 0, closed form otherwise.
inline PhaseIntegrals phase_integrals(double p, double t, const PhysicalParams& params) {
  if (t == 0.0) return {};
  if (params.qg == 0.0) return phase_integral_unchirped(detuning0_of_p(p, params), t);
  return phase_integral_closed(p, t, params);
}

// ---------------------------------------------------------------------------
// Branch audit

struct VariantResidual {
  ErfVariant variant;
  double max_rel_residual;  // +inf when an evaluation overflowed
};

struct AuditLattice {
  std::vector<double> momenta{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<double> qg{0.5e7, 1.0e7, 1.5e7};
  std::vector<double> lambda_t{0.5, 3.0, kHalfRevivalLambdaT, 17.0, 25.0};
};

struct BranchAuditReport {
  std::array<VariantResidual, 8> plus;
  std::array<VariantResidual, 8> minus;
  ErfVariant best_plus;
  ErfVariant best_minus;
  double best_plus_residual;
  double best_minus_residual;
  std::size_t points;
};

class NoVariantMatchError : public Error {
 public:
  NoVariantMatchError(const std::string& what, BranchAuditReport report) : Error(what), report_(std::move(report)) {}
  const BranchAuditReport& report() const noexcept { return report_; }

 private:
  BranchAuditReport report_;
};

/// Evaluates every Erf variant of E+ and E- against the quadrature oracle on
/// the lattice. Throws NoVariantMatchError when the best residual exceeds
/// `match_threshold`. Lattice entries with qg <= 0 are skipped.
inline BranchAuditReport audit_branches(const PhysicalParams& base, const AuditLattice& lattice = {},
                                        double match_threshold = 1e-6) {
  const auto variants = all_erf_variants();
  BranchAuditReport rep{};
  for (std::size_t i = 0; i < 8; ++i) {
    rep.plus[i] = {variants[i], 0.0};
    rep.minus[i] = {variants[i], 0.0};
  }
  const double lam = base.lambda > 0.0 ? base.lambda : ReferenceConstants::lambda;
  std::size_t points = 0;
  for (double qg : lattice.qg) {
    if (!(qg > 0.0)) continue;
    PhysicalParams pp = base;
    pp.qg = qg;
    for (double p : lattice.momenta) {
      const double delta = detuning0_of_p(p, pp);
      for (double lt : lattice.lambda_t) {
        const double t = lt / lam;
        const auto ref = phase_integral_quadrature(p, t, pp, 1e-13);
        ++points;
        for (std::size_t i = 0; i < 8; ++i) {
          auto eval = [&](bool plus, const cplx& expect) {
            try {
              return std::abs(erf_form_stable(plus, variants[i], delta, qg, t) - expect) / std::abs(expect);
            } catch (const OverflowError&) {
              return std::numeric_limits<double>::infinity();
            }
          };
          rep.plus[i].max_rel_residual = std::max(rep.plus[i].max_rel_residual, eval(true, ref.e_plus));
          rep.minus[i].max_rel_residual = std::max(rep.minus[i].max_rel_residual, eval(false, ref.e_minus));
        }
      }
    }
  }
  rep.points = points;
  auto best = [](const std::array<VariantResidual, 8>& r) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < 8; ++i)
      if (r[i].max_rel_residual < r[b].max_rel_residual) b = i;
    return r[b];
  };
  const auto bp = best(rep.plus);
  const auto bm = best(rep.minus);
  rep.best_plus = bp.variant;
  rep.best_minus = bm.variant;
  rep.best_plus_residual = bp.max_rel_residual;
  rep.best_minus_residual = bm.max_rel_residual;
  if (points == 0) throw DomainError("audit_branches: lattice has no point with qg > 0");
  if (rep.best_plus_residual > match_threshold || rep.best_minus_residual > match_threshold)
    throw NoVariantMatchError("audit_branches: no Erf variant reproduces the quadrature (best residuals " +
                                  std::to_string(rep.best_plus_residual) + ", " +
                                  std::to_string(rep.best_minus_residual) + ")",
                              rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Branch coefficients

/// How E+- enter a_n, b_n and the branch-state phase.
///
/// Restored (default): every E is multiplied by lambda, so a_n, b_n and the
/// phase (i/2) lambda E+ sqrt(n+1) are dimensionless. Printed: the formulas are
/// used exactly as written with E in seconds.
struct AnalyticOptions {
  bool literal_paper_mode = false;
  // Take E+- from the quadrature oracle instead of the closed form (used when
  // the branch audit finds no matching variant).
  bool use_quadrature = false;
  double quad_rel_tol = 1e-12;

  double e_scale(const PhysicalParams& p) const { return literal_paper_mode ? 1.0 : p.lambda; }
};

struct BranchCoeffs {
  cplx a_n;
  cplx b_n;
  cplx eta;  // -i E+ E-^2 (scaled)
  cplx xi;   // 1 + 1/eta; infinite when eta = 0
};

/// a_n = 1 - i(n+1) E+ E-^2, b_n = i(n+1) E+ E-^2 with E scaled by `e_scale`.
inline BranchCoeffs branch_coeffs(std::size_t n, const PhaseIntegrals& e, double e_scale) {
  const cplx ep = e_scale * e.e_plus;
  const cplx em = e_scale * e.e_minus;
  const cplx prod = ep * em * em;
  BranchCoeffs c{};
  c.b_n = kI * static_cast<double>(n + 1) * prod;
  c.a_n = 1.0 - c.b_n;
  c.eta = -kI * prod;
  c.xi = (c.eta == cplx{0.0, 0.0}) ? cplx{std::numeric_limits<double>::infinity(), 0.0} : 1.0 + 1.0 / c.eta;
  return c;
}

inline BranchCoeffs branch_coeffs(std::size_t n, const PhaseIntegrals& e, const PhysicalParams& params,
                                  const AnalyticOptions& opt = {}) {
  return branch_coeffs(n, e, opt.e_scale(params));
}

/// 1 + (shift - mean) / (2 mean): the first-order expansion of sqrt(shift/mean).
inline cplx expansion_bracket(cplx shift, double mean) { return 1.0 + (shift - mean) / (2.0 * mean); }

struct ApproxCoeffs {
  cplx sqrt_a;  // sqrt(a'_n)
  cplx sqrt_b;  // sqrt(b'_n)
  bool outside_validity;  // |alpha|^2 < 10
};

/// Large-|alpha| approximation of sqrt(a_n) and sqrt(b_n) around n = |alpha|^2.
inline ApproxCoeffs approx_coeffs(double n, const PhaseIntegrals& e, cplx alpha, double e_scale) {
  const double mean = std::norm(alpha);
  if (!(mean > 0.0)) throw DomainError("approx_coeffs: |alpha|^2 > 0 required");
  const BranchCoeffs c = branch_coeffs(0, e, e_scale);
  ApproxCoeffs r{};
  r.sqrt_a = std::sqrt(c.eta * mean) * expansion_bracket(n + c.xi, mean);
  r.sqrt_b = std::sqrt(-c.eta * mean) * expansion_bracket(cplx{n + 1.0, 0.0}, mean);
  r.outside_validity = mean < 10.0;
  return r;
}

// ---------------------------------------------------------------------------
// Branch states

/// C_n(p_k) = w_n sqrt(a_n) exp((i/2) s E+ sqrt(n+1)),
/// D_n(p_k) = w_{n-1} sqrt(b_n) exp((i/2) s E+ sqrt(n)), D_0 = 0,
/// with s the E scale of `opt` and principal square roots.
inline BranchState branch_states_analytic(double t, const PhysicalParams& params, const CoherentField& field,
                                          const MomentumGrid& grid, const AnalyticOptions& opt = {}) {
  if (!(t >= 0.0)) throw DomainError("branch_states_analytic: t >= 0 required");
  const std::size_t dim = branch_dim(field);
  BranchState st(t, grid, dim);
  const double s = opt.e_scale(params);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PhaseIntegrals e = opt.use_quadrature ? phase_integral_quadrature(grid.nodes[k], t, params, opt.quad_rel_tol)
                                                : phase_integrals(grid.nodes[k], t, params);
    const cplx half_phase = 0.5 * kI * s * e.e_plus;
    for (std::size_t n = 0; n < dim; ++n) {
      const BranchCoeffs c = branch_coeffs(n, e, s);
      if (n <= field.nmax)
        st.C(k, n) = field.w[n] * std::sqrt(c.a_n) * std::exp(half_phase * std::sqrt(static_cast<double>(n + 1)));
      if (n >= 1 && n - 1 <= field.nmax)
        st.D(k, n) = field.w[n - 1] * std::sqrt(c.b_n) * std::exp(half_phase * std::sqrt(static_cast<double>(n)));
    }
  }
  return st;
}

}  // namespace jcgrav
