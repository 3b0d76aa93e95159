#pragma once

// Domain types shared by the analytic and ODE backends: physical parameters,
// the coherent initial field, the momentum quadrature and the branch-state
// container.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jcgrav/errors.hpp"

namespace jcgrav {

using cplx = std::complex<double>;

inline constexpr double kHbar = 1.054571817e-34;  // J s

/// Values of the reference experiment (q, M and g are kept for reporting;
/// the dynamics only sees omega_rec, lambda, delta0, sigma0 and alpha).
struct ReferenceConstants {
  static constexpr double q = 1e7;             // 1/m
  static constexpr double mass = 1e-26;        // kg
  static constexpr double g = 9.8;             // m/s^2
  static constexpr double omega_rec = 0.5e6;   // rad/s
  static constexpr double lambda = 1e6;        // rad/s
  static constexpr double sigma0 = 1.0;
  static constexpr double delta0 = 8.5e7;      // rad/s
  static constexpr double mean_photons = 25.0;
  static constexpr double qg_values[3] = {0.0, 0.5e7, 1.5e7};  // rad/s^2
};

/// Half-revival time of the gravity-free inversion, in units of 1/lambda.
inline constexpr double kHalfRevivalLambdaT = 3.5 * std::numbers::pi;

/// Experiment constants in SI-derived units.
///
/// Momentum enters only through its projection on the wave vector, as a
/// dimensionless scaled momentum p. The physical momentum is
/// p * p_unit * (hbar q), so the Doppler term q p_phys / 2M equals
/// p * p_unit * omega_rec.
struct PhysicalParams {
  std::optional<double> q;     // 1/m
  std::optional<double> mass;  // kg
  double qg = 0.0;             // rad/s^2
  double lambda = ReferenceConstants::lambda;
  double omega_rec = ReferenceConstants::omega_rec;
  double delta0 = ReferenceConstants::delta0;
  double sigma0 = ReferenceConstants::sigma0;
  cplx alpha{5.0, 0.0};
  double p_unit = 1.0;  // in units of one photon recoil hbar q

  /// hbar q^2 / 2M, when both q and mass are known.
  std::optional<double> recoil_from_q_and_mass() const {
    if (!q || !mass) return std::nullopt;
    return kHbar * (*q) * (*q) / (2.0 * (*mass));
  }

  bool operator==(const PhysicalParams&) const = default;
};

/// Throws DomainError naming the first violated invariant.
inline void validate(const PhysicalParams& p) {
  auto fail = [](const std::string& m) { throw DomainError("PhysicalParams: " + m); };
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) fail("lambda >= 0 violated");
  if (!(p.sigma0 > 0.0) || !std::isfinite(p.sigma0)) fail("sigma0 > 0 violated");
  if (!(p.qg >= 0.0) || !std::isfinite(p.qg)) fail("qg >= 0 violated");
  if (!std::isfinite(std::norm(p.alpha))) fail("|alpha|^2 must be finite");
  if (!std::isfinite(p.delta0)) fail("delta0 must be finite");
  if (!std::isfinite(p.omega_rec)) fail("omega_rec must be finite");
  if (!(p.p_unit > 0.0) || !std::isfinite(p.p_unit)) fail("p_unit > 0 violated");
  if (p.q && !(*p.q > 0.0)) fail("q > 0 violated");
  if (p.mass && !(*p.mass > 0.0)) fail("mass > 0 violated");
  if (auto rec = p.recoil_from_q_and_mass()) {
    const double rel = std::abs(p.omega_rec - *rec) / std::abs(*rec);
    if (rel > 1e-12)
      fail("omega_rec = hbar q^2 / 2M violated (relative mismatch " + std::to_string(rel) + ")");
  }
}

// ---------------------------------------------------------------------------
// Coherent field

inline constexpr double kTruncationEpsilon = 1e-12;

/// Initial Fock amplitudes w_n(0), n = 0..nmax.
struct CoherentField {
  std::size_t nmax = 0;
  std::vector<cplx> w;

  /// Arbitrary initial amplitudes (Fock states, test inputs). No normalization check.
  static CoherentField from_amplitudes(std::vector<cplx> amplitudes) {
    if (amplitudes.empty()) throw DomainError("CoherentField: need at least one amplitude");
    CoherentField f;
    f.nmax = amplitudes.size() - 1;
    f.w = std::move(amplitudes);
    return f;
  }

  double captured_mass() const {
    double s = 0.0;
    for (const auto& x : w) s += std::norm(x);
    return s;
  }
};

/// w_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), built by a log-domain recursion.
/// Throws TruncationError when sum |w_n|^2 < 1 - 1e-12.
inline CoherentField coherent_amplitudes(cplx alpha, std::size_t nmax) {
  CoherentField f;
  f.nmax = nmax;
  f.w.assign(nmax + 1, cplx{0.0, 0.0});
  const double mod = std::abs(alpha);
  if (mod == 0.0) {
    f.w[0] = 1.0;
  } else {
    const double log_mod = std::log(mod);
    const double phase = std::arg(alpha);
    double log_w = -0.5 * mod * mod;
    for (std::size_t n = 0; n <= nmax; ++n) {
      if (n > 0) log_w += log_mod - 0.5 * std::log(static_cast<double>(n));
      f.w[n] = std::polar(std::exp(log_w), phase * static_cast<double>(n));
    }
  }
  const double mass = f.captured_mass();
  if (mass < 1.0 - kTruncationEpsilon)
    throw TruncationError("coherent_amplitudes: nmax = " + std::to_string(nmax) +
                              " captures only " + std::to_string(mass) + " of the photon distribution",
                          mass);
  return f;
}

/// Smallest N whose Poisson tail beyond N is below 1e-12, never below 4|alpha|^2.
inline std::size_t adaptive_nmax(cplx alpha) {
  const double mean = std::norm(alpha);
  const auto floor_n = static_cast<std::size_t>(std::ceil(4.0 * mean));
  if (mean == 0.0) return floor_n;
  // Accumulate the Poisson mass in log space until the tail drops below epsilon.
  double log_p = -mean;
  double mass = 0.0;
  std::size_t n = 0;
  for (;; ++n) {
    if (n > 0) log_p += std::log(mean) - std::log(static_cast<double>(n));
    mass += std::exp(log_p);
    if (1.0 - mass < 0.5 * kTruncationEpsilon) break;
    if (n > 100000) throw TruncationError("adaptive_nmax: |alpha|^2 too large", mass);
  }
  return std::max(n, floor_n);
}

// ---------------------------------------------------------------------------
// Momentum grid

/// Gauss-Hermite rule for the weight exp(-x^2), ascending nodes.
/// Newton iteration on the orthonormal Hermite recurrence.
inline void gauss_hermite(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const std::size_t m = (n + 1) / 2;
  const double dn = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(dn, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (dj + 1.0)) * p2 - std::sqrt(dj / (dj + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;  // exact centre node
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
}

/// Quadrature for the centre-of-mass momentum distribution |phi(p)|^2 ∝ exp(-2p^2/sigma0^2).
struct MomentumGrid {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1

  std::size_t size() const noexcept { return nodes.size(); }
};

inline constexpr std::size_t kDefaultMomentumNodes = 32;

inline MomentumGrid build_momentum_grid(double sigma0, std::size_t n_nodes) {
  if (n_nodes < 1) throw DomainError("build_momentum_grid: n_nodes >= 1 required");
  if (!(sigma0 > 0.0)) throw DomainError("build_momentum_grid: sigma0 > 0 required");
  MomentumGrid g;
  std::vector<double> x, w;
  gauss_hermite(n_nodes, x, w);
  // exp(-2 p^2 / sigma0^2) = exp(-x^2) with p = sigma0 x / sqrt(2)
  const double scale = sigma0 / std::numbers::sqrt2;
  double total = 0.0;
  for (double wi : w) total += wi;
  g.nodes.resize(n_nodes);
  g.weights.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    g.nodes[i] = scale * x[i];
    g.weights[i] = w[i] / total;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Branch state

/// Per momentum node and Fock level amplitudes of the atom-excited branch
/// C_n(p_k) and the atom-ground branch D_n(p_k). Both arrays span Fock levels
/// 0..nmax+1 since the ground branch is shifted up by one photon.
struct BranchState {
  double t = 0.0;  // s
  MomentumGrid grid;
  std::size_t dim = 0;
  std::vector<cplx> c;  // node-major, grid.size() * dim
  std::vector<cplx> d;

  BranchState() = default;
  BranchState(double time, MomentumGrid g, std::size_t fock_dim)
      : t(time), grid(std::move(g)), dim(fock_dim), c(grid.size() * fock_dim), d(grid.size() * fock_dim) {}

  std::size_t nodes() const noexcept { return grid.size(); }
  cplx& C(std::size_t k, std::size_t n) { return c[k * dim + n]; }
  cplx& D(std::size_t k, std::size_t n) { return d[k * dim + n]; }
  const cplx& C(std::size_t k, std::size_t n) const { return c[k * dim + n]; }
  const cplx& D(std::size_t k, std::size_t n) const { return d[k * dim + n]; }
  std::span<const cplx> C_row(std::size_t k) const { return {c.data() + k * dim, dim}; }
  std::span<const cplx> D_row(std::size_t k) const { return {d.data() + k * dim, dim}; }

  /// Sum_k w_k Sum_n (|C|^2 + |D|^2).
  double norm() const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes(); ++k) {
      double inner = 0.0;
      for (std::size_t n = 0; n < dim; ++n) inner += std::norm(C(k, n)) + std::norm(D(k, n));
      s += grid.weights[k] * inner;
    }
    return s;
  }
};

/// Fock dimension used by branch states built on `field`.
inline std::size_t branch_dim(const CoherentField& field) { return field.nmax + 2; }

}  // namespace jcgrav
