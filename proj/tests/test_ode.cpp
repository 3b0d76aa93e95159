#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "jcgrav/ode.hpp"
#include "jcgrav/sweep.hpp"

using namespace jcgrav;

namespace {

PhysicalParams resonant() {
  PhysicalParams p;
  p.delta0 = 0.0;
  p.omega_rec = 0.0;
  return p;
}

// |c_e|^2 for a constant detuning: the phase exp(i Delta t) gives Rabi
// frequency sqrt(kappa^2 + Delta^2/4).
double rabi_excited(double kappa, double delta, double t) {
  const double om = std::sqrt(kappa * kappa + 0.25 * delta * delta);
  const double s = std::sin(om * t);
  return 1.0 - kappa * kappa / (om * om) * s * s;
}

}  // namespace

TEST(Dop853, HarmonicOscillator) {
  using S = std::array<double, 2>;
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(0.5 * i);
  std::vector<S> got(ts.size());
  const auto st = dop853_integrate<2>([](double, const S& y) { return S{y[1], -y[0]}; }, 0.0, S{1.0, 0.0}, ts, 1e-12,
                                      1e-12, [&](std::size_t i, const S& y) { got[i] = y; });
  EXPECT_GT(st.accepted, 0u);
  EXPECT_EQ(got[0][0], 1.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(got[i][0], std::cos(ts[i]), 1e-10);
    EXPECT_NEAR(got[i][1], -std::sin(ts[i]), 1e-10);
  }
}

TEST(Dop853, ConvergesWithTolerance) {
  using S = std::array<double, 1>;
  const double ts[] = {3.0};
  double prev = 1.0;
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    double y3 = 0.0;
    dop853_integrate<1>([](double t, const S& y) { return S{std::cos(t) * y[0]}; }, 0.0, S{1.0}, ts, tol, tol,
                        [&](std::size_t, const S& y) { y3 = y[0]; });
    const double err = std::abs(y3 - std::exp(std::sin(3.0)));
    EXPECT_LE(err, 100.0 * tol);
    EXPECT_LE(err, prev);
    prev = err;
  }
}

TEST(Dop853, Errors) {
  using S = std::array<double, 1>;
  auto rhs = [](double, const S& y) { return S{y[0]}; };
  auto noop = [](std::size_t, const S&) {};
  const double bad[] = {2.0, 1.0};
  EXPECT_THROW(dop853_integrate<1>(rhs, 0.0, S{1.0}, bad, 1e-8, 1e-8, noop), DomainError);
  const double far[] = {100.0};
  try {
    dop853_integrate<1>(rhs, 0.0, S{1.0}, far, 1e-10, 1e-10, noop, 5);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_GT(e.achieved_time(), 0.0);
    EXPECT_LT(e.achieved_time(), 100.0);
  }
  // Finite-time blow-up: y' = y^2 from y(0) = 1 diverges at t = 1.
  const double past[] = {2.0};
  EXPECT_THROW(dop853_integrate<1>([](double, const S& y) { return S{y[0] * y[0]}; }, 0.0, S{1.0}, past, 1e-10,
                                   1e-10, noop),
               IntegrationError);
}

TEST(EvolveBlock, RabiOracleBothFrames) {
  const PhysicalParams p;
  for (std::size_t n : {0u, 25u, 60u})
    for (double lt : {0.3, 3.0, 11.0, 25.0})
      for (Frame f : {Frame::rotating, Frame::literal}) {
        const double t = lt / p.lambda;
        const auto b = evolve_block(n, 0.4, t, p, 1e-12, f);
        const double kappa = p.lambda * std::sqrt(n + 1.0);
        EXPECT_NEAR(std::norm(b.c_e), rabi_excited(kappa, detuning0_of_p(0.4, p), t), 1e-9)
            << "n=" << n << " lt=" << lt << " " << to_string(f);
      }
}

TEST(EvolveBlock, FockResonanceQuarterPeriod) {
  const PhysicalParams p = resonant();
  const double t = std::numbers::pi / (2.0 * std::sqrt(26.0)) / p.lambda;
  const auto b = evolve_block(25, 0.0, t, p, 1e-12);
  EXPECT_NEAR(std::norm(b.c_e), 0.0, 1e-10);
  EXPECT_NEAR(std::norm(b.c_g), 1.0, 1e-10);
  const double t2 = 0.37 / p.lambda;
  const auto b2 = evolve_block(25, 0.0, t2, p, 1e-12);
  const double ang = std::sqrt(26.0) * 0.37;
  EXPECT_NEAR(std::norm(b2.c_e), std::cos(ang) * std::cos(ang), 1e-10);
  EXPECT_NEAR(std::norm(b2.c_g), std::sin(ang) * std::sin(ang), 1e-10);
}

TEST(EvolveBlock, FramesAgreeOnAmplitudesUnderChirp) {
  PhysicalParams p;
  p.qg = 1.5e7;
  std::vector<double> ts;
  for (int i = 1; i <= 50; ++i) ts.push_back(0.5 * i / p.lambda);
  const auto r = evolve_block_series(30, -1.2, ts, p, 1e-12, Frame::rotating);
  const auto l = evolve_block_series(30, -1.2, ts, p, 1e-12, Frame::literal);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_LE(std::abs(r[i].c_e - l[i].c_e), 1e-8);
    EXPECT_LE(std::abs(r[i].c_g - l[i].c_g), 1e-8);
  }
}

TEST(EvolveBlock, NormConserved) {
  PhysicalParams p;
  p.qg = 0.5e7;
  std::vector<double> ts;
  for (int i = 0; i <= 100; ++i) ts.push_back(0.25 * i / p.lambda);
  for (double tol : {1e-10, 1e-8}) {
    const auto r = evolve_block_series(10, 0.0, ts, p, tol);
    for (const auto& b : r) EXPECT_NEAR(std::norm(b.c_e) + std::norm(b.c_g), 1.0, 1e3 * tol);
  }
}

TEST(EvolveBlock, ShortTimeGroundPopulation) {
  const PhysicalParams p = resonant();
  const double t = 1e-3 / p.lambda;
  const auto b = evolve_block(7, 0.0, t, p, 1e-12);
  EXPECT_NEAR(std::norm(b.c_g), 8.0 * 1e-6, 8e-6 * 1e-5);
}

TEST(EvolveBlock, UncoupledIsExact) {
  PhysicalParams p;
  p.lambda = 0.0;
  const auto b = evolve_block(5, 0.0, 1e-5, p, 1e-10);
  EXPECT_EQ(b.c_e, cplx(1.0, 0.0));
  EXPECT_EQ(b.c_g, cplx(0.0, 0.0));
}

TEST(EvolveBlock, ToleranceRange) {
  const PhysicalParams p;
  EXPECT_THROW(evolve_block(0, 0.0, 1e-6, p, 1e-13), DomainError);
  EXPECT_THROW(evolve_block(0, 0.0, 1e-6, p, 1e-5), DomainError);
}

TEST(BlockTolerance, ScalesWithWeight) {
  OdeOptions o;
  o.tol = 1e-10;
  EXPECT_EQ(block_tolerance(o, {1.0, 0.0}), 1e-10);
  EXPECT_DOUBLE_EQ(block_tolerance(o, {0.01, 0.0}), 1e-8);
  EXPECT_EQ(block_tolerance(o, {1e-20, 0.0}), 1e-6);
  o.weight_scaled_tolerance = false;
  EXPECT_EQ(block_tolerance(o, {1e-20, 0.0}), 1e-10);
}

TEST(BranchStatesOde, FockInitialStateSingleBlock) {
  const PhysicalParams p = resonant();
  std::vector<cplx> amps(26, cplx{0.0, 0.0});
  amps[25] = 1.0;
  const auto field = CoherentField::from_amplitudes(amps);
  const MomentumGrid g{{0.0}, {1.0}};
  const auto s = branch_states_ode(0.37 / p.lambda, p, field, g, {1e-12});
  const double ang = std::sqrt(26.0) * 0.37;
  EXPECT_NEAR(std::norm(s.C(0, 25)), std::cos(ang) * std::cos(ang), 1e-10);
  EXPECT_NEAR(std::norm(s.D(0, 26)), std::sin(ang) * std::sin(ang), 1e-10);
  EXPECT_EQ(s.D(0, 25), cplx(0.0, 0.0));
}

TEST(OdeOverlapSeries, ThreadCountDoesNotChangeBits) {
  PhysicalParams p;
  p.qg = 1.5e7;
  const auto field = coherent_amplitudes({2.0, 0.0}, adaptive_nmax({2.0, 0.0}));
  const auto g = build_momentum_grid(1.0, 6);
  std::vector<double> ts;
  for (int i = 0; i < 20; ++i) ts.push_back(0.4 * i / p.lambda);
  const auto a = ode_overlap_series(ts, p, field, g, {}, 1);
  const auto b = ode_overlap_series(ts, p, field, g, {}, 3);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(a[i].cc, b[i].cc);
    EXPECT_EQ(a[i].dd, b[i].dd);
    EXPECT_EQ(a[i].cd, b[i].cd);
  }
}

TEST(OdeOverlapSeries, MatchesPerTimeStates) {
  PhysicalParams p;
  p.qg = 0.5e7;
  const auto field = coherent_amplitudes({2.0, 0.0}, adaptive_nmax({2.0, 0.0}));
  const auto g = build_momentum_grid(1.0, 4);
  const double ts[] = {0.0, 3.0 / p.lambda, 9.0 / p.lambda};
  const auto series = ode_overlap_series(ts, p, field, g);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto o = overlaps(branch_states_ode(ts[i], p, field, g));
    EXPECT_NEAR(series[i].cc, o.cc, 1e-8);
    EXPECT_NEAR(series[i].dd, o.dd, 1e-8);
    EXPECT_LE(std::abs(series[i].cd - o.cd), 1e-8);
  }
  EXPECT_NEAR(series[0].cc, 1.0, 1e-12);
}
