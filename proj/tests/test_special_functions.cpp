#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "jcgrav/special_functions.hpp"

using jcgrav::erf_complex;
using jcgrav::faddeeva;
using cplx = std::complex<double>;

namespace {

struct Ref {
  cplx z;
  cplx value;
};

// 40-digit reference values (mpmath), rounded to 20 digits.
const std::vector<Ref> kFaddeevaRefs = {
    {{0.5, 0.3}, {0.6148515391469910214, 0.30312434964735105675}},
    {{2, 0}, {0.018315638888734180294, 0.34002621706606620128}},
    {{0, 1}, {0.42758357615580700441, 0.0}},
    {{-3.2, 1.7}, {0.079306456557088466358, -0.13748755998256984134}},
    {{5.5, -0.8}, {-0.015360557205526870668, 0.10200933681054425206}},
    {{0.001, 0.002}, {0.99774624015781483344, 0.0011243874298884009074}},
    {{25, 3}, {0.0026758871263701767717, 0.022263806885610941505}},
    {{-0.7, -2.1}, {-98.98737264003942551, -20.248202891384627251}},
    {{0.0, 0.0}, {1.0, 0.0}},
    {{40, 0.01}, {3.5294956510779703115e-6, 0.014109150575331148105}},
    {{3, 8}, {0.061612538476770216082, 0.022796642177054497489}},
};

const std::vector<Ref> kErfRefs = {
    {{1, 0}, {0.84270079294971486934, 0.0}},
    {{0, 1}, {0.0, 1.650425758797542876}},
    {{0.3, 0.2}, {0.34123748147213858588, 0.20852883788276887638}},
    {{2.5, -1.5}, {1.0004844145745747249, -0.0034035003087279405083}},
    {{-4, 0.5}, {-1.0000000110175494548, -1.6289880119455547667e-8}},
    {{0.01, -0.02}, {0.011287929523862137242, -0.022568335165829540422}},
    {{10, 0.3}, {1.0, 0.0}},
};

}  // namespace

TEST(Faddeeva, MatchesHighPrecisionReference) {
  for (const auto& r : kFaddeevaRefs) {
    const cplx got = faddeeva(r.z);
    EXPECT_LE(std::abs(got - r.value), 1e-13 * std::abs(r.value)) << "z = " << r.z;
  }
}

TEST(Faddeeva, ImaginaryAxisIsScaledErfc) {
  // w(iy) = exp(y^2) erfc(y) for real y.
  for (double y : {0.1, 1.0, 3.0, 9.0}) {
    const cplx got = faddeeva({0.0, y});
    EXPECT_NEAR(got.real(), std::exp(y * y) * std::erfc(y), 1e-14 * got.real());
    EXPECT_EQ(got.imag(), 0.0);
  }
}

TEST(Faddeeva, RealAxisModulusIsGaussian) {
  for (double x : {0.0, 0.4, 1.3, 2.0, 4.5}) EXPECT_NEAR(faddeeva({x, 0.0}).real(), std::exp(-x * x), 1e-15);
}

TEST(Faddeeva, ReflectionSymmetry) {
  // w(-conj z) = conj w(z)
  for (const auto& r : kFaddeevaRefs) {
    const cplx a = faddeeva(-std::conj(r.z));
    const cplx b = std::conj(faddeeva(r.z));
    EXPECT_LE(std::abs(a - b), 1e-15 * std::abs(b) + 1e-300);
  }
}

TEST(Faddeeva, LargeArgumentAsymptotics) {
  // w(z) ~ i / (sqrt(pi) z) for |z| -> infinity in the upper half-plane.
  const double inv_sqrt_pi = 0.56418958354775628695;
  for (cplx z : {cplx{1e4, 1.0}, cplx{-3e5, 20.0}, cplx{0.0, 1e6}}) {
    const cplx asym = cplx{0.0, inv_sqrt_pi} / z;
    EXPECT_LE(std::abs(faddeeva(z) - asym), 1e-8 * std::abs(asym));
  }
}

TEST(Faddeeva, LowerHalfPlaneOverflowIsReported) {
  EXPECT_THROW(faddeeva({0.0, -40.0}), jcgrav::OverflowError);
  EXPECT_THROW(faddeeva({std::nan(""), 1.0}), jcgrav::DomainError);
}

TEST(ErfComplex, MatchesHighPrecisionReference) {
  for (const auto& r : kErfRefs) {
    const cplx got = erf_complex(r.z);
    EXPECT_LE(std::abs(got - r.value), 2e-14 * std::abs(r.value)) << "z = " << r.z;
  }
}

TEST(ErfComplex, RealAxisMatchesStd) {
  for (double x : {-3.0, -0.49, -0.01, 0.0, 0.2, 0.5, 0.8, 1.7, 6.0}) {
    EXPECT_NEAR(erf_complex({x, 0.0}).real(), std::erf(x), 2e-16 + 2e-15 * std::abs(std::erf(x)));
    EXPECT_EQ(erf_complex({x, 0.0}).imag(), 0.0);
  }
}

TEST(ErfComplex, OddAndConjugateSymmetryExact) {
  for (cplx z : {cplx{0.3, 0.7}, cplx{-2.2, 0.1}, cplx{4.0, -3.0}, cplx{0.01, 0.0}, cplx{-19.0, 19.0}}) {
    const cplx e = erf_complex(z);
    EXPECT_EQ(erf_complex(-z), -e);
    EXPECT_EQ(erf_complex(std::conj(z)), std::conj(e));
  }
}

TEST(ErfComplex, SeriesAndFaddeevaBranchesAgreeAtSwitch) {
  // |z| = 0.5 is where the evaluation changes method.
  for (double phi : {0.0, 0.4, 0.9, 1.3}) {
    const cplx inside = std::polar(0.5 - 1e-12, phi);
    const cplx outside = std::polar(0.5 + 1e-12, phi);
    const cplx slope = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-inside * inside);
    const cplx jump = erf_complex(outside) - erf_complex(inside) - slope * (outside - inside);
    EXPECT_LE(std::abs(jump), 2e-15);
  }
}

TEST(ErfComplex, OverflowIsReported) { EXPECT_THROW(erf_complex({0.0, 40.0}), jcgrav::OverflowError); }
