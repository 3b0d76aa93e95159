#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "jcgrav/quadrature.hpp"

using jcgrav::integrate_adaptive;
using cplx = std::complex<double>;

TEST(Kronrod, ExactForLowDegreePolynomials) {
  const auto r = integrate_adaptive([](double x) { return cplx{x * x * x * x - 2.0 * x, 3.0 * x * x}; }, -1.0, 2.0,
                                    1e-14);
  EXPECT_NEAR(r.value.real(), 33.0 / 5.0 - 3.0, 1e-13);
  EXPECT_NEAR(r.value.imag(), 9.0, 1e-13);
  EXPECT_EQ(r.panels, 1u);
}

TEST(Kronrod, OscillatoryIntegral) {
  // int_0^50 exp(i 3 x) dx = (exp(150 i) - 1) / (3 i)
  const auto r = integrate_adaptive([](double x) { return std::polar(1.0, 3.0 * x); }, 0.0, 50.0, 1e-12, 20);
  const cplx exact = (std::polar(1.0, 150.0) - 1.0) / cplx{0.0, 3.0};
  EXPECT_LE(std::abs(r.value - exact), 1e-12);
}

TEST(Kronrod, EndpointSingularityConverges) {
  const auto r = integrate_adaptive([](double x) { return cplx{1.0 / std::sqrt(x), 0.0}; }, 0.0, 1.0, 1e-9);
  EXPECT_NEAR(r.value.real(), 2.0, 1e-8);
}

TEST(Kronrod, BudgetExhaustionReportsAchievedError) {
  try {
    integrate_adaptive([](double x) { return std::polar(1.0, 1e6 * x * x); }, 0.0, 10.0, 1e-15, 1, 50);
    FAIL() << "expected QuadratureError";
  } catch (const jcgrav::QuadratureError& e) {
    EXPECT_GT(e.achieved_error(), 1e-15);
  }
}

TEST(Kronrod, EmptyInterval) {
  const auto r = integrate_adaptive([](double) { return cplx{1.0, 0.0}; }, 1.0, 1.0, 1e-12);
  EXPECT_EQ(r.value, cplx(0.0, 0.0));
}
