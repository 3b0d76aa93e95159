#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) and the complex error function.
//
// w is evaluated in the first quadrant with the Poppe-Wijers scheme (ACM
// TOMS 680): a Taylor series in a small ellipse around the origin and
// Gautschi's continued fraction, optionally combined with a truncated Taylor
// sum, everywhere else. Other quadrants follow from
//   w(-conj(z)) = conj(w(z))   and   w(-z) = 2 exp(-z^2) - w(z).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "jcgrav/errors.hpp"

namespace jcgrav {

namespace detail {

inline constexpr double kTwoOverSqrtPi = 1.12837916709551257389615890312;  // 2/sqrt(pi)

// Largest argument for which exp() stays finite, and the trigonometric argument
// beyond which cos/sin of 2xy no longer carry a meaningful phase.
inline constexpr double kMaxExpArg = 708.0;
inline constexpr double kMaxTrigArg = 3.53e15;

}  // namespace detail

/// w(z) = exp(-z^2) erfc(-iz).
///
/// Throws OverflowError when the lower-half-plane reflection needs exp(-z^2)
/// beyond the double range or a trigonometric argument too large to resolve.
inline std::complex<double> faddeeva(std::complex<double> z) {
  const double xi = z.real();
  const double yi = z.imag();
  if (!std::isfinite(xi) || !std::isfinite(yi)) throw DomainError("faddeeva: non-finite argument");

  const double xabs = std::abs(xi);
  const double yabs = std::abs(yi);
  const double x = xabs / 6.3;
  const double y = yabs / 4.4;
  double qrho = x * x + y * y;
  const double xabsq = xabs * xabs;
  double xquad = xabsq - yabs * yabs;
  const double yquad = 2.0 * xabs * yabs;

  double u = 0.0, v = 0.0;
  double u2 = 0.0, v2 = 0.0;
  const bool series = qrho < 0.085264;

  if (series) {
    // w(z) = exp(-z^2) (1 - erf(-iz)) with erf from its Maclaurin series, evaluated by Horner.
    qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
    const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
    int j = 2 * n + 1;
    double xsum = 1.0 / j;
    double ysum = 0.0;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad) / i;
      xsum = xaux + 1.0 / j;
    }
    const double u1 = -detail::kTwoOverSqrtPi * (xsum * yabs + ysum * xabs) + 1.0;
    const double v1 = detail::kTwoOverSqrtPi * (xsum * xabs - ysum * yabs);
    const double daux = std::exp(-xquad);
    u2 = daux * std::cos(yquad);
    v2 = -daux * std::sin(yquad);
    u = u1 * u2 - v1 * v2;
    v = u1 * v2 + v1 * u2;
  } else {
    double h = 0.0;
    int kapn = 0;
    int nu = 0;
    if (qrho > 1.0) {
      // Pure continued fraction.
      qrho = std::sqrt(qrho);
      nu = static_cast<int>(3.0 + (1442.0 / (26.0 * qrho + 77.0)));
    } else {
      // Continued fraction combined with a truncated Taylor expansion about z + ih.
      qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
      h = 1.88 * qrho;
      kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
      nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
    }
    const double h2 = 2.0 * h;
    const bool taylor = h > 0.0;
    double qlambda = taylor ? std::pow(h2, kapn) : 0.0;
    double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
    for (int n = nu; n >= 0; --n) {
      const double np1 = n + 1.0;
      double tx = yabs + h + np1 * rx;
      double ty = xabs - np1 * ry;
      const double c = 0.5 / (tx * tx + ty * ty);
      rx = c * tx;
      ry = c * ty;
      if (taylor && n <= kapn) {
        tx = qlambda + sx;
        sx = rx * tx - ry * sy;
        sy = ry * tx + rx * sy;
        qlambda /= h2;
      }
    }
    if (!taylor) {
      u = detail::kTwoOverSqrtPi * rx;
      v = detail::kTwoOverSqrtPi * ry;
    } else {
      u = detail::kTwoOverSqrtPi * sx;
      v = detail::kTwoOverSqrtPi * sy;
    }
    if (yabs == 0.0) u = std::exp(-xabs * xabs);
  }

  if (yi < 0.0) {
    if (series) {
      u2 *= 2.0;
      v2 *= 2.0;
    } else {
      xquad = -xquad;
      if (xquad > detail::kMaxExpArg)
        throw OverflowError("faddeeva: exp(-z^2) overflows in the lower half-plane");
      if (yquad > detail::kMaxTrigArg)
        throw OverflowError("faddeeva: phase of exp(-z^2) cannot be resolved in double precision");
      const double w1 = 2.0 * std::exp(xquad);
      u2 = w1 * std::cos(yquad);
      v2 = -w1 * std::sin(yquad);
    }
    u = u2 - u;
    v = v2 - v;
    if (xi > 0.0) v = -v;
  } else if (xi < 0.0) {
    v = -v;
  }
  return {u, v};
}

namespace detail {

// Maclaurin series of erf, for small |z| where 1 - exp(-z^2) w(iz) cancels.
inline std::complex<double> erf_series(std::complex<double> z) {
  const std::complex<double> z2 = z * z;
  std::complex<double> term = z;  // (-1)^k z^(2k+1) / k!
  std::complex<double> sum = z;
  for (int k = 1; k < 60; ++k) {
    term *= -z2 / static_cast<double>(k);
    const std::complex<double> add = term / static_cast<double>(2 * k + 1);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

}  // namespace detail

/// erf(z) = 1 - exp(-z^2) w(iz).
///
/// Evaluated in the closed right half-plane with non-negative imaginary part
/// and mapped elsewhere through erf(-z) = -erf(z) and erf(conj z) = conj erf(z),
/// so both symmetries hold exactly. Throws OverflowError when exp(-z^2) leaves
/// the double range.
inline std::complex<double> erf_complex(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("erf_complex: non-finite argument");
  const bool negate = z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0);
  if (negate) z = -z;
  const bool conjugate = z.imag() < 0.0;
  if (conjugate) z = std::conj(z);

  std::complex<double> r;
  if (std::abs(z) < 0.5) {
    r = detail::erf_series(z);
  } else {
    const std::complex<double> z2 = z * z;
    if (-z2.real() > detail::kMaxExpArg)
      throw OverflowError("erf_complex: exp(-z^2) overflows (|Im z| too large)");
    if (std::abs(z2.imag()) > detail::kMaxTrigArg)
      throw OverflowError("erf_complex: phase of exp(-z^2) cannot be resolved in double precision");
    // iz lies in the upper half-plane, where w is bounded.
    const std::complex<double> iz{-z.imag(), z.real()};
    r = 1.0 - std::exp(-z2) * faddeeva(iz);
  }
  if (conjugate) r = std::conj(r);
  if (negate) r = -r;
  return r;
}

}  // namespace jcgrav
