#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "jcgrav/errors.hpp"

namespace jcgrav {

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel kronrod15(F&& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::complex<double> fc = f(centre);
  std::complex<double> kron = kKronrodWeights[7] * fc;
  std::complex<double> gauss = kGaussWeights[3] * fc;
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const std::complex<double> pair = f(centre - dx) + f(centre + dx);
    kron += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kron *= half;
  gauss *= half;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace detail

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate;
  std::size_t panels;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex integrand
/// over [a, b]. The interval starts split into `initial_panels` equal pieces;
/// the panel with the largest error estimate is bisected until the summed
/// estimate is at most `abs_tol`. Throws QuadratureError after `max_panels`.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    std::size_t initial_panels = 1, std::size_t max_panels = 200000) {
  if (a == b) return {{0.0, 0.0}, 0.0, 0};
  initial_panels = std::max<std::size_t>(1, initial_panels);
  std::priority_queue<detail::Panel> heap;
  double total_error = 0.0;
  const double width = (b - a) / static_cast<double>(initial_panels);
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = (i + 1 == initial_panels) ? b : a + width * static_cast<double>(i + 1);
    auto p = detail::kronrod15(f, lo, hi);
    total_error += p.error;
    heap.push(p);
  }
  while (total_error > abs_tol) {
    if (heap.size() >= max_panels) {
      throw QuadratureError("integrate_adaptive: panel budget exhausted, estimated error " +
                                std::to_string(total_error) + " > " + std::to_string(abs_tol),
                            total_error);
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::kronrod15(f, worst.a, mid);
    auto right = detail::kronrod15(f, mid, worst.b);
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    // Resum occasionally so the running estimate does not drift.
    if (heap.size() % 1024 == 0) {
      auto copy = heap;
      total_error = 0.0;
      while (!copy.empty()) {
        total_error += copy.top().error;
        copy.pop();
      }
    }
  }
  // Sum panels in left-to-right order so the result is independent of heap layout.
  std::vector<detail::Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  std::complex<double> sum{0.0, 0.0};
  double err = 0.0;
  for (const auto& p : panels) {
    sum += p.value;
    err += p.error;
  }
  return {sum, err, panels.size()};
}

}  // namespace jcgrav
