#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "egoe/errors.hpp"

// Adaptive Gauss-Kronrod (G7, K15) quadrature. The 15-point Kronrod rule gives
// the value, |K15 - G7| the error estimate; intervals split until the local
// tolerance (distributed proportionally to interval length) is met.

namespace egoe {

namespace detail {

// K15 abscissae (positive half) and weights; G7 uses the odd-index nodes.
inline constexpr double kKronrodNodes[8] = {
    0.0, 0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993945, 0.8648644233597691, 0.9491079123427585, 0.9914553711208126};
inline constexpr double kKronrodWeights[8] = {
    0.2094821410847278, 0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
inline constexpr double kGaussWeights[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767, 0.1294849661688697};

template <class F>
std::pair<double, double> gauss_kronrod_15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double kron = kKronrodWeights[0] * f0;
  double gauss = kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kKronrodWeights[i] * fsum;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

template <class F>
double adaptive_gk_impl(F&& f, double a, double b, double tol, int depth) {
  const auto [value, err] = gauss_kronrod_15(f, a, b);
  if (err <= tol || depth <= 0) {
    if (depth <= 0 && err > 64.0 * tol)
      throw NumericError("adaptive quadrature failed to converge");
    return value;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_gk_impl(f, a, mid, 0.5 * tol, depth - 1) +
         adaptive_gk_impl(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48) {
  if (!(b > a)) return 0.0;
  return detail::adaptive_gk_impl(f, a, b, abs_tol, max_depth);
}

}  // namespace egoe
