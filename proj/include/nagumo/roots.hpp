#pragma once

#include <cmath>
#include <utility>

#include "nagumo/error.hpp"

namespace nagumo::roots {

/// Default bracket width at which bisection stops.
inline constexpr double kBracketWidth = 1e-13;

/// Bisection on a sign-changing bracket [lo, hi]. Returns the midpoint of the
/// final bracket, or an endpoint if f vanishes there exactly.
template <class Fn>
double bisect(Fn&& f, double lo, double hi, double width = kBracketWidth) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw Error(ErrorKind::NoSolution, "bisection bracket does not change sign");
  }
  for (int it = 0; it < 400 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Bisection to `width`, then one Newton step kept only if it stays inside the
/// final bracket and does not increase |f|.
template <class Fn, class DFn>
double bisect_polish(Fn&& f, DFn&& df, double lo, double hi, double width = kBracketWidth) {
  const double x = bisect(f, lo, hi, width);
  const double fx = f(x);
  const double d = df(x);
  if (fx == 0.0 || d == 0.0 || !std::isfinite(d)) return x;
  const double x1 = x - fx / d;
  const double half = std::max(width, 4.0 * std::abs(x) * 2.3e-16);
  if (!(std::abs(x1 - x) <= half)) return x;
  return std::abs(f(x1)) <= std::abs(fx) ? x1 : x;
}

}  // namespace nagumo::roots
