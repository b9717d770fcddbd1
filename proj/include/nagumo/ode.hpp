#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "nagumo/error.hpp"

namespace nagumo::ode {

struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
  double h_min = 1e-14;
  std::size_t max_steps = 20'000'000;
};

template <std::size_t N>
using State = std::array<double, N>;

/// Dormand–Prince 5(4) coefficients.
namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

/// One Dormand–Prince step of size h from (t, y) with k1 = f(t, y).
/// Writes the 5th-order solution to `out`, f(t+h, out) to `k7` and returns the
/// scaled error norm.
template <std::size_t N, class Rhs>
double dp_step(Rhs& f, double t, const State<N>& y, const State<N>& k1, double h, State<N>& out,
               State<N>& k7, const Tolerances& tol) {
  using namespace dp;
  State<N> k2, k3, k4, k5, k6, tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  f(t + c2 * h, tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f(t + c3 * h, tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f(t + c4 * h, tmp, k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(t + c5 * h, tmp, k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f(t + h, tmp, k6);
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  f(t + h, out, k7);
  double err = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e =
        h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(out[i]));
    err = std::max(err, std::abs(e) / sc);
  }
  return err;
}

/// Adaptive integration of y' = f(t, y) from t0 to t1 (either direction).
/// `observer(t_prev, y_prev, t, y)` is called after each accepted step.
/// `h_hint` carries a step-size guess in and the last accepted size out.
template <std::size_t N, class Rhs, class Observer>
State<N> integrate(Rhs&& f, double t0, State<N> y, double t1, const Tolerances& tol,
                   Observer&& observer, double* h_hint = nullptr) {
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  State<N> k1, k7, next;
  f(t0, y, k1);
  double h = (h_hint && *h_hint > 0.0) ? *h_hint : 0.0;
  if (h == 0.0) {
    double ny = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = tol.abs + tol.rel * std::abs(y[i]);
      ny = std::max(ny, std::abs(y[i]) / sc);
      nf = std::max(nf, std::abs(k1[i]) / sc);
    }
    h = (ny < 1e-5 || nf < 1e-5) ? 1e-6 : 0.01 * ny / nf;
  }
  h = std::min(h, std::abs(span));
  double t = t0;
  std::size_t steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > tol.max_steps) {
      std::ostringstream os;
      os << "step budget exhausted at t = " << t;
      throw Error(ErrorKind::StepFailure, os.str());
    }
    double remaining = std::abs(t1 - t);
    bool last = false;
    if (h >= remaining * (1.0 - 1e-12)) {
      h = remaining;
      last = true;
    }
    const double err = dp_step<N>(f, t, y, k1, dir * h, next, k7, tol);
    if (!std::isfinite(err)) {
      h *= 0.1;
      if (h < tol.h_min) throw Error(ErrorKind::StepFailure, "non-finite state");
      continue;
    }
    if (err <= 1.0) {
      const double t_new = last ? t1 : t + dir * h;
      observer(t, y, t_new, next);
      t = t_new;
      y = next;
      k1 = k7;
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!last) h *= fac;
      if (h_hint) *h_hint = h;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      if (h < tol.h_min) {
        std::ostringstream os;
        os << "step size underflow at t = " << t;
        throw Error(ErrorKind::StepFailure, os.str());
      }
    }
  }
  return y;
}

/// Single 5th-order step used to evaluate the solution inside an accepted step.
template <std::size_t N, class Rhs>
State<N> restep(Rhs&& f, double t, const State<N>& y, double h) {
  if (h == 0.0) return y;
  State<N> k1, k7, out;
  f(t, y, k1);
  Tolerances tol;
  dp_step<N>(f, t, y, k1, h, out, k7, tol);
  return out;
}

}  // namespace nagumo::ode
