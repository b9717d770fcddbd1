#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's integrator or quadrature: fixed-step classical RK4 in long double
// and composite Simpson sums are slow but transparent.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

namespace oracle {

using real = long double;

struct Point {
  real x = 0;
  real y = 0;
};

/// x'' = g x − mu F(x) with the cubic F(s) = s(s − a)(1 − s).
struct Cubic {
  real g, a, mu;
  real F(real s) const { return s * (s - a) * (1 - s); }
  Point rhs(Point z) const { return {z.y, g * z.x - mu * F(z.x)}; }
  real energy(Point z) const {
    const real x = z.x;
    const real prim = -x * x * x * x / 4 + (1 + a) * x * x * x / 3 - a * x * x / 2;
    return z.y * z.y / 2 - g * x * x / 2 + mu * prim;
  }
};

inline Point rk4(const Cubic& f, Point z, real h) {
  auto add = [](Point p, Point k, real s) { return Point{p.x + s * k.x, p.y + s * k.y}; };
  const Point k1 = f.rhs(z);
  const Point k2 = f.rhs(add(z, k1, h / 2));
  const Point k3 = f.rhs(add(z, k2, h / 2));
  const Point k4 = f.rhs(add(z, k3, h));
  return {z.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), z.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
}

/// Time-t map by RK4 with about `per_unit` steps per time unit.
inline Point flow(const Cubic& f, Point z, real t, int per_unit = 2000) {
  const long n = std::max(1L, static_cast<long>(std::ceil(std::fabs(static_cast<double>(t)) * per_unit)));
  const real h = t / n;
  for (long i = 0; i < n; ++i) z = rk4(f, z, h);
  return z;
}

/// First time (after t_skip) at which `event(z)` changes sign from negative to
/// nonnegative, located by bisection on a single RK4 substep.
inline real first_event(const Cubic& f, Point z, const std::function<real(Point)>& event, real t_max,
                        real t_skip = 0, real h = 1e-3L) {
  real t = 0;
  real prev = event(z);
  while (t < t_max) {
    const Point next = rk4(f, z, h);
    const real val = event(next);
    if (t + h > t_skip && prev < 0 && val >= 0) {
      real lo = 0, hi = h;
      for (int it = 0; it < 80; ++it) {
        const real mid = (lo + hi) / 2;
        (event(rk4(f, z, mid)) < 0 ? lo : hi) = mid;
      }
      return t + (lo + hi) / 2;
    }
    z = next;
    prev = val;
    t += h;
  }
  return NAN;
}

/// Composite Simpson rule on [lo, hi] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 2000) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

/// Bisection root of f on [lo, hi] given a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
