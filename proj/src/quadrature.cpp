#include "nagumo/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace nagumo::quadrature {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
// Beyond |t| = 4.5 the weights are below 1e-300.
constexpr double kTMax = 4.5;

// Sum of the rule's terms at nodes t = (2j+1)h (odd) or t = jh, for one side.
// Returns (sum over t > 0 of left-end and right-end contributions).
double node_contribution(const OffsetIntegrand& f, double length, double t) {
  const double s = kHalfPi * std::sinh(t);
  const double c = kHalfPi * std::cosh(t);
  // 1 − tanh(s) = 2 / (1 + e^{2s}) computed without cancellation.
  const double e = std::exp(-2.0 * s);
  const double tail = length * e / (1.0 + e);  // distance to the nearer end
  const double sech = 2.0 / (std::exp(s) + std::exp(-s));
  const double w = 0.5 * length * c * sech * sech;
  if (!(w > 0.0) || !(tail > 0.0)) return 0.0;
  double sum = 0.0;
  const double fl = f(tail);
  if (std::isfinite(fl)) sum += w * fl;
  const double right = length - tail;
  if (right < length) {
    const double fr = f(right);
    if (std::isfinite(fr)) sum += w * fr;
  }
  return sum;
}

}  // namespace

Result tanh_sinh(const OffsetIntegrand& f, double length, double rel_tol, int max_levels) {
  Result res;
  if (!(length > 0.0)) return res;
  double h = 1.0;
  // Level 0: t = 0 plus all integer multiples of h.
  double sum = 0.5 * length * kHalfPi * f(0.5 * length);
  for (double t = h; t <= kTMax; t += h) sum += node_contribution(f, length, t);
  double estimate = h * sum;
  res.value = estimate;
  res.levels = 1;
  for (int level = 1; level < max_levels; ++level) {
    h *= 0.5;
    double odd = 0.0;
    for (double t = h; t <= kTMax; t += 2.0 * h) odd += node_contribution(f, length, t);
    sum += odd;
    const double next = h * sum;
    res.last_change = std::abs(next - estimate);
    res.value = next;
    res.levels = level + 1;
    estimate = next;
    if (level >= 3 && res.last_change <= rel_tol * std::abs(next)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace nagumo::quadrature
