#pragma once

#include <functional>

namespace nagumo::quadrature {

struct Result {
  double value = 0.0;
  double last_change = 0.0;  ///< |I_k − I_{k−1}| at the final level
  int levels = 0;
  bool converged = false;
};

/// Integrand for the one-sided tanh–sinh rule: called with the offset δ ∈ (0, L)
/// from the (possibly singular) left end. Offsets near 0 are passed without
/// loss of relative precision.
using OffsetIntegrand = std::function<double(double)>;

/// Double-exponential quadrature of ∫₀ᴸ f(δ) dδ. Halves the step until two
/// successive levels agree to `rel_tol` (relative) or `max_levels` is hit.
Result tanh_sinh(const OffsetIntegrand& f, double length, double rel_tol = 1e-10,
                 int max_levels = 12);

}  // namespace nagumo::quadrature
