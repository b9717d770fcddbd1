#pragma once

#include <array>

#include "nagumo/model.hpp"

namespace nagumo::taylor {

/// Extended-precision scalar for the high-accuracy flow.
using real = long double;

struct State {
  real x = 0;
  real y = 0;
};

/// Row-major 2×2 matrix ∂(x, y)/∂(x₀, y₀).
using Mat2 = std::array<real, 4>;

/// Fixed-step Taylor integrator for x'' = g x − mu F(x) with the cubic F.
/// The step sequence depends only on (mu, duration), so the time map is a
/// smooth function of the initial point; this is what Newton iteration on
/// strongly expanding return maps needs.
class CubicFlow {
 public:
  CubicFlow(double g, double a, int order = 30, double step_scale = 0.6);

  /// Time-`duration` map; fills `jac` with the variational solution if given.
  /// Throws StepFailure when x leaves [−0.5, 1.5], where the polynomial and the
  /// clamped reaction term part ways.
  State flow(real mu, State z, real duration, Mat2* jac = nullptr) const;

 private:
  real g_, a_;
  int order_;
  real step_scale_;
};

/// ψ = ψ₀ ∘ ψ₁ in extended precision, with its Jacobian on request.
State psi(const ModelParams& params, State z, Mat2* jac = nullptr);
State psi1(const ModelParams& params, State z, Mat2* jac = nullptr);
State psi0(const ModelParams& params, State z, Mat2* jac = nullptr);

inline State to_state(PhaseState z) { return {z.x, z.y}; }
inline PhaseState to_phase(State z) {
  return {static_cast<double>(z.x), static_cast<double>(z.y)};
}

}  // namespace nagumo::taylor
