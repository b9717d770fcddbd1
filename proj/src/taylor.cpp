#include "nagumo/taylor.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "nagumo/error.hpp"

namespace nagumo::taylor {

CubicFlow::CubicFlow(double g, double a, int order, double step_scale)
    : g_(g), a_(a), order_(order), step_scale_(step_scale) {
  if (order < 4) throw Error(ErrorKind::InvalidArgument, "Taylor order below 4");
}

State CubicFlow::flow(real mu, State z, real duration, Mat2* jac) const {
  // y' = c1 x − c2 x² + c3 x³ with F(x) = −x³ + (1+a)x² − a x.
  const real c1 = g_ + mu * a_, c2 = mu * (1 + a_), c3 = mu;
  const real omega = std::sqrt(std::abs(c1) + 2 * std::abs(c2) + 3 * c3);
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(duration) * omega / step_scale_)));
  const real h = duration / static_cast<real>(steps);
  const int K = order_;

  std::vector<real> x(K + 1), y(K + 1), x2(K + 1), x3(K + 1), k(K + 1);
  // Variational columns (u, v) for ∂/∂x₀ and ∂/∂y₀.
  std::vector<real> u0(K + 1), v0(K + 1), u1(K + 1), v1(K + 1);
  Mat2 M{1, 0, 0, 1};

  for (long s = 0; s < steps; ++s) {
    x[0] = z.x;
    y[0] = z.y;
    u0[0] = M[0];
    v0[0] = M[2];
    u1[0] = M[1];
    v1[0] = M[3];
    for (int n = 0; n < K; ++n) {
      real sq = 0, cu = 0;
      for (int i = 0; i <= n; ++i) sq += x[i] * x[n - i];
      x2[n] = sq;
      for (int i = 0; i <= n; ++i) cu += x2[i] * x[n - i];
      x3[n] = cu;
      const real rhs = c1 * x[n] - c2 * x2[n] + c3 * x3[n];
      const real inv = real(1) / (n + 1);
      x[n + 1] = y[n] * inv;
      y[n + 1] = rhs * inv;
      if (jac) {
        k[n] = -2 * c2 * x[n] + 3 * c3 * x2[n] + (n == 0 ? c1 : real(0));
        real ku0 = 0, ku1 = 0;
        for (int i = 0; i <= n; ++i) {
          ku0 += k[i] * u0[n - i];
          ku1 += k[i] * u1[n - i];
        }
        u0[n + 1] = v0[n] * inv;
        v0[n + 1] = ku0 * inv;
        u1[n + 1] = v1[n] * inv;
        v1[n + 1] = ku1 * inv;
      }
    }
    auto horner = [&](const std::vector<real>& c) {
      real acc = c[K];
      for (int n = K - 1; n >= 0; --n) acc = acc * h + c[n];
      return acc;
    };
    z = {horner(x), horner(y)};
    if (jac) M = {horner(u0), horner(u1), horner(v0), horner(v1)};
    if (!(z.x >= -0.5 && z.x <= 1.5) || !std::isfinite(static_cast<double>(z.y))) {
      std::ostringstream os;
      os << "x = " << static_cast<double>(z.x) << " outside the polynomial range";
      throw Error(ErrorKind::StepFailure, os.str());
    }
  }
  if (jac) *jac = M;
  return z;
}

namespace {

Mat2 mul(const Mat2& A, const Mat2& B) {
  return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3], A[2] * B[0] + A[3] * B[2],
          A[2] * B[1] + A[3] * B[3]};
}

}  // namespace

State psi1(const ModelParams& params, State z, Mat2* jac) {
  return CubicFlow(params.g, params.a).flow(params.n1, z, params.alpha, jac);
}

State psi0(const ModelParams& params, State z, Mat2* jac) {
  return CubicFlow(params.g, params.a).flow(params.n0, z, params.low_duration(), jac);
}

State psi(const ModelParams& params, State z, Mat2* jac) {
  if (!jac) return psi0(params, psi1(params, z));
  Mat2 J1, J0;
  const State w = psi0(params, psi1(params, z, &J1), &J0);
  *jac = mul(J0, J1);
  return w;
}

}  // namespace nagumo::taylor
