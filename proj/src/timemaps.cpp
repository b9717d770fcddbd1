#include "nagumo/timemaps.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "nagumo/error.hpp"
#include "nagumo/quadrature.hpp"
#include "nagumo/roots.hpp"

namespace nagumo::timemaps {

namespace {

constexpr double kRelTol = 1e-10;

// ∫ dδ / √(−2 [ℰ(p+sδ,0) − ℰ(p,0)]) over δ ∈ (0, length), s = ±1.
double level_transit(const Model& model, double mu, double p, double length, double direction) {
  auto integrand = [&](double d) {
    const double drop = -2.0 * model.energy_increment(mu, p, direction * d);
    return drop > 0.0 ? 1.0 / std::sqrt(drop) : 0.0;
  };
  return quadrature::tanh_sinh(integrand, length, kRelTol).value;
}

void require_low_weight(const Model& model, double mu) {
  const double m0 = model.m0star();
  if (!(mu > 0.0 && mu < m0)) {
    std::ostringstream os;
    os << "weight " << mu << " must lie in (0, m0star = " << m0 << ")";
    throw Error(ErrorKind::InvalidRegime, os.str());
  }
}

}  // namespace

double sigma(const Model& model, double mu, double p0, double xi) {
  require_low_weight(model, mu);
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorKind::OutOfRange, "need 0 < p0 < 1");
  if (!(xi > p0 && xi <= 1.0)) throw Error(ErrorKind::OutOfRange, "need p0 < xi <= 1");
  return level_transit(model, mu, p0, xi - p0, 1.0);
}

std::pair<double, double> sigma_bounds(const Model& model, double mu, double p0, double xi) {
  require_low_weight(model, mu);
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorKind::OutOfRange, "need 0 < p0 < 1");
  if (!(xi >= p0 && xi <= 1.0)) throw Error(ErrorKind::OutOfRange, "need p0 <= xi <= 1");
  const auto [lam, the] = model.lambda_theta();
  const double ach = std::acosh(xi / p0);
  const double g = model.g();
  return {ach / std::sqrt(g + mu * the), ach / std::sqrt(g - mu * lam)};
}

Period tau(const Model& model, double mu, double x0) {
  const double m1 = model.m1star();
  if (!(mu > m1)) {
    std::ostringstream os;
    os << "weight " << mu << " must exceed m1star = " << m1;
    throw Error(ErrorKind::InvalidRegime, os.str());
  }
  const auto [am, cm] = model.equilibria(mu);
  (void)cm;
  if (!(x0 > 0.0 && x0 < am)) {
    throw Error(ErrorKind::NotClosedOrbit, "left turning point must lie in (0, a_mu)");
  }
  Period out;
  out.x1 = p1_of_p0(model, mu, x0);
  out.period = 2.0 * (level_transit(model, mu, x0, am - x0, 1.0) +
                      level_transit(model, mu, out.x1, out.x1 - am, -1.0));
  return out;
}

double tau_limit(const Model& model, double x0) {
  if (!(x0 > 0.0 && x0 < model.a())) throw Error(ErrorKind::OutOfRange, "need 0 < x0 < a");
  model.m1star();  // (H0) gate
  const double xp = model.x_plus(x0);
  const double a = model.a();
  const auto& F = model.F();
  auto left = [&](double d) {
    const double drop = -F.primitive_increment(x0, d);
    return drop > 0.0 ? 1.0 / std::sqrt(drop) : 0.0;
  };
  auto right = [&](double d) {
    const double drop = -F.primitive_increment(xp, -d);
    return drop > 0.0 ? 1.0 / std::sqrt(drop) : 0.0;
  };
  const double i1 = quadrature::tanh_sinh(left, a - x0, kRelTol).value;
  const double i2 = quadrature::tanh_sinh(right, xp - a, kRelTol).value;
  return std::sqrt(2.0) * (i1 + i2);
}

GapAnchor p_check0(const ModelParams& params) {
  params.validate();
  const Model model = params.model();
  const double n0 = params.n0;
  require_low_weight(model, n0);
  const double a = params.a;
  const double half = 0.5 * params.low_duration();
  auto s = [&](double p) { return sigma(model, n0, p, a); };

  GapAnchor out;
  constexpr int kGrid = 24;
  double prev = s(a * 1.0 / (kGrid + 1));
  for (int i = 2; i <= kGrid; ++i) {
    const double cur = s(a * i / (kGrid + 1));
    if (!(cur < prev)) out.monotone_on_grid = false;
    prev = cur;
  }
  if (!(half > 0.0)) {
    out.value = a;
    return out;
  }
  // Lower cosh⁻¹ bound guarantees σ₀ > half below this anchor.
  const auto [lam, the] = model.lambda_theta();
  (void)lam;
  const double lo = 0.5 * a / std::cosh(half * std::sqrt(params.g + n0 * the));
  if (!(s(lo) > half)) {
    throw Error(ErrorKind::NoGap, "sigma0 below half the low phase near p0 = 0");
  }
  out.value = roots::bisect([&](double p) { return s(p) - half; }, lo, a * (1.0 - 1e-15), 1e-13);
  return out;
}

double p1_of_p0(const Model& model, double n1, double p0) {
  const double m1 = model.m1star();
  if (!(n1 > m1)) throw Error(ErrorKind::InvalidRegime, "n1 must exceed m1star");
  const auto [am, cm] = model.equilibria(n1);
  (void)cm;
  const double level = model.energy(n1, p0, 0.0);
  const double bottom = model.energy(n1, am, 0.0);
  if (!(p0 > 0.0 && p0 < am) || !(level > bottom && level < 0.0)) {
    throw Error(ErrorKind::EnergyOutOfBand, "energy of (p0,0) outside (E(a_n1,0), 0)");
  }
  const double bn = model.b_mu(n1);
  auto f = [&](double x) { return model.energy(n1, x, 0.0) - level; };
  auto df = [&](double x) { return -model.g() * x + n1 * model.F().F(x); };
  return roots::bisect_polish(f, df, am, bn);
}

GapCrossingReport check_gap_crossing(const ModelParams& params, double p0) {
  params.validate();
  const Model model = params.model();
  const auto th = horseshoe_constants(params);
  GapCrossingReport r;
  r.p0 = p0;
  r.p1 = p1_of_p0(model, params.n1, p0);
  r.b_n1 = model.b_mu(params.n1);
  r.kappa = th.kappa;
  r.half_low = 0.5 * params.low_duration();
  r.sigma0 = r.p1 < r.b_n1 ? sigma(model, params.n0, r.p1, r.b_n1) : 0.0;
  r.direct_margin = r.half_low - r.sigma0;
  r.direct = r.direct_margin > 0.0;
  r.sufficient_margin = r.p1 - r.b_n1 / r.kappa;
  r.sufficient = r.sufficient_margin > 0.0;
  return r;
}

}  // namespace nagumo::timemaps
