#include "nagumo/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "nagumo/error.hpp"
#include "nagumo/roots.hpp"

namespace nagumo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoEquilibria: return "NoEquilibria";
    case ErrorKind::HypothesisH0Violated: return "HypothesisH0Violated";
    case ErrorKind::BelowHomoclinicThreshold: return "BelowHomoclinicThreshold";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::WeightTooLarge: return "WeightTooLarge";
    case ErrorKind::InvalidRegime: return "InvalidRegime";
    case ErrorKind::NotClosedOrbit: return "NotClosedOrbit";
    case ErrorKind::EnergyOutOfBand: return "EnergyOutOfBand";
    case ErrorKind::NoGap: return "NoGap";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::CenterSingularity: return "CenterSingularity";
    case ErrorKind::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorKind::RegimeViolation: return "RegimeViolation";
    case ErrorKind::AnchorOrderViolation: return "AnchorOrderViolation";
    case ErrorKind::InclusionFailure: return "InclusionFailure";
    case ErrorKind::ChartInversionFailure: return "ChartInversionFailure";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::PolishDiverged: return "PolishDiverged";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

// 8-point Gauss–Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNodes = {0.1834346424956498, 0.5255324099163290,
                                               0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights = {0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

double smaller_quadratic_root(double A, double B, double C) {
  // A x² + B x + C with A > 0, B < 0 and real roots; returns the smaller one.
  const double disc = B * B - 4.0 * A * C;
  const double q = -0.5 * (B - std::sqrt(std::max(disc, 0.0)));
  return C / q;
}

}  // namespace

// ---------------------------------------------------------------- Nonlinearity

Nonlinearity Nonlinearity::cubic(double a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "inner zero a must lie in (0,1)");
  }
  return Nonlinearity(a);
}

Nonlinearity Nonlinearity::generic(NonlinearityDescriptor descriptor) {
  if (!descriptor.F || !descriptor.dF || !descriptor.primitive) {
    throw Error(ErrorKind::InvalidArgument, "generic nonlinearity needs F, F' and its primitive");
  }
  if (!(descriptor.a > 0.0 && descriptor.a < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "inner zero a must lie in (0,1)");
  }
  Nonlinearity n(descriptor.a);
  n.generic_ = std::make_shared<const NonlinearityDescriptor>(std::move(descriptor));
  return n;
}

double Nonlinearity::F(double s) const {
  if (generic_) return generic_->F(s);
  return s * (s - a_) * (1.0 - s);
}

double Nonlinearity::dF(double s) const {
  if (generic_) return generic_->dF(s);
  return (-3.0 * s + 2.0 * (1.0 + a_)) * s - a_;
}

double Nonlinearity::primitive(double s) const {
  if (generic_) return generic_->primitive(s);
  const double s2 = s * s;
  return s2 * ((-0.25 * s + (1.0 + a_) / 3.0) * s - 0.5 * a_);
}

double Nonlinearity::primitive_increment(double p, double h) const {
  if (generic_) {
    double sum = 0.0;
    const double mid = p + 0.5 * h;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      const double off = 0.5 * h * kGaussNodes[i];
      sum += kGaussWeights[i] * (generic_->F(mid - off) + generic_->F(mid + off));
    }
    return 0.5 * h * sum;
  }
  // Exact Taylor expansion of the quartic primitive about p.
  const double f0 = F(p);
  const double f1 = dF(p);
  const double f2 = -6.0 * p + 2.0 * (1.0 + a_);
  return h * (f0 + h * (0.5 * f1 + h * (f2 / 6.0 - 0.25 * h)));
}

double Nonlinearity::F_ext(double s) const {
  if (s >= 0.0 && s <= 1.0) return F(s);
  return std::clamp(F(s), -1.0, 1.0);
}

double Nonlinearity::inflection() const {
  if (generic_) return generic_->inflection;
  return (1.0 + a_) / 3.0;
}

// ----------------------------------------------------------------------- Model

Model::Model(double g, Nonlinearity F) : g_(g), F_(std::move(F)) {
  if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "g must be positive");
}

double Model::energy(double mu, double x, double y) const {
  return 0.5 * y * y - 0.5 * g_ * x * x + mu * F_.primitive(x);
}

double Model::energy_increment(double mu, double p, double h) const {
  return -0.5 * g_ * h * (2.0 * p + h) + mu * F_.primitive_increment(p, h);
}

bool Model::h0_holds() const { return F_.primitive(1.0) > 0.0; }

void Model::require_h0() const {
  if (!h0_holds()) {
    throw Error(ErrorKind::HypothesisH0Violated, "integral of F over [0,1] is not positive");
  }
}

double Model::slope_maximiser() const {
  if (F_.is_cubic()) return 0.5 * (1.0 + a());
  // (F/s)' vanishes where s F'(s) = F(s); positive at a, negative at 1.
  auto h = [this](double s) { return s * F_.dF(s) - F_.F(s); };
  return roots::bisect(h, a(), 1.0);
}

double Model::m0star() const {
  if (F_.is_cubic()) {
    const double d = 1.0 - a();
    return 4.0 * g_ / (d * d);
  }
  const double s = slope_maximiser();
  return g_ / (F_.F(s) / s);
}

std::pair<double, double> Model::equilibria(double mu) const {
  const double m0 = m0star();
  if (!(mu > m0)) {
    std::ostringstream os;
    os << "weight " << mu << " does not exceed m0star = " << m0;
    throw Error(ErrorKind::NoEquilibria, os.str());
  }
  if (F_.is_cubic()) {
    const double a = this->a();
    const double disc = (1.0 - a) * (1.0 - a) - 4.0 * g_ / mu;
    if (!(disc > 0.0)) throw Error(ErrorKind::NoEquilibria, "discriminant not positive");
    const double big = 0.5 * ((1.0 + a) + std::sqrt(disc));
    const double small = (a + g_ / mu) / big;
    return {small, big};
  }
  const double s = slope_maximiser();
  auto phi = [&](double x) { return mu * F_.F(x) - g_ * x; };
  auto dphi = [&](double x) { return mu * F_.dF(x) - g_; };
  return {roots::bisect_polish(phi, dphi, a(), s), roots::bisect_polish(phi, dphi, s, 1.0)};
}

double Model::m1star() const {
  require_h0();
  return g_ / (2.0 * F_.primitive(1.0));
}

double Model::m1star_optimal(double tol) const {
  const double m1 = m1star();
  double lo = m0star();
  double hi = m1;
  // 𝓗(x) = g x² − 2μ𝓕(x) has its local maximum at a_μ; a zero in (a_μ, c_μ)
  // exists iff 𝓗(c_μ) < 0.
  auto crosses = [this](double mu) {
    const auto [am, cm] = equilibria(mu);
    (void)am;
    return g_ * cm * cm - 2.0 * mu * F_.primitive(cm) < 0.0;
  };
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (crosses(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double Model::root_b() const {
  require_h0();
  if (F_.is_cubic()) {
    const double a = this->a();
    // b² (3b² − 4(1+a)b + 6a) = 0 after factoring 𝓕(b) = 0.
    return smaller_quadratic_root(3.0, -4.0 * (1.0 + a), 6.0 * a);
  }
  auto f = [this](double s) { return F_.primitive(s); };
  auto df = [this](double s) { return F_.F(s); };
  return roots::bisect_polish(f, df, a(), 1.0);
}

double Model::b_mu(double mu) const {
  const double m1 = m1star();
  if (!(mu > m1)) {
    std::ostringstream os;
    os << "weight " << mu << " does not exceed m1star = " << m1;
    throw Error(ErrorKind::BelowHomoclinicThreshold, os.str());
  }
  if (F_.is_cubic()) {
    const double a = this->a();
    // 𝓗(x) = x² (μx²/2 − 2μ(1+a)x/3 + g + μa).
    return smaller_quadratic_root(0.5 * mu, -2.0 * mu * (1.0 + a) / 3.0, g_ + mu * a);
  }
  const auto [am, cm] = equilibria(mu);
  auto H = [&](double x) { return g_ * x * x - 2.0 * mu * F_.primitive(x); };
  auto dH = [&](double x) { return 2.0 * (g_ * x - mu * F_.F(x)); };
  return roots::bisect_polish(H, dH, am, cm);
}

double Model::x_plus(double x0) const {
  if (!(x0 > 0.0 && x0 < a())) {
    throw Error(ErrorKind::OutOfRange, "x_plus needs 0 < x0 < a");
  }
  const double target = F_.primitive(x0);
  auto f = [&](double s) { return F_.primitive(s) - target; };
  auto df = [&](double s) { return F_.F(s); };
  return roots::bisect_polish(f, df, a(), 1.0);
}

std::pair<double, double> Model::lambda_theta() const {
  if (F_.is_cubic()) {
    const double h = 0.5 * (1.0 - a());
    return {h * h, a()};
  }
  // Grid scan plus golden-section refinement; the limits at 0⁺ are ±F'(0).
  constexpr int kGrid = 2000;
  auto best = [&](auto&& ratio, double at_zero) {
    double arg = 1.0;
    double val = ratio(1.0);
    for (int i = 1; i <= kGrid; ++i) {
      const double s = static_cast<double>(i) / kGrid;
      const double v = ratio(s);
      if (v > val) {
        val = v;
        arg = s;
      }
    }
    double lo = std::max(arg - 1.0 / kGrid, 1e-12);
    double hi = std::min(arg + 1.0 / kGrid, 1.0);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
      const double m1 = hi - gr * (hi - lo);
      const double m2 = lo + gr * (hi - lo);
      if (ratio(m1) < ratio(m2)) lo = m1; else hi = m2;
    }
    return std::max({val, ratio(0.5 * (lo + hi)), at_zero});
  };
  const double lam = best([&](double s) { return F_.F(s) / s; }, F_.dF(0.0));
  const double the = best([&](double s) { return -F_.F(s) / s; }, -F_.dF(0.0));
  return {lam, the};
}

// ----------------------------------------------------------------- ModelParams

void ModelParams::validate() const {
  std::ostringstream os;
  if (!(a > 0.0 && a < 1.0)) os << "a must lie in (0,1); ";
  if (!(g > 0.0)) os << "g must be positive; ";
  if (!(n0 > 0.0 && n0 < n1)) os << "need 0 < n0 < n1; ";
  if (!(alpha > 0.0 && alpha < beta)) os << "need 0 < alpha < beta; ";
  const auto msg = os.str();
  if (!msg.empty()) throw Error(ErrorKind::InvalidArgument, msg);
}

double ModelParams::weight(double t) const {
  double phase = std::fmod(t, beta);
  if (phase < 0.0) phase += beta;
  return phase < alpha ? n1 : n0;
}

bool ModelParams::in_horseshoe_regime(double mu_bar) const {
  try {
    const auto th = horseshoe_constants(*this, mu_bar);
    return n0 < th.m0star && n1 > th.m2star;
  } catch (const Error&) {
    return false;
  }
}

double default_mu_bar(const Model& model) { return 2.0 * model.m1star(); }

Thresholds horseshoe_constants(const ModelParams& params, std::optional<double> mu_bar) {
  params.validate();
  const Model model = params.model();
  Thresholds th;
  th.m0star = model.m0star();
  th.m1star = model.m1star();
  th.m1star_opt = model.m1star_optimal(1e-10);
  std::tie(th.lambda_sup, th.theta_sup) = model.lambda_theta();
  th.b = model.root_b();
  th.mu_bar = mu_bar.value_or(default_mu_bar(model));
  if (!(th.mu_bar > th.m1star)) {
    throw Error(ErrorKind::BelowHomoclinicThreshold, "mu_bar must exceed m1star");
  }
  const double g = params.g;
  const double slack = g - params.n0 * th.lambda_sup;
  if (!(slack > 0.0)) {
    throw Error(ErrorKind::WeightTooLarge, "n0 * Lambda >= g, kappa undefined");
  }
  th.kappa = std::cosh(0.5 * params.low_duration() * std::sqrt(slack));
  th.b_mu_bar = model.b_mu(th.mu_bar);
  // F is concave on [a, 1], so its minimum over [b, b_mu_bar] sits at an endpoint.
  th.eta = std::min(model.F().F(th.b), model.F().F(th.b_mu_bar));
  const double k = th.kappa;
  const double a = params.a;
  th.mu_star = g * (k + 1.0) / (2.0 * th.eta * th.b);
  th.mu_tilde = g * (k * k * (a * a + 1.0) - 1.0) / (k * (k - 1.0) * th.b * th.eta);
  th.m2star = std::max(th.mu_star, th.mu_tilde);

  const double target = -th.eta * th.b * (k - 1.0) / (2.0 * k);
  const double well = model.F().primitive(a);
  if (target > well) {
    auto f = [&](double s) { return model.F().primitive(s) - target; };
    auto df = [&](double s) { return model.F().F(s); };
    th.p_hat0 = roots::bisect_polish(f, df, 0.0, a);
    th.p_hat0_interior = true;
  } else {
    th.p_hat0 = a;
    th.p_hat0_interior = false;
  }
  return th;
}

}  // namespace nagumo
