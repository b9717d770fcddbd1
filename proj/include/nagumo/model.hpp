#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>

namespace nagumo {

/// User-supplied N-shaped nonlinearity. `primitive` must be the exact
/// antiderivative vanishing at 0; `inflection` separates the convex part
/// [0, inflection] from the concave part [inflection, 1].
struct NonlinearityDescriptor {
  std::function<double(double)> F;
  std::function<double(double)> dF;
  std::function<double(double)> primitive;
  double a = 0.0;
  double inflection = 0.0;
};

/// The reaction term F with zeros 0 < a < 1. The cubic s(s-a)(1-s) is the
/// canonical instance; every closed form in this library targets it, and the
/// generic descriptor falls back to numerical routes.
class Nonlinearity {
 public:
  static Nonlinearity cubic(double a);
  static Nonlinearity generic(NonlinearityDescriptor descriptor);

  double a() const noexcept { return a_; }
  bool is_cubic() const noexcept { return !generic_; }

  double F(double s) const;
  double dF(double s) const;
  /// ∫₀ˢ F.
  double primitive(double s) const;
  /// ∫ₚ^{p+h} F, accurate for small |h| (no cancellation for the cubic).
  double primitive_increment(double p, double h) const;
  /// F on [0,1], clamped to [-1, 1] outside; positive for s < 0, negative for s > 1.
  double F_ext(double s) const;
  double inflection() const;

 private:
  explicit Nonlinearity(double a) : a_(a) {}

  double a_;
  std::shared_ptr<const NonlinearityDescriptor> generic_;
};

/// A phase-plane point; y is the derivative of x.
struct PhaseState {
  double x = 0.0;
  double y = 0.0;
};

/// The autonomous family x'' - g x + mu F(x) = 0 and its analytic landmarks.
class Model {
 public:
  Model(double g, Nonlinearity F);

  double g() const noexcept { return g_; }
  const Nonlinearity& F() const noexcept { return F_; }
  double a() const noexcept { return F_.a(); }

  /// ½y² − ½gx² + mu·∫₀ˣF.
  double energy(double mu, double x, double y) const;
  double energy(double mu, PhaseState z) const { return energy(mu, z.x, z.y); }
  /// ℰ(p+h, 0) − ℰ(p, 0) without cancellation.
  double energy_increment(double mu, double p, double h) const;

  /// ∫₀¹F > 0.
  bool h0_holds() const;

  /// The two roots a < a_mu < c_mu < 1 of g s = mu F(s).
  std::pair<double, double> equilibria(double mu) const;
  double m0star() const;
  double m1star() const;
  double m1star_optimal(double tol) const;
  double root_b() const;
  double b_mu(double mu) const;
  double x_plus(double x0) const;
  /// (Λ, Θ) = (sup F(s)/s, sup −F(s)/s) over (0, 1].
  std::pair<double, double> lambda_theta() const;

  /// Maximiser of F(s)/s on [a, 1].
  double slope_maximiser() const;

 private:
  void require_h0() const;

  double g_;
  Nonlinearity F_;
};

/// Parameters of the switched equation x'' − g x + n(t) F(x) = 0 with the
/// β-periodic weight n = n1 on [0, α), n0 on [α, β).
struct ModelParams {
  double g = 0.1;
  double a = 0.4;
  double n0 = 0.5;
  double n1 = 10.0;
  double alpha = 4.0;
  double beta = 6.0;

  /// Throws InvalidArgument unless 0<a<1, g>0, 0<n0<n1, 0<alpha<beta.
  void validate() const;
  Model model() const { return Model(g, Nonlinearity::cubic(a)); }
  double low_duration() const { return beta - alpha; }
  /// Weight active at time t (β-periodic).
  double weight(double t) const;

  bool h0_holds() const { return a < 0.5; }
  /// n0 < m0star and n1 > m2star for the given μ̄.
  bool in_horseshoe_regime(double mu_bar) const;
};

/// Every scalar constant of the construction.
struct Thresholds {
  double m0star = 0.0;
  double m1star = 0.0;
  double m1star_opt = 0.0;
  double lambda_sup = 0.0;
  double theta_sup = 0.0;
  double b = 0.0;
  double mu_bar = 0.0;
  double b_mu_bar = 0.0;
  double kappa = 0.0;
  double eta = 0.0;
  double mu_star = 0.0;
  double mu_tilde = 0.0;
  double m2star = 0.0;
  double p_hat0 = 0.0;
  /// False when 𝓕 never reaches −ηb(κ−1)/(2κ) on (0, a); p_hat0 is then a.
  bool p_hat0_interior = true;
};

/// Default choice μ̄ = 2·m1star.
double default_mu_bar(const Model& model);

Thresholds horseshoe_constants(const ModelParams& params, std::optional<double> mu_bar = {});

}  // namespace nagumo
