#include <doctest.h>

#include <cmath>

#include "nagumo/error.hpp"
#include "nagumo/model.hpp"
#include "oracles.hpp"

using namespace nagumo;

namespace {

Model cubic(double g, double a) { return Model(g, Nonlinearity::cubic(a)); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("F evaluates the cubic") {
  const Nonlinearity F = Nonlinearity::cubic(0.4);
  CHECK(F.F(0.0) == 0.0);
  CHECK(F.F(0.7) == doctest::Approx(0.063).epsilon(1e-14));
  CHECK(F.F(0.2) == doctest::Approx(-0.032).epsilon(1e-14));
}

TEST_CASE("primitive matches its closed form and a Simpson sum") {
  const Nonlinearity F = Nonlinearity::cubic(0.4);
  CHECK(F.primitive(0.0) == 0.0);
  CHECK(F.primitive(1.0) == doctest::Approx((1 - 2 * 0.4) / 12).epsilon(1e-14));
  const double simpson = oracle::simpson([&](double s) { return s * (s - 0.4) * (1 - s); }, 0.0, 0.07);
  CHECK(std::abs(F.primitive(0.07) - simpson) < 1e-15);
  CHECK(F.primitive(0.07) == doctest::Approx(-8.259358e-4).epsilon(1e-6));
}

TEST_CASE("extension clamps outside the unit interval") {
  const Nonlinearity F = Nonlinearity::cubic(0.4);
  CHECK(F.F_ext(0.5) == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(F.F_ext(-10.0) == 1.0);
  CHECK(F.F_ext(2.0) == -1.0);
}

TEST_CASE("equilibria of the autonomous equation") {
  auto [a1, c1] = cubic(0.1, 0.4).equilibria(10.0);
  CHECK(a1 == doctest::Approx(0.4171573).epsilon(1e-6));
  CHECK(c1 == doctest::Approx(0.9828427).epsilon(1e-6));
  auto [a2, c2] = cubic(0.5, 0.4).equilibria(16.0);
  CHECK(a2 == doctest::Approx(0.4576160).epsilon(1e-6));
  CHECK(c2 == doctest::Approx(0.9423840).epsilon(1e-6));
  CHECK(kind_of([] { cubic(0.5, 0.4).equilibria(5.0); }) == ErrorKind::NoEquilibria);
}

TEST_CASE("closed-form thresholds") {
  CHECK(cubic(0.5, 0.4).m0star() == doctest::Approx(5.555556).epsilon(1e-6));
  CHECK(cubic(0.1, 0.4).m0star() == doctest::Approx(1.111111).epsilon(1e-6));
  // The formula 4g/(1−a)² at its a → 0 limit.
  CHECK(cubic(1.0, 1e-12).m0star() == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(cubic(0.5, 0.4).m1star() == doctest::Approx(15.0).epsilon(1e-6));
  CHECK(cubic(0.1, 0.4).m1star() == doctest::Approx(3.0).epsilon(1e-6));
  const double opt = cubic(0.1, 0.4).m1star_optimal(1e-10);
  CHECK(opt < 3.0);
  CHECK(opt > 1.111111);
  CHECK(kind_of([] { cubic(0.1, 0.6).m1star(); }) == ErrorKind::HypothesisH0Violated);
}

TEST_CASE("optimal homoclinic threshold against a bisection oracle") {
  // Independent: H(x) = g x² − 2μ𝓕(x) has a zero beyond a_μ iff H(c_μ) < 0.
  const double g = 0.1, a = 0.4;
  auto H_at_c = [&](double mu) {
    const double disc = (1 - a) * (1 - a) - 4 * g / mu;
    const double c = 0.5 * ((1 + a) + std::sqrt(disc));
    const double prim = -std::pow(c, 4) / 4 + (1 + a) * std::pow(c, 3) / 3 - a * c * c / 2;
    return g * c * c - 2 * mu * prim;
  };
  const double ref = oracle::bisect(H_at_c, 4 * g / ((1 - a) * (1 - a)) * (1 + 1e-12), 3.0);
  CHECK(cubic(g, a).m1star_optimal(1e-12) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("zero of the primitive") {
  CHECK(cubic(0.1, 0.4).root_b() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const Model m = cubic(0.1, 0.25);
  CHECK(std::abs(m.F().primitive(m.root_b())) < 1e-12);
  CHECK(cubic(0.1, 0.4999).root_b() > 0.99);
}

TEST_CASE("homoclinic abscissa b_mu") {
  const Model m = cubic(0.1, 0.4);
  // x²(5x² − 9.33333x + 4.1) = 0: smaller root of the bracket.
  const double ref = (28.0 / 3.0 - std::sqrt(28.0 * 28.0 / 9.0 - 4 * 5 * 4.1)) / 10.0;
  CHECK(m.b_mu(10.0) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(m.b_mu(10.0) == doctest::Approx(0.7072557).epsilon(1e-6));
  const double big = m.b_mu(1e4);
  CHECK(big > 2.0 / 3.0);
  CHECK(big < 0.668);
  CHECK(kind_of([&] { m.b_mu(2.0); }) == ErrorKind::BelowHomoclinicThreshold);
}

TEST_CASE("conjugate abscissa x_plus") {
  const Model m = cubic(0.1, 0.4);
  CHECK(m.x_plus(0.07) == doctest::Approx(0.652494).epsilon(1e-6));
  const double xp = m.x_plus(0.2);
  CHECK(xp > 0.4);
  CHECK(xp < 2.0 / 3.0);
  CHECK(std::abs(m.F().primitive(xp) - m.F().primitive(0.2)) <= 1e-12);
  CHECK(m.x_plus(0.4 - 1e-6) - 0.4 < 1e-5);
  CHECK(kind_of([&] { m.x_plus(0.5); }) == ErrorKind::OutOfRange);
}

TEST_CASE("slope suprema") {
  const auto [lambda, theta] = cubic(0.5, 0.4).lambda_theta();
  CHECK(lambda == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(theta == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(0.5 / lambda == doctest::Approx(cubic(0.5, 0.4).m0star()).epsilon(1e-12));
  CHECK(cubic(0.1, 0.999).lambda_theta().first < 1e-6);
}

TEST_CASE("horseshoe constants") {
  ModelParams p;  // g = 0.1, a = 0.4, n0 = 0.5, α = 4, β = 6
  const Thresholds th = horseshoe_constants(p, 10.0);
  CHECK(th.kappa == doctest::Approx(std::cosh(std::sqrt(0.1 - 0.045))).epsilon(1e-12));
  CHECK(th.kappa == doctest::Approx(1.027626).epsilon(1e-6));
  // F increases at b = 2/3, so its minimum over [b, b_10] sits at b.
  const Nonlinearity F = Nonlinearity::cubic(0.4);
  CHECK(F.dF(2.0 / 3.0) > 0.0);
  CHECK(th.eta == doctest::Approx(F.F(2.0 / 3.0)).epsilon(1e-9));
  CHECK(th.eta == doctest::Approx(0.0592593).epsilon(1e-6));
  CHECK(F.F(0.7072557) == doctest::Approx(0.063614).epsilon(1e-5));
  CHECK(th.mu_star == doctest::Approx(0.1 * (th.kappa + 1) / (2 * th.eta * th.b)).epsilon(1e-12));
  CHECK(th.m2star == doctest::Approx(std::max(th.mu_star, th.mu_tilde)).epsilon(1e-15));
  CHECK(th.m0star < th.m1star_opt);
  CHECK(th.m1star_opt <= th.m1star);
  CHECK(th.m1star < th.m2star);
  if (th.p_hat0_interior) {
    const double target = -th.eta * th.b * (th.kappa - 1) / (2 * th.kappa);
    CHECK(F.primitive(th.p_hat0) == doctest::Approx(target).epsilon(1e-9));
  }

  ModelParams thin = p;
  thin.beta = thin.alpha + 1e-4;
  const Thresholds tt = horseshoe_constants(thin, 10.0);
  CHECK(tt.kappa - 1.0 < 1e-8);
  CHECK(tt.m2star > 1e6);

  ModelParams heavy = p;
  heavy.n0 = 1.2;  // n0 Λ = 0.108 > g
  CHECK(kind_of([&] { horseshoe_constants(heavy, 10.0); }) == ErrorKind::WeightTooLarge);
  CHECK(kind_of([&] { horseshoe_constants(p, 2.0); }) == ErrorKind::BelowHomoclinicThreshold);
}

TEST_CASE("property: sign pattern of F") {
  const double a = 0.4;
  const Nonlinearity F = Nonlinearity::cubic(a);
  for (int i = 0; i < 1000; ++i) {
    const double s = -2.0 + 4.0 * (i + 0.5) / 1000;
    const double v = F.F(s);
    if ((s > 0 && s < a) || s > 1) {
      CHECK(v < 0.0);
    } else if (s < 0 || (s > a && s < 1)) {
      CHECK(v > 0.0);
    }
    const double e = F.F_ext(s);
    CHECK(std::abs(e) <= std::max(1.0, std::abs(v) * (s >= 0 && s <= 1)));
    if (s < 0) CHECK(e > 0.0);
    if (s > 1) CHECK(e < 0.0);
  }
}

TEST_CASE("property: primitive differentiates to F") {
  oracle::Gen gen(11);
  for (int i = 0; i < 1000; ++i) {
    const double a = gen.uniform(0.05, 0.95);
    const Nonlinearity F = Nonlinearity::cubic(a);
    const double s = gen.uniform(0.0, 1.0), h = 1e-5;
    const double fd = (F.primitive(s + h) - F.primitive(s - h)) / (2 * h);
    CHECK(std::abs(fd - F.F(s)) <= 1e-9);
  }
}

TEST_CASE("property: equilibria lie in (a, 1) and solve g s = mu F(s)") {
  oracle::Gen gen(12);
  for (int i = 0; i < 300; ++i) {
    const double g = gen.log_uniform(0.01, 1.0), a = gen.uniform(0.05, 0.9);
    const Model m = cubic(g, a);
    const double mu = m.m0star() * gen.log_uniform(1.0001, 1e4);
    const auto [am, cm] = m.equilibria(mu);
    CHECK(a < am);
    CHECK(am < cm);
    CHECK(cm < 1.0);
    CHECK(std::abs(g * am - mu * m.F().F(am)) <= 1e-10);
    CHECK(std::abs(g * cm - mu * m.F().F(cm)) <= 1e-10);
  }
}

TEST_CASE("property: b_mu decreases to b") {
  const Model m = cubic(0.1, 0.4);
  const double m1 = m.m1star(), b = m.root_b();
  double prev = 2.0;
  for (int k = 0; k <= 40; ++k) {
    const double mu = 1.1 * m1 * std::pow(1e4 / 1.1, k / 40.0);
    const double bm = m.b_mu(mu);
    CHECK(bm < prev);
    CHECK(bm > b);
    prev = bm;
  }
}

TEST_CASE("property: x_plus preserves the primitive") {
  oracle::Gen gen(13);
  const Model m = cubic(0.1, 0.4);
  for (int i = 0; i < 100; ++i) {
    const double x0 = gen.uniform(1e-4, 0.4 - 1e-4);
    const double xp = m.x_plus(x0);
    CHECK(xp > 0.4);
    CHECK(xp < 1.0);
    CHECK(std::abs(m.F().primitive(xp) - m.F().primitive(x0)) <= 1e-12);
  }
}

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.n0 = p.n1 + 1;
  CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidArgument);
  ModelParams q;
  q.beta = q.alpha;
  CHECK(kind_of([&] { q.validate(); }) == ErrorKind::InvalidArgument);
  CHECK(ModelParams{}.h0_holds());
  ModelParams w;
  CHECK(w.weight(0.5) == w.n1);
  CHECK(w.weight(w.alpha + 0.5) == w.n0);
  CHECK(w.weight(w.beta + 0.5) == w.n1);
}
