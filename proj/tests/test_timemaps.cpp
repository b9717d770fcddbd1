#include <doctest.h>

#include <cmath>

#include "nagumo/error.hpp"
#include "nagumo/model.hpp"
#include "nagumo/timemaps.hpp"
#include "oracles.hpp"

using namespace nagumo;
using oracle::real;

namespace {

Model cubic(double g, double a) { return Model(g, Nonlinearity::cubic(a)); }

/// Time for (E) from (p0, 0) to first reach x = xi.
double transit_oracle(double g, double a, double mu, double p0, double xi) {
  const oracle::Cubic f{g, a, mu};
  return static_cast<double>(
      oracle::first_event(f, {p0, 0}, [xi](oracle::Point z) { return z.x - xi; }, 500));
}

/// Time for (E) from (x0, 0) to come back to y = 0 from below.
double return_oracle(double g, double a, double mu, double x0) {
  const oracle::Cubic f{g, a, mu};
  return static_cast<double>(
      oracle::first_event(f, {x0, 0}, [](oracle::Point z) { return z.y; }, 500, 1e-2));
}

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

TEST_CASE("half-transit time at the low-weight example") {
  const Model m = cubic(0.5, 0.4);
  const double s = timemaps::sigma(m, 0.8, 0.07, 0.4);
  const auto [lo, hi] = timemaps::sigma_bounds(m, 0.8, 0.07, 0.4);
  CHECK(lo == doctest::Approx(std::acosh(0.4 / 0.07) / std::sqrt(0.82)).epsilon(1e-12));
  CHECK(hi == doctest::Approx(std::acosh(0.4 / 0.07) / std::sqrt(0.428)).epsilon(1e-12));
  CHECK(lo == doctest::Approx(2.682).epsilon(1e-3));
  CHECK(hi == doctest::Approx(3.712).epsilon(1e-3));
  CHECK(lo < s);
  CHECK(s < hi);
  CHECK(s == doctest::Approx(transit_oracle(0.5, 0.4, 0.8, 0.07, 0.4)).epsilon(1e-6));
}

TEST_CASE("half-transit time against the flow oracle") {
  const double s = timemaps::sigma(cubic(0.1, 0.4), 0.5, 0.07, 0.4);
  CHECK(s == doctest::Approx(transit_oracle(0.1, 0.4, 0.5, 0.07, 0.4)).epsilon(1e-6));
  CHECK(timemaps::sigma(cubic(0.1, 0.4), 0.5, 0.07, 0.07 + 1e-10) < 1e-3);
}

TEST_CASE("sandwich bounds degenerate cases") {
  const Model m = cubic(0.1, 0.4);
  const auto [lo, hi] = timemaps::sigma_bounds(m, 0.5, 0.2, 0.2);
  CHECK(lo == 0.0);
  CHECK(hi == 0.0);
  const auto [l2, h2] = timemaps::sigma_bounds(m, 1e-9, 0.1, 0.3);
  CHECK(l2 == doctest::Approx(std::acosh(3.0) / std::sqrt(0.1)).epsilon(1e-7));
  CHECK(h2 == doctest::Approx(l2).epsilon(1e-7));
  CHECK(kind_of([&] { timemaps::sigma(m, 2.0, 0.1, 0.3); }) == ErrorKind::InvalidRegime);
  CHECK(kind_of([&] { timemaps::sigma(m, 0.5, 0.3, 0.1); }) == ErrorKind::OutOfRange);
}

TEST_CASE("period function at the figure parameters") {
  const Model m = cubic(0.1, 0.4);
  const auto per = timemaps::tau(m, 10.0, 0.07);
  CHECK(per.x1 > 0.41716);
  CHECK(per.x1 < 0.70726);
  CHECK(m.energy(10.0, per.x1, 0.0) == doctest::Approx(-0.00850436).epsilon(1e-6));
  CHECK(per.period == doctest::Approx(return_oracle(0.1, 0.4, 10.0, 0.07)).epsilon(1e-6));
  CHECK(kind_of([&] { timemaps::tau(m, 2.0, 0.07); }) == ErrorKind::InvalidRegime);
  CHECK(kind_of([&] { timemaps::tau(m, 10.0, 0.5); }) == ErrorKind::NotClosedOrbit);
}

TEST_CASE("period function near the center") {
  const Model m = cubic(0.1, 0.4);
  const double mu = 10.0;
  const double am = m.equilibria(mu).first;
  const double omega = std::sqrt(mu * m.F().dF(am) - 0.1);
  const auto per = timemaps::tau(m, mu, am - 1e-4);
  CHECK(per.period == doctest::Approx(2 * M_PI / omega).epsilon(1e-3));
}

TEST_CASE("period grows toward the homoclinic") {
  const Model m = cubic(0.1, 0.4);
  double prev = 0.0;
  for (double x0 : {0.1, 0.01, 1e-3, 1e-4, 1e-5}) {
    const double T = timemaps::tau(m, 10.0, x0).period;
    CHECK(T > prev);
    prev = T;
  }
}

TEST_CASE("large-weight limit of the period") {
  const Model m = cubic(0.1, 0.4);
  for (double x0 : {0.05, 0.1, 0.2}) {
    const double L = timemaps::tau_limit(m, x0);
    // Independent: √2 ∫ ds / √(𝓕(x0) − 𝓕(s)) by substitution s = x0 + (x⁺ − x0)(1 − cos φ)/2.
    const double xp = m.x_plus(x0);
    const double ref = oracle::simpson(
        [&](double phi) {
          const double s = x0 + (xp - x0) * (1 - std::cos(phi)) / 2;
          const double ds = (xp - x0) * std::sin(phi) / 2;
          const double gap = m.F().primitive(x0) - m.F().primitive(s);
          return ds == 0.0 ? 0.0 : ds / std::sqrt(gap);
        },
        0.0, M_PI, 20000);
    // The endpoints contribute finite limits the Simpson sum drops; compare loosely.
    CHECK(L == doctest::Approx(std::sqrt(2.0) * ref).epsilon(1e-3));
    double prev_gap = INFINITY;
    for (double mu : {1e2, 1e3, 1e4}) {
      const double gap = std::abs(timemaps::tau(m, mu, x0).period * std::sqrt(mu) - L);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap / L <= 2e-2);
  }
  CHECK(kind_of([&] { timemaps::tau_limit(m, 0.4); }) == ErrorKind::OutOfRange);
}

TEST_CASE("gap anchor from the low-phase inequality") {
  ModelParams p;
  p.n0 = 0.5;
  p.alpha = 4.0;
  p.beta = 6.0;
  const Model m = p.model();
  const auto anchor = timemaps::p_check0(p);
  CHECK(anchor.monotone_on_grid);
  CHECK(anchor.value > 0.0);
  CHECK(anchor.value < 0.4);
  CHECK(std::abs(timemaps::sigma(m, 0.5, anchor.value, 0.4) - 1.0) <= 1e-8);
  const auto [lam, th] = m.lambda_theta();
  (void)lam;
  for (double low : {2.0, 20.0}) {
    ModelParams q = p;
    q.beta = q.alpha + low;
    const double bound = 0.4 / std::cosh(low / 2 * std::sqrt(0.1 + 0.5 * th));
    CHECK(timemaps::p_check0(q).value >= bound);
  }
  ModelParams thin = p;
  thin.beta = thin.alpha + 1e-6;
  CHECK(timemaps::p_check0(thin).value > 0.39);
}

TEST_CASE("conjugate abscissa on the high level line") {
  const Model m = cubic(0.1, 0.4);
  const double p1 = timemaps::p1_of_p0(m, 10.0, 0.07);
  CHECK(p1 > 0.4171573);
  CHECK(p1 < 0.7072557);
  CHECK(std::abs(m.energy(10.0, p1, 0.0) - m.energy(10.0, 0.07, 0.0)) <= 1e-10);
  CHECK(std::abs(m.energy(10.0, 0.07, 0.0) + 0.00850436) < 1e-8);
  CHECK(m.b_mu(10.0) - timemaps::p1_of_p0(m, 10.0, 1e-6) < 1e-6);
  CHECK(kind_of([&] { timemaps::p1_of_p0(m, 2.0, 0.07); }) == ErrorKind::InvalidRegime);
}

TEST_CASE("gap crossing report") {
  ModelParams p;
  p.n1 = 100.0;
  p.alpha = 3.7;
  p.beta = 6.7;
  const auto rep = timemaps::check_gap_crossing(p, 0.08);
  CHECK(rep.direct);
  CHECK(rep.sufficient);
  CHECK(rep.direct_margin == doctest::Approx(rep.half_low - rep.sigma0).epsilon(1e-12));
  CHECK(rep.sufficient_margin == doctest::Approx(rep.p1 - rep.b_n1 / rep.kappa).epsilon(1e-12));

  // The κ route is only sufficient: short low phases keep κ near 1.
  bool found = false;
  for (double low = 0.05; low < 3.0 && !found; low += 0.05) {
    ModelParams q = p;
    q.beta = q.alpha + low;
    const auto r = timemaps::check_gap_crossing(q, 0.08);
    if (r.direct && !r.sufficient) found = true;
  }
  CHECK(found);
}

TEST_CASE("property: sandwich holds strictly") {
  oracle::Gen gen(21);
  for (int i = 0; i < 200; ++i) {
    const double g = gen.log_uniform(0.02, 1.0), a = gen.uniform(0.1, 0.6);
    const Model m = cubic(g, a);
    const double mu = gen.uniform(0.01, 0.99) * m.m0star();
    const double p0 = gen.uniform(0.01, 0.9);
    const double xi = gen.uniform(p0 + 1e-3, 1.0);
    const double s = timemaps::sigma(m, mu, p0, xi);
    const auto [lo, hi] = timemaps::sigma_bounds(m, mu, p0, xi);
    CHECK(lo < s);
    CHECK(s < hi);
  }
}

TEST_CASE("property: time maps agree with the flow oracle") {
  oracle::Gen gen(22);
  const Model m = cubic(0.1, 0.4);
  for (int i = 0; i < 50; ++i) {
    const double mu = gen.uniform(0.05, 0.95) * m.m0star();
    const double p0 = gen.uniform(0.02, 0.3);
    const double xi = gen.uniform(p0 + 0.02, 1.0);
    CHECK(timemaps::sigma(m, mu, p0, xi) ==
          doctest::Approx(transit_oracle(0.1, 0.4, mu, p0, xi)).epsilon(1e-6));
  }
  for (int i = 0; i < 50; ++i) {
    const double mu = gen.log_uniform(3.5, 200.0);
    const double x0 = gen.uniform(0.02, 0.38);
    CHECK(timemaps::tau(m, mu, x0).period == doctest::Approx(return_oracle(0.1, 0.4, mu, x0)).epsilon(1e-6));
  }
}

TEST_CASE("property: half-transit is time-reversible") {
  oracle::Gen gen(23);
  const Model m = cubic(0.1, 0.4);
  for (int i = 0; i < 20; ++i) {
    const double mu = gen.uniform(0.1, 0.9) * m.m0star();
    const double p0 = gen.uniform(0.03, 0.3), xi = gen.uniform(p0 + 0.05, 0.9);
    const oracle::Cubic f{0.1, 0.4, mu};
    const real level = f.energy({p0, 0});
    const real yxi = std::sqrt(2 * (level - f.energy({xi, 0})));
    // From (ξ, −y_ξ) forward until y returns to 0, which happens at (p0, 0).
    const real back = oracle::first_event(f, {xi, -yxi}, [](oracle::Point z) { return z.y; }, 500);
    const double fwd = timemaps::sigma(m, mu, p0, xi);
    CHECK(std::abs(static_cast<double>(back) - fwd) <= 1e-8 * std::max(1.0, fwd));
  }
}

TEST_CASE("property: conjugate abscissa residual") {
  oracle::Gen gen(24);
  const Model m = cubic(0.1, 0.4);
  for (int i = 0; i < 100; ++i) {
    const double mu = gen.log_uniform(3.5, 1e3);
    const double p0 = gen.uniform(1e-3, 0.39);
    const double p1 = timemaps::p1_of_p0(m, mu, p0);
    CHECK(std::abs(m.energy(mu, p1, 0.0) - m.energy(mu, p0, 0.0)) <= 1e-10);
    CHECK(p1 > m.equilibria(mu).first);
    CHECK(p1 < m.b_mu(mu));
  }
}
