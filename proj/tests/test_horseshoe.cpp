#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nagumo/error.hpp"
#include "nagumo/flow.hpp"
#include "nagumo/horseshoe.hpp"
#include "oracles.hpp"

using namespace nagumo;
using namespace nagumo::horseshoe;

namespace {

constexpr double kPi = 3.14159265358979323846;

ModelParams region_params() {
  ModelParams p;
  p.g = 0.1;
  p.a = 0.4;
  p.n0 = 0.1;
  p.n1 = 10.0;
  p.alpha = 4.0;
  p.beta = 6.0;
  return p;
}

ModelParams reference_params() {
  ModelParams p;
  p.n1 = 100.0;
  p.alpha = 3.7;
  p.beta = 6.7;
  return p;
}

RegionSet loose_regions() {
  RegionOptions ro;
  ro.enforce_regime = false;
  return build_regions(region_params(), 0.07, 0.1, ro);
}

const Certificate& reference_certificate() {
  static const Certificate cert = [] {
    CertifyOptions opts;
    opts.stretch.tol = {1e-10, 1e-12};
    return certify_horseshoe(reference_params(), 0.08, default_p0(reference_params(), 0.08), opts);
  }();
  return cert;
}

const Stage* stage(const Certificate& c, const std::string& name) {
  for (const auto& s : c.stages)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("region constants") {
  const RegionSet r = loose_regions();
  // ℰ₁(0.07, 0) by hand: −½g x² + n1 𝓕(x).
  const double x = 0.07;
  const double prim = -std::pow(x, 4) / 4 + 1.4 * std::pow(x, 3) / 3 - 0.4 * x * x / 2;
  CHECK(r.c == doctest::Approx(-0.05 * x * x + 10.0 * prim).epsilon(1e-12));
  CHECK(r.c == doctest::Approx(-0.0085043583).epsilon(1e-8));
  // Centre of the high phase: larger root of s² − 1.4 s + 0.4 + 0.01 = 0 would be the saddle.
  const double disc = std::sqrt(1.4 * 1.4 - 4 * 0.41);
  CHECK(r.a_n1 == doctest::Approx((1.4 - disc) / 2).epsilon(1e-12));
  CHECK(r.a_n1 == doctest::Approx(0.41715728752538106).epsilon(1e-14));
  CHECK(r.e0_hi > r.e0_lo);
}

TEST_CASE("anchors must be ordered") {
  RegionOptions ro;
  ro.enforce_regime = false;
  try {
    build_regions(region_params(), 0.1, 0.1, ro);
    FAIL("expected AnchorOrderViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AnchorOrderViolation);
  }
}

TEST_CASE("separation floor") {
  const auto rep = check_separation_claim(region_params(), 0.07, 0.08);
  CHECK(rep.floor == doctest::Approx(7.5e-5).epsilon(1e-10));
  CHECK(rep.min_zeta >= rep.floor * (1 - 1e-9));
  CHECK(rep.holds);
}

TEST_CASE("symbol of an angle") {
  CHECK(symbol_of_angle(-2.5 * kPi, 2) == 1);
  CHECK(symbol_of_angle(-2.0 * kPi, 2) == 1);
  CHECK(symbol_of_angle(-2.2 * kPi, 2) == 1);
  CHECK(symbol_of_angle(-4.2 * kPi, 2) == 2);
  CHECK(symbol_of_angle(-4.5 * kPi, 2) == 2);
  CHECK_FALSE(symbol_of_angle(-3.0 * kPi, 2).has_value());
  CHECK_FALSE(symbol_of_angle(-1.9 * kPi, 2).has_value());
  CHECK_FALSE(symbol_of_angle(-4.6 * kPi, 2).has_value());
  CHECK_FALSE(symbol_of_angle(-4.2 * kPi, 1).has_value());
  CHECK(symbol_of_angle(-6.3 * kPi, 3) == 3);
}

TEST_CASE("crossing paths") {
  const RegionSet r = build_regions(reference_params(), 0.08, default_p0(reference_params(), 0.08));
  for (double profile : {0.0, 0.3, 1.0}) {
    const auto pts = sample_crossing_path(r, profile, 41);
    REQUIRE(pts.size() == 41);
    // Paths hug the sides, so membership is checked up to rounding.
    for (const auto& z : pts) {
      CHECK(r.e1(z) >= r.c - 1e-12);
      CHECK(r.e1(z) <= 1e-12);
      CHECK(r.e0(z) >= r.e0_lo - 1e-12);
      CHECK(r.e0(z) <= r.e0_hi + 1e-12);
      CHECK(z.x >= r.a_n1);
      CHECK(z.y >= 0.0);
    }
    CHECK(r.e1(pts.front()) == doctest::Approx(r.c).epsilon(1e-9));
    CHECK(std::abs(r.e1(pts.back())) < 1e-9);
    const double e0 = profile * r.e0_hi + (1 - profile) * r.e0_lo;
    for (const auto& z : pts) CHECK(r.e0(z) == doctest::Approx(e0).epsilon(1e-9));
  }
  CHECK(path_energy_fraction(0.0) == doctest::Approx(1.0));
  CHECK(std::abs(path_energy_fraction(1.0)) < 1e-12);
}

TEST_CASE("property: chart round trip and reflection") {
  oracle::Gen gen(41);
  const RegionSet r = loose_regions();
  for (int i = 0; i < 200; ++i) {
    const Chart ch{gen.uniform(r.c, 0.0), gen.uniform(r.e0_lo, r.e0_hi)};
    const PhaseState z = r.from_chart(ch, true);
    CHECK(r.e1(z) == doctest::Approx(ch.e1).epsilon(1e-9));
    CHECK(r.e0(z) == doctest::Approx(ch.e0).epsilon(1e-9));
    CHECK(r.in_A(z));
    CHECK(r.in_B({z.x, -z.y}));
    CHECK(r.in_W(z));
    CHECK(r.in_M1c(z));
    CHECK(r.in_Nc(z));
  }
}

TEST_CASE("sides are separate arcs") {
  const RegionSet r = loose_regions();
  const auto al = r.side_A(Side::Left, 20), ar = r.side_A(Side::Right, 20);
  const auto bl = r.side_B(Side::Left, 20), br = r.side_B(Side::Right, 20);
  for (const auto& z : al) CHECK(r.e1(z) == doctest::Approx(r.c).epsilon(1e-9));
  for (const auto& z : ar) CHECK(std::abs(r.e1(z)) < 1e-9);
  for (const auto& z : bl) CHECK(r.e0(z) == doctest::Approx(r.e0_hi).epsilon(1e-9));
  for (const auto& z : br) CHECK(r.e0(z) == doctest::Approx(r.e0_lo).epsilon(1e-9));
  for (const auto& z : al) CHECK(z.y >= 0.0);
  for (const auto& z : bl) CHECK(z.y <= 0.0);
}

TEST_CASE("reference certificate") {
  const Certificate& c = reference_certificate();
  REQUIRE(c.pass);
  CHECK((c.first_failure.empty() || c.first_failure == "none"));
  CHECK(c.min_margin > 10 * 1e-10);
  for (const auto& s : c.stages) CHECK_MESSAGE(s.pass, s.name);
  for (const char* name : {"regime", "timing", "separation", "inclusion", "band_reachability", "stretch",
                           "margins", "crossing_order"})
    CHECK(stage(c, name) != nullptr);
  bool psi0 = false;
  for (const auto& rep : c.stretches) {
    CHECK(rep.pass);
    CHECK(rep.paths.size() >= 64);
    CHECK(rep.min_margin > 10 * 1e-10);
    if (rep.map == MapId::Psi0) psi0 = true;
    for (const auto& path : rep.paths) {
      CHECK(path.pass);
      if (rep.map != MapId::Psi0) CHECK(path.order_ok);
    }
  }
  CHECK(psi0);

  std::ostringstream os;
  c.write(os);
  CHECK(os.str().find("pass = true") != std::string::npos);
}

TEST_CASE("stretch subintervals compose") {
  const Certificate& c = reference_certificate();
  const ModelParams p = reference_params();
  const RegionSet r = build_regions(p, c.pbar0, c.p0);
  for (const auto& rep : c.stretches) {
    if (rep.map != MapId::Psi) continue;
    for (std::size_t k = 0; k < rep.paths.size(); k += 8) {
      const auto& path = rep.paths[k];
      REQUIRE(path.sub.has_value());
      const double t = 0.5 * (path.sub->t1 + path.sub->t2);
      const PhaseState z = path_point(r, path.profile, t);
      CHECK(classify_symbol(r, z, 2) == rep.symbol);
      const PhaseState w1 = flow::poincare(p, z);
      const PhaseState w2 = flow::poincare_psi0(p, flow::poincare_psi1(p, z));
      CHECK(std::hypot(w1.x - w2.x, w1.y - w2.y) < 1e-11);
      CHECK(r.in_A(w1));
      CHECK(r.in_B(flow::poincare_psi1(p, z)));
    }
  }
}

TEST_CASE("certification failures") {
  CertifyOptions opts;
  opts.stretch.paths = 8;

  SUBCASE("anchor beyond p*") {
    const ModelParams p = reference_params();
    const double ps = p_star(p);
    const auto c = certify_horseshoe(p, 0.08, ps * 1.01, opts);
    CHECK_FALSE(c.pass);
    CHECK(c.first_failure == "timing");
  }
  SUBCASE("low weight above m0star") {
    ModelParams p = reference_params();
    p.n0 = 1.2;
    const auto c = certify_horseshoe(p, 0.08, 0.082, opts);
    CHECK_FALSE(c.pass);
    CHECK(c.first_failure == "regime");
  }
  SUBCASE("high weight just above the homoclinic threshold") {
    ModelParams p = reference_params();
    p.n1 = 1.01 * 3.0;
    const auto c = certify_horseshoe(p, 0.08, 0.082, opts);
    CHECK_FALSE(c.pass);
    CHECK((c.first_failure == "regime" || c.first_failure == "band_reachability"));
  }
  SUBCASE("very short low phase") {
    ModelParams p = reference_params();
    p.beta = p.alpha + 0.01;
    const auto c = certify_horseshoe(p, 0.08, 0.082, opts);
    CHECK_FALSE(c.pass);
    CHECK((c.first_failure == "regime" || c.first_failure == "timing"));
  }
  SUBCASE("short high phase cannot reach the second band") {
    ModelParams p = reference_params();
    p.alpha = 1.0;
    p.beta = 4.0;
    const auto c = certify_horseshoe(p, 0.08, default_p0(p, 0.08), opts);
    CHECK_FALSE(c.pass);
    CHECK(c.first_failure == "band_reachability");
  }
}
