#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nagumo/error.hpp"
#include "nagumo/flow.hpp"
#include "nagumo/symbolic.hpp"

using namespace nagumo;
using namespace nagumo::symbolic;

namespace {

ModelParams reference_params() {
  ModelParams p;
  p.n1 = 100.0;
  p.alpha = 3.7;
  p.beta = 6.7;
  return p;
}

const horseshoe::RegionSet& reference_regions() {
  static const horseshoe::RegionSet r =
      horseshoe::build_regions(reference_params(), 0.08, horseshoe::default_p0(reference_params(), 0.08));
  return r;
}

SearchOptions search_options() {
  SearchOptions o;
  o.stretch.tol = {1e-10, 1e-12};
  return o;
}

double dist(PhaseState u, PhaseState v) { return std::hypot(u.x - v.x, u.y - v.y); }

}  // namespace

TEST_CASE("itinerary text") {
  const auto it = Itinerary::parse("1, 2,1");
  CHECK(it.symbols == std::vector<int>{1, 2, 1});
  CHECK(it.at(4) == 2);
  CHECK(Itinerary::parse(it.str()).symbols == it.symbols);
  for (const char* bad : {"", "1,,2", "a", "1,2,", "-1"}) {
    CHECK_THROWS_AS(Itinerary::parse(bad), Error);
  }
  CHECK_NOTHROW(it.validate(2));
  CHECK_THROWS_AS(it.validate(1), Error);
  CHECK_THROWS_AS(Itinerary::parse("0").validate(2), Error);
  CHECK(expected_extrema(1) == std::pair{2, 1});
  CHECK(expected_extrema(3) == std::pair{4, 3});
}

TEST_CASE("fixed points of each symbol") {
  const ModelParams p = reference_params();
  for (int j : {1, 2}) {
    const auto orb = find_periodic(p, reference_regions(), Itinerary::parse(std::to_string(j)), search_options());
    CHECK(orb.residual <= 1e-9);
    CHECK(orb.symbols == std::vector<int>{j});
    CHECK(reference_regions().in_A(orb.anchor()));
    CHECK(orb.verification.pass);
    for (const auto& b : orb.verification.blocks) {
      CHECK(b.maxima == j + 1);
      CHECK(b.minima == j);
      CHECK(b.min_convexity > 0.0);
      CHECK(b.slope_alpha < 0.0);
      CHECK(b.slope_beta > 0.0);
      CHECK(b.confined);
    }
    CHECK(orb.verification.inf_x > 0.0);
    CHECK(orb.verification.sup_x < 1.0);
  }
}

TEST_CASE("two-cycle and its shift") {
  const ModelParams p = reference_params();
  const auto a = find_periodic(p, reference_regions(), Itinerary::parse("1,2"), search_options());
  const auto b = find_periodic(p, reference_regions(), Itinerary::parse("2,1"), search_options());
  REQUIRE(a.anchors.size() == 2);
  REQUIRE(b.anchors.size() == 2);
  CHECK(a.residual <= 1e-9);
  CHECK(a.symbols == std::vector<int>{1, 2});
  CHECK(b.symbols == std::vector<int>{2, 1});
  // ψ carries z₀ onto z₁, and the shifted word gives the same orbit.
  // The map expands by about 1e7 per step, so compare in extended precision.
  CHECK(dist(taylor::to_phase(taylor::psi(p, a.anchors[0])), a.anchor(1)) < 1e-8);
  CHECK(dist(a.anchor(1), b.anchor(0)) < 1e-8);
  CHECK(dist(a.anchor(0), b.anchor(1)) < 1e-8);
  CHECK(a.verification.pass);
  CHECK(a.verification.min_convexity > 0.0);
  CHECK(a.verification.blocks.size() >= 2);
}

TEST_CASE("the centre is not a horseshoe orbit") {
  const ModelParams p = reference_params();
  const double an1 = p.model().equilibria(p.n1).first;
  const auto rep = verify_itinerary(p, PhaseState{an1, 0.0}, Itinerary::parse("1"), 2);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.first_failure.empty());
}

TEST_CASE("finite blocks") {
  const ModelParams p = reference_params();
  SUBCASE("one symbol") {
    const auto res = shadow_finite(p, reference_regions(), Itinerary::parse("2", false), search_options());
    REQUIRE(res.points.size() == 1);
    CHECK(res.verification.pass);
  }
  SUBCASE("six symbols") {
    const auto it = Itinerary::parse("1,2,1,1,2,2", false);
    const auto res = shadow_finite(p, reference_regions(), it, search_options());
    REQUIRE(res.points.size() == 6);
    CHECK(res.residual <= 1e-9);
    REQUIRE(res.verification.blocks.size() == 6);
    const int want[] = {2, 3, 2, 2, 3, 3};
    for (int k = 0; k < 6; ++k) CHECK(res.verification.blocks[k].maxima == want[k]);
    CHECK(res.verification.pass);
    CHECK(res.verification.min_convexity > 0.0);
  }
}

TEST_CASE("orbit report output") {
  const ModelParams p = reference_params();
  const auto orb = find_periodic(p, reference_regions(), Itinerary::parse("1"), search_options());
  std::ostringstream os;
  orb.write_csv(os, p);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x,y", 0) == 0);
  std::ostringstream txt;
  orb.write(txt);
  CHECK(txt.str().find("residual") != std::string::npos);
}
