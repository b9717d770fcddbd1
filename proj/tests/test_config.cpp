#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nagumo/config.hpp"
#include "nagumo/error.hpp"
#include "nagumo/figures.hpp"

using namespace nagumo;

namespace {

std::string error_of(std::string_view text) {
  try {
    RunConfig::parse_string(text, "t.conf");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    return e.what();
  }
  return {};
}

double meta(const figures::Table& t, const std::string& key) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return std::stod(v);
  FAIL("missing meta " << key);
  return NAN;
}

}  // namespace

TEST_CASE("config values and defaults") {
  const auto cfg = RunConfig::parse_string(
      "# comment\n"
      "g = 0.2   # trailing\n"
      "n1 = 50\n"
      "alpha = 3\n"
      "low = 2\n"
      "tol = 1e-9\n"
      "levels = -0.1, 0, 0.1\n");
  CHECK(cfg.params.g == 0.2);
  CHECK(cfg.params.n1 == 50.0);
  CHECK(cfg.params.beta == doctest::Approx(5.0));
  CHECK(cfg.tol.rel == 1e-9);
  CHECK(cfg.tol.abs == doctest::Approx(1e-11));
  CHECK(cfg.levels == std::vector<double>{-0.1, 0.0, 0.1});
  CHECK(cfg.paths == 64);
  CHECK(cfg.has("low"));
  CHECK_FALSE(cfg.has("beta"));
  CHECK_NOTHROW(cfg.require({"n1", "beta"}));
  CHECK_THROWS_AS(cfg.require({"n0"}), Error);
}

TEST_CASE("config errors name the line and key") {
  CHECK(error_of("g = 0.1\nbogus = 1\n").find("t.conf:2") != std::string::npos);
  CHECK(error_of("g = 0.1\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(error_of("n1 = 1\nn1 = 2\n").find("t.conf:2") != std::string::npos);
  CHECK(error_of("n1 =\n").find("n1") != std::string::npos);
  CHECK(error_of("n1 = ten\n").find("n1") != std::string::npos);
  CHECK(error_of("no equals sign\n").find("t.conf:1") != std::string::npos);
  CHECK(error_of("beta = 5\nlow = 1\n").find("low") != std::string::npos);
  CHECK(error_of("paths = 2.5\n").find("paths") != std::string::npos);
  const auto cfg = RunConfig::parse_string("g = 0.1\n");
  try {
    cfg.require({"n1"});
    FAIL("expected a missing key");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing config key n1") != std::string::npos);
  }
}

TEST_CASE("ranges") {
  CHECK(parse_range("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(parse_range("2:2:1") == std::vector<double>{2.0});
  CHECK(parse_range("0:1:0").empty());
  CHECK(parse_range("1, 2.5") == std::vector<double>{1.0, 2.5});
  CHECK_THROWS_AS(parse_range("0:1"), Error);
  CHECK_THROWS_AS(parse_range("0:1:-2"), Error);
  const auto cfg = RunConfig::parse_string("scan.n1 = 10:20:3\n");
  CHECK(cfg.scan.at("n1") == std::vector<double>{10.0, 15.0, 20.0});
  CHECK(error_of("scan.g = 1:2:2\n").find("scan.g") != std::string::npos);
}

TEST_CASE("effective config echo") {
  const auto cfg = RunConfig::parse_string("n1 = 100\nalpha = 3.7\nbeta = 6.7\npbar0 = 0.08\n");
  std::ostringstream os;
  cfg.write(os);
  const std::string s = os.str();
  for (const char* key : {"# g = ", "# n1 = 100", "# alpha = ", "# pbar0 = 0.08", "# tol_rel = ", "# paths = 64"})
    CHECK_MESSAGE(s.find(key) != std::string::npos, key);
  // Echo then re-parse gives the same model.
  std::string plain;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);)
    if (line.rfind("# ", 0) == 0 && line.find(" = default") == std::string::npos &&
        line.find("source") == std::string::npos)
      plain += line.substr(2) + "\n";
  const auto again = RunConfig::parse_string(plain);
  CHECK(again.params.n1 == cfg.params.n1);
  CHECK(again.params.alpha == cfg.params.alpha);
  CHECK(again.params.beta == cfg.params.beta);
  CHECK(*again.pbar0 == *cfg.pbar0);
}

TEST_CASE("level set points lie on the level") {
  const Model m = Model(0.1, Nonlinearity::cubic(0.4));
  const auto t = figures::level_sets(m, 10.0, {-0.05, 0.0, 0.01}, 401);
  REQUIRE(t.columns == std::vector<std::string>{"mu", "level", "component", "x", "y"});
  REQUIRE(!t.rows.empty());
  for (const auto& r : t.rows) CHECK(m.energy(r[0], r[3], r[4]) == doctest::Approx(r[1]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("figure tables") {
  SUBCASE("first figure zeros") {
    const auto t = figures::figure(1, figures::figure_defaults(1));
    CHECK(meta(t, "n1_zero_lo") == doctest::Approx(0.4576160071).epsilon(1e-9));
    CHECK(meta(t, "n1_zero_hi") == doctest::Approx(0.9423839929).epsilon(1e-9));
  }
  SUBCASE("region figure constants") {
    const auto t = figures::figure(3, figures::figure_defaults(3));
    CHECK(meta(t, "c") == doctest::Approx(-0.0085043583).epsilon(1e-8));
    CHECK(meta(t, "a_n1") == doctest::Approx(0.41715728752538106).epsilon(1e-14));
    CHECK(meta(t, "pbar0_plus") == doctest::Approx(0.65249357484824411).epsilon(1e-12));
  }
  SUBCASE("csv layout") {
    const auto t = figures::figure(4, figures::figure_defaults(4));
    std::ostringstream os;
    t.write_csv(os, "# nagumo figure\n");
    const std::string s = os.str();
    CHECK(s.rfind("# nagumo figure\n", 0) == 0);
    CHECK(s.find("# p1 = ") != std::string::npos);
  }
  CHECK_THROWS_AS(figures::figure(6, figures::figure_defaults(1)), Error);
  CHECK_THROWS_AS(figures::figure(0, figures::figure_defaults(1)), Error);
}
