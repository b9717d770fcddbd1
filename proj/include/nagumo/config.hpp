#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nagumo/horseshoe.hpp"
#include "nagumo/model.hpp"
#include "nagumo/ode.hpp"
#include "nagumo/symbolic.hpp"

namespace nagumo {

/// Everything a command needs, read from flat `key = value` text.
/// Lines may carry `#` comments; unknown keys are errors.
struct RunConfig {
  ModelParams params;
  std::optional<double> pbar0;
  double pbar0_fraction = 0.95;  ///< pbar0 = fraction · p* when pbar0 is absent
  std::optional<double> p0;
  std::optional<double> mu_bar;

  ode::Tolerances tol{};
  int paths = 64;
  double refine_tol = 1e-10;
  int p_symbols = 2;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::string out = "out";

  // orbit
  double x0 = 0.5;
  double y0 = 0.0;
  int periods = 3;

  // levelsets and timemap
  std::optional<double> mu;
  std::vector<double> levels;
  std::vector<double> through;
  std::vector<double> queries;
  int random_queries = 0;

  // symbolic
  double periodic_tol = 1e-9;
  int search_grid = 64;

  /// scan.<name> = lo:hi:count or v1, v2, … over n0, n1, alpha, beta, low, p_symbols.
  std::map<std::string, std::vector<double>> scan;

  /// Keys present in the source, for `require` and for echoing.
  std::set<std::string> given;
  std::string source = "<defaults>";

  /// Throws ParseError naming the source, line and key.
  static RunConfig parse(std::istream& is, const std::string& source);
  static RunConfig parse_string(std::string_view text, const std::string& source = "<string>");
  static RunConfig load(const std::string& path);

  /// Throws ParseError("missing config key …") for the first absent key.
  void require(std::initializer_list<std::string_view> keys) const;
  bool has(std::string_view key) const { return given.count(std::string(key)) > 0; }

  /// pbar0 as given, else pbar0_fraction · p*.
  double resolved_pbar0() const;
  /// p0 as given, else (pbar0 + p*)/2.
  double resolved_p0(double pbar0) const;

  horseshoe::StretchOptions stretch() const;
  horseshoe::CertifyOptions certify() const;
  symbolic::SearchOptions search() const;

  /// Effective configuration after defaulting, one `prefix key = value` per line.
  void write(std::ostream& os, std::string_view prefix = "# ") const;
};

/// "lo:hi:count" (count ≥ 0, inclusive ends) or a comma-separated list.
std::vector<double> parse_range(std::string_view text);

}  // namespace nagumo
