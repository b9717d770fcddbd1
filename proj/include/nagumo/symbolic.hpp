#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nagumo/horseshoe.hpp"
#include "nagumo/model.hpp"
#include "nagumo/ode.hpp"
#include "nagumo/taylor.hpp"

namespace nagumo::symbolic {

/// A block of symbols over {1, …, p}. A periodic itinerary stores one period.
struct Itinerary {
  std::vector<int> symbols;
  bool periodic = true;

  /// Parses "1,2,1" (spaces allowed). Throws ParseError on malformed input.
  static Itinerary parse(std::string_view text, bool periodic = true);
  std::size_t size() const noexcept { return symbols.size(); }
  int at(std::size_t k) const { return symbols[k % symbols.size()]; }
  std::string str() const;
  /// Throws InvalidArgument when empty or a symbol lies outside [1, p_symbols].
  void validate(int p_symbols) const;
};

/// Strict maxima and minima of x during a high phase that carries `symbol`.
constexpr std::pair<int, int> expected_extrema(int symbol) { return {symbol + 1, symbol}; }

/// Checks of one period block [kβ, (k+1)β].
struct BlockCheck {
  int block = 0;
  int symbol = 0;
  int maxima = 0;
  int minima = 0;
  bool counts_ok = false;
  double min_convexity = 0.0;  ///< min of g x − n0 F(x) over the low phase
  bool convex_ok = false;
  double slope_alpha = 0.0;  ///< x′ at the switch to the low phase
  double slope_beta = 0.0;   ///< x′ at the end of the block
  bool slopes_ok = false;
  double inf_x = 0.0;
  double sup_x = 0.0;
  bool confined = false;
  bool pass = false;
  std::string note;
};

struct ItineraryReport {
  Itinerary itinerary;
  int horizon_blocks = 0;
  bool restarted = false;  ///< each block integrated from its own anchor
  bool pass = false;
  std::string first_failure;
  double min_convexity = 0.0;
  double min_slope_margin = 0.0;  ///< min(−x′(α), x′(β)) over blocks
  double inf_x = 0.0;
  double sup_x = 0.0;
  std::vector<BlockCheck> blocks;

  void write(std::ostream& os) const;
};

/// Integrates the switched flow from z over horizon_blocks periods and checks
/// every block against its symbol. Violations are reported, never thrown.
ItineraryReport verify_itinerary(const ModelParams& params, PhaseState z, const Itinerary& itinerary,
                                 int horizon_blocks, const ode::Tolerances& tol = {});

/// Same checks, but block k starts from anchors[k mod anchors.size()]. A single
/// long integration through strongly expanding blocks loses the orbit after a
/// few periods; restarting from the polished anchors does not.
ItineraryReport verify_itinerary(const ModelParams& params,
                                 const std::vector<taylor::State>& anchors,
                                 const Itinerary& itinerary, int horizon_blocks,
                                 const ode::Tolerances& tol = {});

struct SearchOptions {
  double tol = 1e-9;      ///< bound on the largest shooting defect
  int grid = 64;          ///< initial number of crossing paths per symbol
  int max_grid = 512;     ///< grid doubling stops here
  int max_iter = 60;      ///< Newton iterations
  int verify_periods = 2;
  horseshoe::StretchOptions stretch{};  ///< path sampling (p_symbols lives here)
};

struct PeriodicOrbit {
  Itinerary itinerary;
  /// z_k ∈ D_{i_k} with ψ(z_k) = z_{k+1}, indices mod m; extended precision.
  std::vector<taylor::State> anchors;
  int m = 0;
  /// max_k ‖ψ(z_k) − z_{k+1}‖.
  double residual = 0.0;
  /// ‖ψᵐ(z₀) − z₀‖ by one uninterrupted composition; grows with the expansion.
  double closure = 0.0;
  std::vector<int> symbols;   ///< classification of each anchor
  std::vector<double> theta;  ///< θ(α) of each anchor
  int newton_iterations = 0;
  int grid_used = 0;
  ItineraryReport verification;

  PhaseState anchor(std::size_t k = 0) const { return taylor::to_phase(anchors.at(k)); }
  void write(std::ostream& os) const;
  /// One full period mβ as t,x,y rows with 17 significant digits.
  void write_csv(std::ostream& os, const ModelParams& params, const ode::Tolerances& tol = {}) const;
};

/// Locates an mβ-periodic solution realizing a periodic itinerary.
/// Throws NotFound when no seed realizes a symbol, PolishDiverged when Newton
/// fails or ends outside the prescribed sets.
PeriodicOrbit find_periodic(const ModelParams& params, const horseshoe::RegionSet& regions,
                            const Itinerary& itinerary, const SearchOptions& opts = {});

struct ShadowResult {
  Itinerary itinerary;
  /// (z, ψ(z), …, ψ^{L−1}(z)) as a pseudo-orbit with defects ≤ residual.
  std::vector<taylor::State> points;
  double residual = 0.0;
  /// Steps for which one uninterrupted iteration of ψ from z keeps the prescribed symbols.
  int matched_depth = 0;
  ItineraryReport verification;

  std::vector<PhaseState> phase_points() const;
};

/// Realizes a finite block of length L along a pseudo-orbit. Throws NotFound
/// with the deepest matched prefix when no realization is found.
ShadowResult shadow_finite(const ModelParams& params, const horseshoe::RegionSet& regions,
                           const Itinerary& itinerary, const SearchOptions& opts = {});

}  // namespace nagumo::symbolic
