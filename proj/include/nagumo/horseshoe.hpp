#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nagumo/flow.hpp"
#include "nagumo/model.hpp"
#include "nagumo/ode.hpp"

namespace nagumo::horseshoe {

/// Energy coordinates (ℰ₁, ℰ₀) of a phase point.
struct Chart {
  double e1 = 0.0;
  double e0 = 0.0;
};

enum class Side { Left, Right };

/// The annulus M¹_c, the band W and the two rectangles A (upper) and B (lower).
/// Immutable once built.
struct RegionSet {
  ModelParams params;
  double pbar0 = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double c = 0.0;          ///< ℰ₁(pbar0, 0)
  double a_n1 = 0.0;       ///< centre abscissa of (E₁)
  double center_energy = 0.0;  ///< ℰ₁(a_n1, 0)
  double e0_hi = 0.0;      ///< ℰ₀(p0, 0)
  double e0_lo = 0.0;      ///< ℰ₀(p1, 0)
  double p_star = 0.0;
  double pbar0_plus = 0.0;

  Model model() const { return params.model(); }
  double e1(PhaseState z) const;
  double e0(PhaseState z) const;
  Chart to_chart(PhaseState z) const { return {e1(z), e0(z)}; }
  /// Inverse chart on the branch x ∈ (a, 1); `upper` picks y ≥ 0.
  /// Throws ChartInversionFailure when (e1, e0) has no such preimage.
  PhaseState from_chart(Chart ch, bool upper = true) const;

  bool in_M1c(PhaseState z) const;
  bool in_Nc(PhaseState z) const;
  bool in_W(PhaseState z) const;
  bool in_A(PhaseState z) const;
  bool in_B(PhaseState z) const;

  /// Points of a side arc: A sides are ℰ₁ = c (left) and ℰ₁ = 0 (right),
  /// B sides are ℰ₀ = e0_hi (left) and ℰ₀ = e0_lo (right).
  std::vector<PhaseState> side_A(Side side, int n) const;
  std::vector<PhaseState> side_B(Side side, int n) const;
};

struct RegionOptions {
  /// Require n0 < m0star < m2star < n1 and pbar0 < p0 < p*.
  bool enforce_regime = true;
  std::optional<double> mu_bar;
  int inclusion_grid = 48;
};

RegionSet build_regions(const ModelParams& params, double pbar0, double p0,
                        const RegionOptions& opts = {});

/// p* = min(p̌₀, p̂₀).
double p_star(const ModelParams& params, std::optional<double> mu_bar = {});
/// (pbar0 + p*)/2.
double default_p0(const ModelParams& params, double pbar0, std::optional<double> mu_bar = {});

struct SeparationReport {
  double min_zeta = 0.0;
  double argmin = 0.0;
  double floor = 0.0;       ///< ½g(p0² − pbar0²)
  double pbar0_plus = 0.0;
  double a_n1 = 0.0;
  bool center_inside = false;  ///< a_n1 ≤ pbar0⁺
  bool holds = false;            ///< min ζ > 0
};

/// ζ(x) = ζ₁(x, pbar0) − ζ₀(x, p0) on 1000 points of [p0, a_n1].
SeparationReport check_separation_claim(const ModelParams& params, double pbar0, double p0);

/// j with θ ∈ [−(4j+1)π/2, −2jπ], 1 ≤ j ≤ p_symbols.
std::optional<int> symbol_of_angle(double theta, int p_symbols);
std::optional<int> classify_symbol(const RegionSet& regions, PhaseState z, int p_symbols,
                                   const ode::Tolerances& tol = {});

/// ℰ₁/c along a crossing path: 1 at t = 0, 0 at t = 1, logarithmic in between
/// so that the thin bands accumulating at the homoclinic side stay resolvable.
double path_energy_fraction(double t);

/// Crossing path of A from A⁻_l to A⁻_r at ℰ₀ = profile·e0_hi + (1 − profile)·e0_lo.
PhaseState path_point(const RegionSet& regions, double profile, double t);
std::vector<PhaseState> sample_crossing_path(const RegionSet& regions, double profile,
                                             int n_points);

enum class MapId { Psi1, Psi0, Psi };
std::string to_string(MapId id);

struct Subinterval {
  double t1 = 0.0;
  double t2 = 0.0;
  double side_residual = 0.0;  ///< bisection width in the target side coordinate
  double margin = 0.0;
};

struct PathRecord {
  double profile = 0.0;
  bool pass = false;
  std::string note;
  /// For band j (index j−1): path parameters where θ(α) first reaches
  /// −(4j+1)π/2 and −2jπ; NaN if never reached. Band 1 gives (t′₁, t′₂),
  /// band 2 gives (t″₁, t″₂).
  std::vector<std::pair<double, double>> band_params;
  /// Parameters increase as j decreases: t″₁ < t″₂ < t′₁ < t′₂ for two symbols.
  bool order_ok = false;
  std::optional<Subinterval> sub;
  int evaluations = 0;
};

struct StretchReport {
  MapId map = MapId::Psi1;
  int symbol = 0;  ///< 0 selects the whole of B (for ψ₀)
  std::string source;
  std::string target;
  std::vector<PathRecord> paths;
  bool pass = false;
  double min_margin = 0.0;
  int passed_paths = 0;
};

struct StretchOptions {
  int paths = 64;
  double refine_tol = 1e-10;
  int p_symbols = 2;
  ode::Tolerances tol{};
  int max_evals_per_path = 40000;
  unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Checks (D_symbol, map): source ⊲⇝ target along `paths` crossing paths.
/// For ψ₁ the target is B, for ψ₀ the source is B and the target A, for ψ
/// the source is D_symbol ⊆ A and the target A.
StretchReport verify_stretch(const RegionSet& regions, MapId map, int symbol,
                             const StretchOptions& opts = {});

/// One path of verify_stretch at an arbitrary profile in [0, 1].
PathRecord trace_path(const RegionSet& regions, MapId map, int symbol, double profile,
                      const StretchOptions& opts = {});

/// Joint verification for every symbol under ψ₁ and ψ, plus ψ₀ on B, reusing
/// one adaptive sampling per path.
std::vector<StretchReport> verify_all_stretches(const RegionSet& regions,
                                                const StretchOptions& opts);

struct Stage {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, std::string>> values;
};

struct Certificate {
  ModelParams params;
  double pbar0 = 0.0;
  double p0 = 0.0;
  int p_symbols = 2;
  int paths = 0;
  double refine_tol = 0.0;
  double integration_tol = 0.0;
  bool pass = false;
  std::string first_failure;
  std::vector<Stage> stages;
  std::vector<StretchReport> stretches;
  double min_margin = 0.0;

  void write(std::ostream& os) const;
  /// One row per (map, symbol, path) with crossing parameters and margins.
  void write_paths_csv(std::ostream& os) const;
};

struct CertifyOptions {
  StretchOptions stretch{};
  std::optional<double> mu_bar;
};

Certificate certify_horseshoe(const ModelParams& params, double pbar0, double p0,
                              const CertifyOptions& opts = {});

}  // namespace nagumo::horseshoe
