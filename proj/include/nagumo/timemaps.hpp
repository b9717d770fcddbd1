#pragma once

#include <utility>

#include "nagumo/model.hpp"

namespace nagumo::timemaps {

/// Half-transit time σ(p0, ξ) along the level line of (E) through (p0, 0),
/// for 0 < mu < m0star and 0 < p0 < xi <= 1.
double sigma(const Model& model, double mu, double p0, double xi);

/// Lower and upper cosh⁻¹ bounds bracketing sigma.
std::pair<double, double> sigma_bounds(const Model& model, double mu, double p0, double xi);

struct Period {
  double period = 0.0;
  double x1 = 0.0;  ///< conjugate turning point in (a_mu, b_mu)
};

/// Minimal period of the closed orbit of (E) through (x0, 0), mu > m1star.
Period tau(const Model& model, double mu, double x0);

/// √2 ∫_{x0}^{x0⁺} ds / √(𝓕(x0) − 𝓕(s)), the large-weight limit of τ√mu.
double tau_limit(const Model& model, double x0);

struct GapAnchor {
  double value = 0.0;            ///< p̌₀
  bool monotone_on_grid = true;  ///< σ₀(·, a) decreasing on the check grid
};

/// Largest p̌₀ with σ₀(p0, a) > (β − α)/2 for all p0 <= p̌₀.
GapAnchor p_check0(const ModelParams& params);

/// Abscissa p1 in (a_{n1}, b_{n1}) on the (E₁) level line through (p0, 0).
double p1_of_p0(const Model& model, double n1, double p0);

struct GapCrossingReport {
  double p0 = 0.0;
  double p1 = 0.0;
  double b_n1 = 0.0;
  double kappa = 0.0;
  double sigma0 = 0.0;            ///< σ₀(p1, b_{n1})
  double half_low = 0.0;          ///< (β − α)/2
  bool direct = false;            ///< σ₀(p1, b_{n1}) < (β − α)/2
  double direct_margin = 0.0;     ///< (β − α)/2 − σ₀
  bool sufficient = false;        ///< p1 > b_{n1}/κ
  double sufficient_margin = 0.0; ///< p1 − b_{n1}/κ
};

GapCrossingReport check_gap_crossing(const ModelParams& params, double p0);

}  // namespace nagumo::timemaps
