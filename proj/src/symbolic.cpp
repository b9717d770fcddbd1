#include "nagumo/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "nagumo/flow.hpp"
#include "nagumo/parallel.hpp"

namespace nagumo::symbolic {

using taylor::real;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSample = 1e-3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

}  // namespace

// ------------------------------------------------------------------ itinerary

Itinerary Itinerary::parse(std::string_view text, bool periodic) {
  Itinerary it;
  it.periodic = periodic;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
    if (tok.empty() || tok.size() > 3 ||
        !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorKind::ParseError,
                  "itinerary '" + std::string(text) + "': expected comma-separated symbols");
    it.symbols.push_back(std::stoi(std::string(tok)));
    pos = end + 1;
  }
  if (it.symbols.empty()) throw Error(ErrorKind::ParseError, "empty itinerary");
  return it;
}

std::string Itinerary::str() const {
  std::string s;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(symbols[i]);
  }
  return s;
}

void Itinerary::validate(int p_symbols) const {
  if (symbols.empty()) throw Error(ErrorKind::InvalidArgument, "empty itinerary");
  for (int s : symbols)
    if (s < 1 || s > p_symbols)
      throw Error(ErrorKind::InvalidArgument, "symbol " + std::to_string(s) + " outside 1.." +
                                                  std::to_string(p_symbols));
}

// --------------------------------------------------------------- verification

namespace {

/// Checks the block [t0, t0 + β] of `traj` against `symbol`.
BlockCheck check_block(const ModelParams& params, const flow::Trajectory& traj, double t0,
                       int block, int symbol) {
  BlockCheck bc;
  bc.block = block;
  bc.symbol = symbol;
  const double ts = t0 + params.alpha, t1 = t0 + params.beta;
  const Model& model = traj.model();

  try {
    const auto [nmax, nmin] = flow::count_extrema(traj, t0, ts);
    bc.maxima = nmax;
    bc.minima = nmin;
    bc.counts_ok = std::pair{nmax, nmin} == expected_extrema(symbol);
  } catch (const Error& e) {
    bc.note = e.what();
  }

  bc.min_convexity = kInf;
  bc.inf_x = kInf;
  bc.sup_x = -kInf;
  const auto n = static_cast<long>(std::ceil(params.beta / kSample));
  for (long i = 0; i <= n; ++i) {
    const double t = i == n ? t1 : t0 + params.beta * static_cast<double>(i) / static_cast<double>(n);
    const double x = traj.state_at(t).x;
    bc.inf_x = std::min(bc.inf_x, x);
    bc.sup_x = std::max(bc.sup_x, x);
    if (t >= ts) bc.min_convexity = std::min(bc.min_convexity, model.g() * x - params.n0 * model.F().F(x));
  }
  for (const flow::Node& nd : traj.nodes()) {
    if (nd.t < t0 || nd.t > t1) continue;
    bc.inf_x = std::min(bc.inf_x, nd.x);
    bc.sup_x = std::max(bc.sup_x, nd.x);
    if (nd.t >= ts)
      bc.min_convexity = std::min(bc.min_convexity, model.g() * nd.x - params.n0 * model.F().F(nd.x));
  }
  for (const flow::Event& e : traj.events()) {
    if (e.kind == flow::EventKind::Switch || e.t < t0 || e.t > t1) continue;
    bc.inf_x = std::min(bc.inf_x, e.x);
    bc.sup_x = std::max(bc.sup_x, e.x);
  }
  bc.convex_ok = bc.min_convexity > 0.0;
  bc.slope_alpha = traj.state_at(ts).y;
  bc.slope_beta = traj.state_at(t1).y;
  bc.slopes_ok = bc.slope_alpha < 0.0 && bc.slope_beta > 0.0;
  bc.confined = bc.inf_x > 0.0 && bc.sup_x < 1.0;
  bc.pass = bc.counts_ok && bc.convex_ok && bc.slopes_ok && bc.confined;
  if (!bc.pass && bc.note.empty()) {
    if (!bc.counts_ok)
      bc.note = "extrema (" + std::to_string(bc.maxima) + "," + std::to_string(bc.minima) +
                ") where symbol " + std::to_string(symbol) + " needs (" +
                std::to_string(expected_extrema(symbol).first) + "," +
                std::to_string(expected_extrema(symbol).second) + ")";
    else if (!bc.convex_ok)
      bc.note = "low phase not convex";
    else if (!bc.slopes_ok)
      bc.note = "slope signs at the switches";
    else
      bc.note = "left (0, 1)";
  }
  return bc;
}

void summarize(ItineraryReport& rep) {
  rep.pass = !rep.blocks.empty();
  rep.min_convexity = kInf;
  rep.min_slope_margin = kInf;
  rep.inf_x = kInf;
  rep.sup_x = -kInf;
  for (const BlockCheck& b : rep.blocks) {
    rep.min_convexity = std::min(rep.min_convexity, b.min_convexity);
    rep.min_slope_margin = std::min({rep.min_slope_margin, -b.slope_alpha, b.slope_beta});
    rep.inf_x = std::min(rep.inf_x, b.inf_x);
    rep.sup_x = std::max(rep.sup_x, b.sup_x);
    if (!b.pass && rep.pass) {
      rep.pass = false;
      rep.first_failure = "block " + std::to_string(b.block) + ": " + b.note;
    }
  }
}

}  // namespace

ItineraryReport verify_itinerary(const ModelParams& params, PhaseState z, const Itinerary& itinerary,
                                 int horizon_blocks, const ode::Tolerances& tol) {
  if (horizon_blocks < 1) throw Error(ErrorKind::InvalidArgument, "horizon_blocks must be positive");
  if (itinerary.symbols.empty()) throw Error(ErrorKind::InvalidArgument, "empty itinerary");
  ItineraryReport rep;
  rep.itinerary = itinerary;
  rep.horizon_blocks = horizon_blocks;
  const auto traj = flow::flow_switched(params, z, horizon_blocks * params.beta, tol);
  for (int k = 0; k < horizon_blocks; ++k)
    rep.blocks.push_back(check_block(params, traj, k * params.beta, k, itinerary.at(k)));
  summarize(rep);
  return rep;
}

ItineraryReport verify_itinerary(const ModelParams& params,
                                 const std::vector<taylor::State>& anchors,
                                 const Itinerary& itinerary, int horizon_blocks,
                                 const ode::Tolerances& tol) {
  if (horizon_blocks < 1) throw Error(ErrorKind::InvalidArgument, "horizon_blocks must be positive");
  if (anchors.empty() || itinerary.symbols.empty())
    throw Error(ErrorKind::InvalidArgument, "need anchors and symbols");
  ItineraryReport rep;
  rep.itinerary = itinerary;
  rep.horizon_blocks = horizon_blocks;
  rep.restarted = true;
  for (int k = 0; k < horizon_blocks; ++k) {
    const PhaseState z = taylor::to_phase(anchors[static_cast<std::size_t>(k) % anchors.size()]);
    const auto traj = flow::flow_switched(params, z, params.beta, tol);
    BlockCheck bc = check_block(params, traj, 0.0, k, itinerary.at(k));
    rep.blocks.push_back(bc);
  }
  summarize(rep);
  return rep;
}

void ItineraryReport::write(std::ostream& os) const {
  os << "verification:\n";
  os << "  itinerary = " << itinerary.str() << "\n";
  os << "  horizon_blocks = " << horizon_blocks << "\n";
  os << "  restarted_from_anchors = " << (restarted ? "true" : "false") << "\n";
  os << "  pass = " << (pass ? "true" : "false") << "\n";
  os << "  first_failure = " << (first_failure.empty() ? "none" : first_failure) << "\n";
  os << "  min_low_phase_convexity = " << fmt(min_convexity) << "\n";
  os << "  min_slope_margin = " << fmt(min_slope_margin) << "\n";
  os << "  inf_x = " << fmt(inf_x) << "\n";
  os << "  sup_x = " << fmt(sup_x) << "\n";
  for (const BlockCheck& b : blocks) {
    os << "  block " << b.block << ":\n";
    os << "    symbol = " << b.symbol << "\n";
    os << "    maxima = " << b.maxima << "\n";
    os << "    minima = " << b.minima << "\n";
    os << "    counts_ok = " << (b.counts_ok ? "true" : "false") << "\n";
    os << "    min_convexity = " << fmt(b.min_convexity) << "\n";
    os << "    slope_at_switch = " << fmt(b.slope_alpha) << "\n";
    os << "    slope_at_end = " << fmt(b.slope_beta) << "\n";
    os << "    inf_x = " << fmt(b.inf_x) << "\n";
    os << "    sup_x = " << fmt(b.sup_x) << "\n";
    os << "    pass = " << (b.pass ? "true" : "false") << "\n";
    if (!b.note.empty()) os << "    note = " << b.note << "\n";
  }
}

// --------------------------------------------------------------------- search

namespace {

struct Seed {
  double profile = 0.0;
  double t = 0.0;
  taylor::State z;
  double defect = kInf;  ///< ‖ψ(z) − z‖
};

/// Side coordinate of A, 0 on ℰ₁ = c and 1 on ℰ₁ = 0.
double side_A(const horseshoe::RegionSet& r, PhaseState z) { return (r.e1(z) - r.c) / (-r.c); }

double e0_fraction(const horseshoe::RegionSet& r, PhaseState z) {
  return (r.e0(z) - r.e0_lo) / (r.e0_hi - r.e0_lo);
}

/// On one crossing path of D_j, the point whose ψ-image has the same ℰ₁ as
/// the source (or the side coordinate `target`). Along the certified
/// subinterval the image sweeps A from side to side, so the difference changes sign.
struct PathFix {
  bool ok = false;
  double t = 0.0;
  taylor::State z;
  double gap = 0.0;  ///< e0 fraction of the image minus that of the source
  double defect = kInf;
};

PathFix fix_on_path(const ModelParams& params, const horseshoe::RegionSet& r, int symbol,
                    double profile, const horseshoe::StretchOptions& sopts,
                    std::optional<double> target = std::nullopt) {
  PathFix pf;
  const auto rec = horseshoe::trace_path(r, horseshoe::MapId::Psi, symbol, profile, sopts);
  if (!rec.sub) return pf;
  auto h = [&](double t) -> std::optional<double> {
    try {
      const PhaseState z = horseshoe::path_point(r, profile, t);
      const PhaseState w = taylor::to_phase(taylor::psi(params, taylor::to_state(z)));
      return side_A(r, w) - (target ? *target : side_A(r, z));
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  double lo = rec.sub->t1, hi = rec.sub->t2;
  const auto hlo = h(lo), hhi = h(hi);
  if (!hlo || !hhi || (*hlo > 0.0) == (*hhi > 0.0)) return pf;
  const bool lo_neg = *hlo < 0.0;
  while (hi - lo > 1e-16 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const auto hm = h(mid);
    if (!hm) return pf;
    ((*hm < 0.0) == lo_neg ? lo : hi) = mid;
  }
  pf.t = 0.5 * (lo + hi);
  const PhaseState z = horseshoe::path_point(r, profile, pf.t);
  pf.z = taylor::to_state(z);
  try {
    const taylor::State w = taylor::psi(params, pf.z);
    pf.gap = e0_fraction(r, taylor::to_phase(w)) - e0_fraction(r, z);
    pf.defect = static_cast<double>(std::hypot(w.x - pf.z.x, w.y - pf.z.y));
    pf.ok = true;
  } catch (const Error&) {
  }
  return pf;
}

/// Fixed point of ψ in D_j from a grid of crossing paths followed by
/// bisection in the profile: the e0 gap is ≥ 0 on the lower edge of A and ≤ 0
/// on the upper edge.
Seed fixed_point_seed(const ModelParams& params, const horseshoe::RegionSet& r, int symbol,
                      const SearchOptions& opts, int* grid_used) {
  int matched = 0;
  for (int grid = std::max(2, opts.grid); grid <= std::max(opts.grid, opts.max_grid); grid *= 2) {
    *grid_used = grid;
    std::vector<PathFix> fixes(static_cast<std::size_t>(grid));
    parallel_for(fixes.size(), opts.stretch.threads, [&](std::size_t i) {
      fixes[i] = fix_on_path(params, r, symbol, static_cast<double>(i) / (grid - 1), opts.stretch);
    });
    matched = static_cast<int>(std::count_if(fixes.begin(), fixes.end(), [](const PathFix& f) { return f.ok; }));
    // Bracket with the smallest gap.
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i + 1 < fixes.size(); ++i) {
      const PathFix &a = fixes[i], &b = fixes[i + 1];
      if (!a.ok || !b.ok || (a.gap > 0.0) == (b.gap > 0.0)) continue;
      if (!best || std::min(std::abs(a.gap), std::abs(b.gap)) <
                       std::min(std::abs(fixes[*best].gap), std::abs(fixes[*best + 1].gap)))
        best = i;
    }
    if (!best) continue;
    double lo = static_cast<double>(*best) / (grid - 1), hi = static_cast<double>(*best + 1) / (grid - 1);
    const bool lo_pos = fixes[*best].gap > 0.0;
    PathFix cur = std::abs(fixes[*best].gap) < std::abs(fixes[*best + 1].gap) ? fixes[*best] : fixes[*best + 1];
    double cur_v = cur.gap == fixes[*best].gap ? lo : hi;
    for (int it = 0; it < 40 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      const PathFix pf = fix_on_path(params, r, symbol, mid, opts.stretch);
      if (!pf.ok) break;
      if (std::abs(pf.gap) < std::abs(cur.gap)) {
        cur = pf;
        cur_v = mid;
      }
      ((pf.gap > 0.0) == lo_pos ? lo : hi) = mid;
    }
    return {cur_v, cur.t, cur.z, cur.defect};
  }
  throw Error(ErrorKind::NotFound, "no crossing path of D" + std::to_string(symbol) +
                                       " yields a fixed-point bracket (matched paths: " +
                                       std::to_string(matched) + ")");
}

/// Residual rows: ψ(z_k) − z_{k+1} for the chain, then either the closing
/// pair or two boundary conditions pinning ℰ₀(z_0) and ℰ₁(z_{n−1}).
struct Shooting {
  const ModelParams& params;
  bool periodic;
  real e0_pin = 0, e1_pin = 0;

  real energy(real mu, const taylor::State& z) const {
    const real a = params.a, x = z.x;
    const real prim = x * x * (-(x * x) / 4 + (1 + a) * x / 3 - a / 2);
    return z.y * z.y / 2 - params.g * x * x / 2 + mu * prim;
  }
  std::array<real, 2> energy_grad(real mu, const taylor::State& z) const {
    const real a = params.a, x = z.x;
    const real F = x * (x - a) * (1 - x);
    return {-params.g * x + mu * F, z.y};
  }

  /// Returns false when some ψ evaluation leaves the admissible range.
  bool eval(const std::vector<taylor::State>& Z, std::vector<real>& R,
            std::vector<taylor::Mat2>* J) const {
    const std::size_t n = Z.size();
    R.assign(2 * n, 0);
    if (J) J->assign(n, {});
    try {
      const std::size_t chain = periodic ? n : n - 1;
      for (std::size_t k = 0; k < chain; ++k) {
        const taylor::State w = taylor::psi(params, Z[k], J ? &(*J)[k] : nullptr);
        const taylor::State& nx = Z[(k + 1) % n];
        R[2 * k] = w.x - nx.x;
        R[2 * k + 1] = w.y - nx.y;
      }
      if (!periodic) {
        R[2 * n - 2] = energy(params.n0, Z.front()) - e0_pin;
        R[2 * n - 1] = energy(params.n1, Z.back()) - e1_pin;
      }
    } catch (const Error&) {
      return false;
    }
    for (real v : R)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  double norm(const std::vector<real>& R) const {
    real m = 0;
    const std::size_t rows = periodic ? R.size() : R.size() - 2;
    for (std::size_t i = 0; i < rows; i += 2) m = std::max(m, std::hypot(R[i], R[i + 1]));
    return static_cast<double>(m);
  }
  double full_norm(const std::vector<real>& R) const {
    real m = 0;
    for (real v : R) m = std::max(m, std::abs(v));
    return static_cast<double>(m);
  }

  /// Newton direction from the block-cyclic Jacobian.
  bool step(const std::vector<taylor::State>& Z, const std::vector<real>& R,
            const std::vector<taylor::Mat2>& J, std::vector<real>& dz) const {
    const std::size_t n = Z.size(), N = 2 * n;
    std::vector<real> A(N * N, 0), b(N);
    const std::size_t chain = periodic ? n : n - 1;
    for (std::size_t k = 0; k < chain; ++k) {
      const std::size_t r = 2 * k, c = 2 * k, c2 = 2 * ((k + 1) % n);
      A[r * N + c] = J[k][0];
      A[r * N + c + 1] = J[k][1];
      A[(r + 1) * N + c] = J[k][2];
      A[(r + 1) * N + c + 1] = J[k][3];
      A[r * N + c2] -= 1;
      A[(r + 1) * N + c2 + 1] -= 1;
    }
    if (!periodic) {
      const auto g0 = energy_grad(params.n0, Z.front());
      const auto g1 = energy_grad(params.n1, Z.back());
      A[(N - 2) * N + 0] = g0[0];
      A[(N - 2) * N + 1] = g0[1];
      A[(N - 1) * N + N - 2] = g1[0];
      A[(N - 1) * N + N - 1] = g1[1];
    }
    for (std::size_t i = 0; i < N; ++i) b[i] = -R[i];
    // Gaussian elimination with partial pivoting.
    for (std::size_t c = 0; c < N; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < N; ++r)
        if (std::abs(A[r * N + c]) > std::abs(A[p * N + c])) p = r;
      if (A[p * N + c] == 0) return false;
      if (p != c) {
        for (std::size_t k = 0; k < N; ++k) std::swap(A[c * N + k], A[p * N + k]);
        std::swap(b[c], b[p]);
      }
      for (std::size_t r = c + 1; r < N; ++r) {
        const real f = A[r * N + c] / A[c * N + c];
        if (f == 0) continue;
        for (std::size_t k = c; k < N; ++k) A[r * N + k] -= f * A[c * N + k];
        b[r] -= f * b[c];
      }
    }
    dz.assign(N, 0);
    for (std::size_t i = N; i-- > 0;) {
      real s = b[i];
      for (std::size_t k = i + 1; k < N; ++k) s -= A[i * N + k] * dz[k];
      dz[i] = s / A[i * N + i];
    }
    return true;
  }
};

struct PolishResult {
  std::vector<taylor::State> Z;
  double residual = kInf;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton. Stops once the defect reaches 1% of the tolerance or stalls
/// below the tolerance.
PolishResult polish(const Shooting& sh, std::vector<taylor::State> Z, const SearchOptions& opts) {
  PolishResult res;
  std::vector<real> R, dz, Rt;
  std::vector<taylor::Mat2> J;
  if (!sh.eval(Z, R, &J)) return res;
  double f = sh.full_norm(R);
  int stall = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it + 1;
    if (f <= 1e-2 * opts.tol) break;
    if (!sh.step(Z, R, J, dz)) break;
    real lambda = 1;
    bool accepted = false;
    std::vector<taylor::State> Zt(Z.size());
    for (int h = 0; h < 40; ++h, lambda /= 2) {
      for (std::size_t k = 0; k < Z.size(); ++k) Zt[k] = {Z[k].x + lambda * dz[2 * k], Z[k].y + lambda * dz[2 * k + 1]};
      if (!sh.eval(Zt, Rt, nullptr)) continue;
      const double ft = sh.full_norm(Rt);
      if (ft < f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    Z = Zt;
    if (!sh.eval(Z, R, &J)) return res;
    const double fn = sh.full_norm(R);
    stall = fn > 0.5 * f ? stall + 1 : 0;
    f = fn;
    if (f <= opts.tol && stall >= 2) break;
  }
  res.Z = Z;
  res.residual = sh.norm(R);
  if (!sh.periodic) res.residual = std::max(res.residual, 0.0);
  res.converged = sh.full_norm(R) <= opts.tol;
  return res;
}

/// Classifies every point; returns the first index whose symbol or membership
/// in A disagrees with the itinerary, or size() when all agree.
std::size_t first_mismatch(const horseshoe::RegionSet& r, const std::vector<taylor::State>& Z,
                           const Itinerary& itin, const SearchOptions& opts,
                           std::vector<int>* symbols, std::vector<double>* thetas) {
  std::size_t bad = Z.size();
  for (std::size_t k = 0; k < Z.size(); ++k) {
    const PhaseState z = taylor::to_phase(Z[k]);
    int sym = 0;
    double th = std::numeric_limits<double>::quiet_NaN();
    try {
      th = flow::theta_alpha(r.params, z, opts.stretch.tol);
      sym = horseshoe::symbol_of_angle(th, opts.stretch.p_symbols).value_or(0);
    } catch (const Error&) {
    }
    if (symbols) symbols->push_back(sym);
    if (thetas) thetas->push_back(th);
    if (bad == Z.size() && (!r.in_A(z) || sym != itin.at(k))) bad = k;
  }
  return bad;
}

/// Refines a chain of seeds one link at a time: z_k moves along its D-path at
/// the ℰ₀ level inherited from ψ(z_{k−1}) to where ψ(z_k) meets the side
/// coordinate of z_{k+1}. ψ contracts ℰ₀ errors forward and ψ⁻¹ contracts ℰ₁
/// errors backward, so a few sweeps land next to the true orbit.
bool sweep_chain(const ModelParams& params, const horseshoe::RegionSet& r, const Itinerary& itin,
                 bool periodic, std::vector<taylor::State>& Z, const SearchOptions& opts) {
  const std::size_t n = Z.size();
  if (n < 2) return true;
  std::vector<double> profile(n);
  for (std::size_t k = 0; k < n; ++k)
    profile[k] = std::clamp(e0_fraction(r, taylor::to_phase(Z[k])), 0.0, 1.0);
  constexpr int kSweeps = 3;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (std::size_t k = 0; k < n; ++k) {
      const bool has_next = periodic || k + 1 < n;
      std::optional<double> target;
      if (has_next) target = side_A(r, taylor::to_phase(Z[(k + 1) % n]));
      const PathFix pf = fix_on_path(params, r, itin.at(k), profile[k], opts.stretch, target);
      if (!pf.ok) return false;
      Z[k] = pf.z;
      if (has_next) {
        const taylor::State w = taylor::psi(params, Z[k]);
        profile[(k + 1) % n] = std::clamp(e0_fraction(r, taylor::to_phase(w)), 0.0, 1.0);
      }
    }
  }
  return true;
}

struct SeedCache {
  std::map<int, Seed> seeds;
  int grid_used = 0;
  const Seed& get(const ModelParams& params, const horseshoe::RegionSet& r, int symbol,
                  const SearchOptions& opts) {
    auto it = seeds.find(symbol);
    if (it != seeds.end()) return it->second;
    int g = 0;
    Seed s = fixed_point_seed(params, r, symbol, opts, &g);
    grid_used = std::max(grid_used, g);
    return seeds.emplace(symbol, s).first->second;
  }
};

}  // namespace

PeriodicOrbit find_periodic(const ModelParams& params, const horseshoe::RegionSet& regions,
                            const Itinerary& itinerary, const SearchOptions& opts) {
  itinerary.validate(opts.stretch.p_symbols);
  if (!itinerary.periodic) throw Error(ErrorKind::InvalidArgument, "find_periodic needs a periodic block");
  SeedCache cache;
  const std::size_t m = itinerary.size();
  std::vector<taylor::State> Z;
  for (std::size_t k = 0; k < m; ++k) Z.push_back(cache.get(params, regions, itinerary.at(k), opts).z);

  if (!sweep_chain(params, regions, itinerary, true, Z, opts))
    throw Error(ErrorKind::NotFound, "a chain link of " + itinerary.str() + " has no crossing path");
  const Shooting sh{params, true};
  PolishResult pr = polish(sh, Z, opts);
  if (!pr.converged) {
    std::ostringstream os;
    os << "Newton on the " << m << "-block shooting system stalled at defect " << pr.residual
       << " after " << pr.iterations << " iterations";
    throw Error(ErrorKind::PolishDiverged, os.str());
  }

  PeriodicOrbit orbit;
  orbit.itinerary = itinerary;
  orbit.m = static_cast<int>(m);
  orbit.anchors = pr.Z;
  orbit.residual = pr.residual;
  orbit.newton_iterations = pr.iterations;
  orbit.grid_used = cache.grid_used;
  const std::size_t bad = first_mismatch(regions, orbit.anchors, itinerary, opts, &orbit.symbols, &orbit.theta);
  if (bad != m) {
    std::ostringstream os;
    os << "polished anchor " << bad << " is not in D" << itinerary.at(bad) << " (classified "
       << orbit.symbols[bad] << ")";
    throw Error(ErrorKind::PolishDiverged, os.str());
  }
  try {
    taylor::State w = orbit.anchors.front();
    for (std::size_t k = 0; k < m; ++k) w = taylor::psi(params, w);
    orbit.closure = static_cast<double>(std::hypot(w.x - orbit.anchors.front().x, w.y - orbit.anchors.front().y));
  } catch (const Error&) {
    orbit.closure = kInf;
  }
  orbit.verification = verify_itinerary(params, orbit.anchors, itinerary,
                                        opts.verify_periods * orbit.m, opts.stretch.tol);
  return orbit;
}

void PeriodicOrbit::write(std::ostream& os) const {
  os << "periodic_orbit:\n";
  os << "  itinerary = " << itinerary.str() << "\n";
  os << "  m = " << m << "\n";
  os << "  residual = " << fmt(residual) << "\n";
  os << "  closure = " << fmt(closure) << "\n";
  os << "  newton_iterations = " << newton_iterations << "\n";
  os << "  grid_paths = " << grid_used << "\n";
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    os << "  anchor " << k << ":\n";
    os << "    x = " << fmt(anchors[k].x) << "\n";
    os << "    y = " << fmt(anchors[k].y) << "\n";
    if (k < symbols.size()) os << "    symbol = " << symbols[k] << "\n";
    if (k < theta.size()) os << "    theta_alpha = " << fmt(theta[k]) << "\n";
  }
  verification.write(os);
}

void PeriodicOrbit::write_csv(std::ostream& os, const ModelParams& params,
                              const ode::Tolerances& tol) const {
  os << "t,x,y\n";
  char buf[128];
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const auto traj = flow::flow_switched(params, anchor(k), params.beta, tol);
    const double offset = static_cast<double>(k) * params.beta;
    const auto& nodes = traj.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      // Skip repeated switch nodes and the block end, which the next block starts from.
      if (i > 0 && nodes[i].t == nodes[i - 1].t) continue;
      if (k + 1 < anchors.size() && i + 1 == nodes.size()) continue;
      std::snprintf(buf, sizeof buf, "%.17e,%.17e,%.17e\n", nodes[i].t + offset, nodes[i].x, nodes[i].y);
      os << buf;
    }
  }
}

std::vector<PhaseState> ShadowResult::phase_points() const {
  std::vector<PhaseState> out;
  for (const auto& z : points) out.push_back(taylor::to_phase(z));
  return out;
}

ShadowResult shadow_finite(const ModelParams& params, const horseshoe::RegionSet& regions,
                           const Itinerary& itinerary, const SearchOptions& opts) {
  itinerary.validate(opts.stretch.p_symbols);
  const std::size_t L = itinerary.size();
  SeedCache cache;
  std::vector<taylor::State> Z;
  for (std::size_t k = 0; k < L; ++k) Z.push_back(cache.get(params, regions, itinerary.symbols[k], opts).z);

  if (!sweep_chain(params, regions, itinerary, false, Z, opts))
    throw Error(ErrorKind::NotFound, "a chain link of " + itinerary.str() + " has no crossing path");
  Shooting sh{params, false};
  // Pin the stable coordinate at the start and the unstable one at the end,
  // both at the centre of the corresponding fixed-point seeds.
  sh.e0_pin = sh.energy(params.n0, Z.front());
  sh.e1_pin = sh.energy(params.n1, Z.back());

  ShadowResult res;
  res.itinerary = itinerary;
  if (L == 1) {
    res.points = Z;
    res.residual = 0.0;
  } else {
    const PolishResult pr = polish(sh, Z, opts);
    if (!pr.converged) {
      std::ostringstream os;
      os << "shadowing Newton stalled at defect " << pr.residual;
      throw Error(ErrorKind::NotFound, os.str());
    }
    res.points = pr.Z;
    res.residual = pr.residual;
  }
  const std::size_t bad = first_mismatch(regions, res.points, itinerary, opts, nullptr, nullptr);
  if (bad != L) {
    std::ostringstream os;
    os << "pseudo-orbit matches only the first " << bad << " of " << L << " symbols";
    throw Error(ErrorKind::NotFound, os.str());
  }
  // Depth reached by honest iteration from the first point.
  taylor::State w = res.points.front();
  res.matched_depth = 0;
  for (std::size_t k = 0; k < L; ++k) {
    const PhaseState z = taylor::to_phase(w);
    std::optional<int> sym;
    try {
      sym = horseshoe::classify_symbol(regions, z, opts.stretch.p_symbols, opts.stretch.tol);
    } catch (const Error&) {
    }
    if (!regions.in_A(z) || sym != itinerary.symbols[k]) break;
    ++res.matched_depth;
    if (k + 1 == L) break;
    try {
      w = taylor::psi(params, w);
    } catch (const Error&) {
      break;
    }
  }
  Itinerary open = itinerary;
  open.periodic = false;
  res.verification = verify_itinerary(params, res.points, open, static_cast<int>(L), opts.stretch.tol);
  return res;
}

}  // namespace nagumo::symbolic
