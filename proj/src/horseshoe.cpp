#include "nagumo/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nagumo/parallel.hpp"
#include "nagumo/roots.hpp"
#include "nagumo/timemaps.hpp"

namespace nagumo::horseshoe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ------------------------------------------------------------------ regions

double RegionSet::e1(PhaseState z) const { return model().energy(params.n1, z); }
double RegionSet::e0(PhaseState z) const { return model().energy(params.n0, z); }

PhaseState RegionSet::from_chart(Chart ch, bool upper) const {
  const Model m = model();
  const Nonlinearity& F = m.F();
  const double target = (ch.e1 - ch.e0) / (params.n1 - params.n0);
  const double lo = params.a, hi = 1.0;
  if (!(target >= F.primitive(lo) && target <= F.primitive(hi))) {
    std::ostringstream os;
    os << "no abscissa in (a,1) for chart point (" << ch.e1 << ", " << ch.e0 << ")";
    throw Error(ErrorKind::ChartInversionFailure, os.str());
  }
  auto f = [&](double x) { return F.primitive(x) - target; };
  auto df = [&](double x) { return F.F(x); };
  const double x = roots::bisect_polish(f, df, lo, hi, 1e-15);
  // The low weight amplifies abscissa errors least.
  const double y2 = 2.0 * (ch.e0 + 0.5 * params.g * x * x - params.n0 * F.primitive(x));
  if (!(y2 >= 0.0)) {
    std::ostringstream os;
    os << "chart point (" << ch.e1 << ", " << ch.e0 << ") lies off the real plane (y^2 = " << y2
       << ")";
    throw Error(ErrorKind::ChartInversionFailure, os.str());
  }
  const double y = std::sqrt(y2);
  return {x, upper ? y : -y};
}

bool RegionSet::in_M1c(PhaseState z) const {
  const double e = e1(z);
  return z.x >= 0.0 && z.x <= 1.0 && e >= c && e <= 0.0;
}

bool RegionSet::in_Nc(PhaseState z) const { return in_M1c(z) && z.x >= a_n1 && z.y >= 0.0; }

bool RegionSet::in_W(PhaseState z) const {
  const double e = e0(z);
  return z.x >= 0.0 && z.x <= 1.0 && e >= e0_lo && e <= e0_hi;
}

bool RegionSet::in_A(PhaseState z) const { return in_Nc(z) && in_W(z); }
bool RegionSet::in_B(PhaseState z) const { return in_A({z.x, -z.y}); }

std::vector<PhaseState> RegionSet::side_A(Side side, int n) const {
  std::vector<PhaseState> out;
  const double e1v = side == Side::Left ? c : 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(from_chart({e1v, e0_lo + u * (e0_hi - e0_lo)}, true));
  }
  return out;
}

std::vector<PhaseState> RegionSet::side_B(Side side, int n) const {
  std::vector<PhaseState> out;
  const double e0v = side == Side::Left ? e0_hi : e0_lo;
  for (int i = 0; i < n; ++i) {
    const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    out.push_back(from_chart({c * (1.0 - u), e0v}, false));
  }
  return out;
}

double p_star(const ModelParams& params, std::optional<double> mu_bar) {
  const double check = timemaps::p_check0(params).value;
  const double hat = horseshoe_constants(params, mu_bar).p_hat0;
  return std::min(check, hat);
}

double default_p0(const ModelParams& params, double pbar0, std::optional<double> mu_bar) {
  return 0.5 * (pbar0 + p_star(params, mu_bar));
}

RegionSet build_regions(const ModelParams& params, double pbar0, double p0,
                        const RegionOptions& opts) {
  params.validate();
  const Model m = params.model();
  RegionSet r;
  r.params = params;
  r.pbar0 = pbar0;
  r.p0 = p0;

  if (opts.enforce_regime) {
    const Thresholds th = horseshoe_constants(params, opts.mu_bar);
    if (!(params.n0 < th.m0star && th.m0star < th.m2star && th.m2star < params.n1)) {
      std::ostringstream os;
      os << "need n0 < m0star < m2star < n1, got n0 = " << params.n0 << ", m0star = " << th.m0star
         << ", m2star = " << th.m2star << ", n1 = " << params.n1;
      throw Error(ErrorKind::RegimeViolation, os.str());
    }
    r.p_star = std::min(timemaps::p_check0(params).value, th.p_hat0);
  } else {
    r.p_star = kNaN;
  }
  const bool star_ok = !opts.enforce_regime || p0 < r.p_star;
  if (!(pbar0 > 0.0 && pbar0 < p0 && star_ok && p0 < params.a)) {
    std::ostringstream os;
    os << "need 0 < pbar0 < p0 < p*, got pbar0 = " << pbar0 << ", p0 = " << p0
       << ", p* = " << r.p_star;
    throw Error(ErrorKind::AnchorOrderViolation, os.str());
  }

  r.a_n1 = m.equilibria(params.n1).first;
  r.center_energy = m.energy(params.n1, r.a_n1, 0.0);
  r.c = m.energy(params.n1, pbar0, 0.0);
  r.p1 = timemaps::p1_of_p0(m, params.n1, p0);
  r.e0_hi = m.energy(params.n0, p0, 0.0);
  r.e0_lo = m.energy(params.n0, r.p1, 0.0);
  r.pbar0_plus = m.x_plus(pbar0);

  // Inclusion A ⊆ N_c on a chart grid; the leftmost point sits at (c, e0_hi).
  const int n = std::max(2, opts.inclusion_grid);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const Chart ch{r.c * (1.0 - static_cast<double>(i) / (n - 1)),
                     r.e0_lo + (r.e0_hi - r.e0_lo) * static_cast<double>(k) / (n - 1)};
      PhaseState z;
      try {
        z = r.from_chart(ch, true);
      } catch (const Error& e) {
        throw Error(ErrorKind::InclusionFailure, e.what());
      }
      if (z.x < r.a_n1) {
        std::ostringstream os;
        os << "A leaves N_c: x = " << z.x << " < a_n1 = " << r.a_n1 << " at chart point (" << ch.e1
           << ", " << ch.e0 << ")";
        throw Error(ErrorKind::InclusionFailure, os.str());
      }
    }
  }
  return r;
}

SeparationReport check_separation_claim(const ModelParams& params, double pbar0, double p0) {
  params.validate();
  const Model m = params.model();
  SeparationReport rep;
  rep.a_n1 = m.equilibria(params.n1).first;
  rep.pbar0_plus = m.x_plus(pbar0);
  rep.floor = 0.5 * params.g * (p0 * p0 - pbar0 * pbar0);
  rep.center_inside = rep.a_n1 <= rep.pbar0_plus;
  const double e1bar = m.energy(params.n1, pbar0, 0.0);
  const double e0p = m.energy(params.n0, p0, 0.0);
  auto zeta = [&](double x) {
    const double z1 = e1bar - m.energy(params.n1, x, 0.0);
    const double z0 = e0p - m.energy(params.n0, x, 0.0);
    return z1 - z0;
  };
  constexpr int kGrid = 1000;
  rep.min_zeta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double x = p0 + (rep.a_n1 - p0) * static_cast<double>(i) / (kGrid - 1);
    const double v = zeta(x);
    if (v < rep.min_zeta) {
      rep.min_zeta = v;
      rep.argmin = x;
    }
  }
  rep.holds = rep.min_zeta > 0.0;
  return rep;
}

// ------------------------------------------------------------------ symbols

std::optional<int> symbol_of_angle(double theta, int p_symbols) {
  for (int j = 1; j <= p_symbols; ++j) {
    if (theta >= -(4 * j + 1) * kPi / 2 && theta <= -2 * j * kPi) return j;
  }
  return std::nullopt;
}

std::optional<int> classify_symbol(const RegionSet& regions, PhaseState z, int p_symbols,
                                   const ode::Tolerances& tol) {
  if (p_symbols < 2) throw Error(ErrorKind::InvalidArgument, "p_symbols must be at least 2");
  return symbol_of_angle(flow::theta_alpha(regions.params, z, tol), p_symbols);
}

double path_energy_fraction(double t) {
  // Equal parameter length per decade of |ℰ₁|, exact at both ends.
  constexpr double kDecades = 16.0;
  const double floor = std::pow(10.0, -kDecades);
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return (std::pow(10.0, -kDecades * t) - floor) / (1.0 - floor);
}

PhaseState path_point(const RegionSet& regions, double profile, double t) {
  const double e0 = profile * regions.e0_hi + (1.0 - profile) * regions.e0_lo;
  return regions.from_chart({regions.c * path_energy_fraction(t), e0}, true);
}

std::vector<PhaseState> sample_crossing_path(const RegionSet& regions, double profile,
                                             int n_points) {
  if (n_points < 2) throw Error(ErrorKind::InvalidArgument, "a path needs at least two points");
  std::vector<PhaseState> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / (n_points - 1);
    try {
      out.push_back(path_point(regions, profile, t));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "at t = " << t << ": " << e.what();
      throw Error(ErrorKind::ChartInversionFailure, os.str());
    }
  }
  return out;
}

std::string to_string(MapId id) {
  switch (id) {
    case MapId::Psi1: return "psi1";
    case MapId::Psi0: return "psi0";
    case MapId::Psi: return "psi";
  }
  return "?";
}

// ------------------------------------------------------------------ stretching

namespace {

/// One evaluated path point with its images.
struct Sample {
  bool ok = false;
  PhaseState z;
  double theta = kNaN;
  PhaseState img1;  ///< ψ₁(z) (A paths only)
  PhaseState img;   ///< ψ(z) for A paths, ψ₀(z) for B paths
};

/// Membership of an image in a target frame and its side coordinate s, which
/// is 0 on the left side and 1 on the right.
struct TargetView {
  bool frame = false;
  double s = 0.0;
  double slack = 0.0;
};

TargetView view_B(const RegionSet& r, PhaseState w) {
  TargetView v;
  const double e1 = r.e1(w), e0 = r.e0(w);
  v.slack = std::min({w.x - r.a_n1, -w.y, e1 - r.c, -e1, 1.0 - w.x});
  v.frame = v.slack >= 0.0;
  v.s = (r.e0_hi - e0) / (r.e0_hi - r.e0_lo);
  return v;
}

TargetView view_A(const RegionSet& r, PhaseState w) {
  TargetView v;
  const double e1 = r.e1(w), e0 = r.e0(w);
  v.slack = std::min({w.x - r.a_n1, w.y, e0 - r.e0_lo, r.e0_hi - e0, 1.0 - w.x});
  v.frame = v.slack >= 0.0;
  v.s = (e1 - r.c) / (-r.c);
  return v;
}

/// A (map, symbol) pair to certify on one path family.
struct Task {
  MapId map;
  int symbol;
};

double clip_s(double s) { return std::clamp(s, -0.2, 1.2); }

class PathSampler {
 public:
  PathSampler(const RegionSet& r, bool on_A, double profile, const StretchOptions& opts,
              std::vector<Task> tasks)
      : r_(r), on_A_(on_A), profile_(profile), opts_(opts), tasks_(std::move(tasks)) {}

  int evaluations() const { return evals_; }
  bool budget_exhausted() const { return evals_ >= opts_.max_evals_per_path; }

  const Sample& at(double t) {
    auto it = samples_.find(t);
    if (it != samples_.end()) return it->second;
    return samples_.emplace(t, evaluate(t)).first->second;
  }

  void refine() {
    const int n0 = 33;
    for (int i = 0; i < n0; ++i) at(static_cast<double>(i) / (n0 - 1));
    for (;;) {
      std::vector<double> mids;
      for (auto it = samples_.begin(); std::next(it) != samples_.end(); ++it) {
        auto jt = std::next(it);
        if (needs_split(it->first, it->second, jt->first, jt->second))
          mids.push_back(0.5 * (it->first + jt->first));
      }
      if (mids.empty()) return;
      for (double t : mids) {
        if (budget_exhausted()) return;
        at(t);
      }
    }
  }

  std::pair<double, double> band_params(int j) {
    return {first_theta_crossing(-(4 * j + 1) * kPi / 2), first_theta_crossing(-2 * j * kPi)};
  }

  /// Locates a certified subinterval for the task, or explains why none exists.
  PathRecord certify(const Task& task, double margin_floor) {
    PathRecord rec;
    rec.profile = profile_;
    std::vector<std::pair<double, const Sample*>> seq;
    seq.reserve(samples_.size());
    for (const auto& [t, s] : samples_) seq.emplace_back(t, &s);

    auto qualifies = [&](const Sample& s) { return s.ok && in_source(task, s) && view(task, s).frame; };

    std::size_t best_i = 0, best_k = 0;
    bool found = false;
    for (std::size_t i = 0; i < seq.size() && !found; ++i) {
      const Sample& si = *seq[i].second;
      if (!qualifies(si)) continue;
      const double s0 = view(task, si).s;
      if (!(s0 <= 0.0 || s0 >= 1.0)) continue;
      const bool rising = s0 <= 0.0;
      for (std::size_t k = i + 1; k < seq.size(); ++k) {
        const Sample& sk = *seq[k].second;
        if (!qualifies(sk)) break;
        const double s = view(task, sk).s;
        if (rising ? s >= 1.0 : s <= 0.0) {
          best_i = i;
          best_k = k;
          found = true;
          break;
        }
        if (rising ? s <= 0.0 : s >= 1.0) break;  // same side again: restart from here
      }
    }
    if (!found) {
      rec.note = "no crossing subinterval";
      return rec;
    }
    const bool rising = view(task, *seq[best_i].second).s <= 0.0;
    const double t_i = seq[best_i].first, t_i1 = seq[best_i + 1].first;
    const double t_k1 = seq[best_k - 1].first, t_k = seq[best_k].first;
    // Entry: s leaves the first side. Exit: s reaches the opposite side.
    const double first_side = rising ? 0.0 : 1.0;
    const double last_side = rising ? 1.0 : 0.0;
    auto beyond = [&](double s, double side) { return side == 0.0 ? s <= 0.0 : s >= 1.0; };

    double lo = t_i, hi = t_i1;
    while (hi - lo > opts_.refine_tol) {
      const double mid = 0.5 * (lo + hi);
      const Sample& sm = at(mid);
      if (!qualifies(sm)) {
        rec.note = "frame or source lost while bisecting entry side";
        return rec;
      }
      (beyond(view(task, sm).s, first_side) ? lo : hi) = mid;
    }
    const double t1 = hi;
    double lo2 = t_k1, hi2 = t_k;
    while (hi2 - lo2 > opts_.refine_tol) {
      const double mid = 0.5 * (lo2 + hi2);
      const Sample& sm = at(mid);
      if (!qualifies(sm)) {
        rec.note = "frame or source lost while bisecting exit side";
        return rec;
      }
      (beyond(view(task, sm).s, last_side) ? hi2 : lo2) = mid;
    }
    const double t2 = lo2;

    Subinterval sub;
    sub.t1 = t1;
    sub.t2 = t2;
    const double s1 = view(task, at(t1)).s, s2 = view(task, at(t2)).s;
    sub.side_residual = std::max(std::abs(s1 - first_side), std::abs(s2 - last_side));
    sub.margin = std::numeric_limits<double>::infinity();
    for (auto it = samples_.lower_bound(t1); it != samples_.end() && it->first <= t2; ++it) {
      const Sample& s = it->second;
      if (!qualifies(s)) {
        rec.note = "interior sample outside source or target";
        return rec;
      }
      const double sv = view(task, s).s;
      if (!(sv > 0.0 && sv < 1.0)) {
        rec.note = "interior sample on a target side";
        return rec;
      }
      sub.margin = std::min({sub.margin, view(task, s).slack, source_slack(task, s)});
    }
    rec.sub = sub;
    rec.pass = sub.margin > margin_floor;
    if (!rec.pass) rec.note = "margin below floor";
    return rec;
  }

 private:
  Sample evaluate(double t) {
    ++evals_;
    Sample s;
    try {
      if (on_A_) {
        s.z = path_point(r_, profile_, t);
        const Model m = r_.model();
        const auto ang = flow::angle_flow(m, r_.params.n1, r_.a_n1, s.z, r_.params.alpha, opts_.tol);
        s.theta = ang.theta;
        s.img1 = ang.end;
        s.img = flow::poincare_psi0(r_.params, s.img1, opts_.tol);
      } else {
        const double e0 = r_.e0_hi + t * (r_.e0_lo - r_.e0_hi);
        s.z = r_.from_chart({r_.c * (1.0 - profile_), e0}, false);
        s.img = flow::poincare_psi0(r_.params, s.z, opts_.tol);
      }
      s.ok = true;
    } catch (const Error&) {
      s.ok = false;
    }
    return s;
  }

  bool in_source(const Task& task, const Sample& s) const {
    if (task.map == MapId::Psi0) return true;
    return symbol_of_angle(s.theta, opts_.p_symbols) == task.symbol;
  }

  double source_slack(const Task& task, const Sample& s) const {
    if (task.map == MapId::Psi0) return std::numeric_limits<double>::infinity();
    const int j = task.symbol;
    return std::min(s.theta + (4 * j + 1) * kPi / 2, -2 * j * kPi - s.theta);
  }

  TargetView view(const Task& task, const Sample& s) const {
    return task.map == MapId::Psi1 ? view_B(r_, s.img1) : view_A(r_, s.img);
  }

  bool needs_split(double ta, const Sample& a, double tb, const Sample& b) const {
    if (tb - ta <= opts_.refine_tol) return false;
    if (a.ok != b.ok) return true;
    if (!a.ok) return false;
    if (on_A_ && std::abs(a.theta - b.theta) > kPi / 8) return true;
    for (const Task& task : tasks_) {
      const bool src_a = in_source(task, a), src_b = in_source(task, b);
      if (!src_a && !src_b) continue;
      if (src_a && src_b) {
        const TargetView va = view(task, a), vb = view(task, b);
        if (va.frame && vb.frame) {
          if (std::abs(clip_s(va.s) - clip_s(vb.s)) > 0.05) return true;
        } else if (va.frame != vb.frame) {
          const double s_in = va.frame ? va.s : vb.s;
          if (s_in > -0.2 && s_in < 1.2) return true;
        }
      }
      // Resolve the image curve near the target even where no sample has
      // landed in it yet, including up to the edge of the source band; ψ
      // also passes through B, so its ψ₁ leg counts too.
      if (image_jump(a.img1, b.img1, task.map != MapId::Psi0)) return true;
      if (task.map != MapId::Psi1 && image_jump(a.img, b.img, true)) return true;
    }
    return false;
  }

  bool near_target(PhaseState w) const {
    return w.x > r_.a_n1 - 0.3 && w.x < 1.3 && std::abs(w.y) < 1.0;
  }

  bool image_jump(PhaseState wa, PhaseState wb, bool active) const {
    if (!active || !(near_target(wa) || near_target(wb))) return false;
    return std::hypot(wa.x - wb.x, wa.y - wb.y) > 0.05;
  }

  double first_theta_crossing(double level) {
    if (!on_A_) return kNaN;
    auto it = samples_.begin();
    for (; it != samples_.end() && std::next(it) != samples_.end(); ++it) {
      auto jt = std::next(it);
      if (it->second.ok && jt->second.ok && it->second.theta < level && jt->second.theta >= level)
        break;
    }
    if (it == samples_.end() || std::next(it) == samples_.end()) return kNaN;
    double lo = it->first, hi = std::next(it)->first;
    while (hi - lo > opts_.refine_tol) {
      const double mid = 0.5 * (lo + hi);
      const Sample& s = at(mid);
      if (!s.ok) return kNaN;
      (s.theta < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  const RegionSet& r_;
  bool on_A_;
  double profile_;
  const StretchOptions& opts_;
  std::vector<Task> tasks_;
  std::map<double, Sample> samples_;
  int evals_ = 0;
};

double margin_floor(const StretchOptions& opts) {
  return 10.0 * std::max(opts.tol.rel, opts.tol.abs);
}

std::string region_name(MapId map, int symbol, bool source) {
  if (source) return map == MapId::Psi0 ? "B" : "D" + std::to_string(symbol);
  return map == MapId::Psi1 ? "B" : "A";
}

std::vector<StretchReport> run_tasks(const RegionSet& regions, const std::vector<Task>& tasks,
                                     const StretchOptions& opts) {
  if (opts.paths < 1) throw Error(ErrorKind::InvalidArgument, "need at least one path");
  std::vector<Task> a_tasks, b_tasks;
  for (const Task& t : tasks) (t.map == MapId::Psi0 ? b_tasks : a_tasks).push_back(t);

  const std::size_t np = static_cast<std::size_t>(opts.paths);
  // records[path][task]
  std::vector<std::vector<PathRecord>> records(np, std::vector<PathRecord>(tasks.size()));
  const double floor = margin_floor(opts);
  auto profile_of = [&](std::size_t i) {
    return np == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(np - 1);
  };

  parallel_for(np, opts.threads, [&](std::size_t i) {
    const double profile = profile_of(i);
    if (!a_tasks.empty()) {
      PathSampler sampler(regions, true, profile, opts, a_tasks);
      sampler.refine();
      std::vector<std::pair<double, double>> bands;
      for (int j = 1; j <= opts.p_symbols; ++j) bands.push_back(sampler.band_params(j));
      bool order = true;
      double prev = -std::numeric_limits<double>::infinity();
      for (int j = opts.p_symbols; j >= 1; --j) {
        const auto& [u, v] = bands[static_cast<std::size_t>(j - 1)];
        if (!(u > prev && v > u)) order = false;
        prev = v;
      }
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (tasks[k].map == MapId::Psi0) continue;
        PathRecord rec = sampler.certify(tasks[k], floor);
        rec.band_params = bands;
        rec.order_ok = order;
        records[i][k] = std::move(rec);
      }
      const int ev = sampler.evaluations();
      for (std::size_t k = 0; k < tasks.size(); ++k)
        if (tasks[k].map != MapId::Psi0) records[i][k].evaluations = ev;
    }
    if (!b_tasks.empty()) {
      PathSampler sampler(regions, false, profile, opts, b_tasks);
      sampler.refine();
      for (std::size_t k = 0; k < tasks.size(); ++k) {
        if (tasks[k].map != MapId::Psi0) continue;
        PathRecord rec = sampler.certify(tasks[k], floor);
        rec.order_ok = true;
        rec.evaluations = sampler.evaluations();
        records[i][k] = std::move(rec);
      }
    }
  });

  std::vector<StretchReport> out;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    StretchReport rep;
    rep.map = tasks[k].map;
    rep.symbol = tasks[k].symbol;
    rep.source = region_name(rep.map, rep.symbol, true);
    rep.target = region_name(rep.map, rep.symbol, false);
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < np; ++i) {
      rep.paths.push_back(records[i][k]);
      const PathRecord& pr = rep.paths.back();
      if (pr.pass) ++rep.passed_paths;
      rep.min_margin = std::min(rep.min_margin, pr.sub ? pr.sub->margin : -1.0);
    }
    rep.pass = rep.passed_paths == opts.paths;
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

StretchReport verify_stretch(const RegionSet& regions, MapId map, int symbol,
                             const StretchOptions& opts) {
  if (map != MapId::Psi0 && (symbol < 1 || symbol > opts.p_symbols))
    throw Error(ErrorKind::InvalidArgument, "symbol out of range");
  return run_tasks(regions, {Task{map, map == MapId::Psi0 ? 0 : symbol}}, opts).front();
}

PathRecord trace_path(const RegionSet& regions, MapId map, int symbol, double profile,
                      const StretchOptions& opts) {
  if (map != MapId::Psi0 && (symbol < 1 || symbol > opts.p_symbols))
    throw Error(ErrorKind::InvalidArgument, "symbol out of range");
  const Task task{map, map == MapId::Psi0 ? 0 : symbol};
  PathSampler sampler(regions, map != MapId::Psi0, profile, opts, {task});
  sampler.refine();
  PathRecord rec = sampler.certify(task, margin_floor(opts));
  rec.evaluations = sampler.evaluations();
  return rec;
}

std::vector<StretchReport> verify_all_stretches(const RegionSet& regions,
                                                const StretchOptions& opts) {
  std::vector<Task> tasks;
  for (int j = 1; j <= opts.p_symbols; ++j) tasks.push_back({MapId::Psi1, j});
  tasks.push_back({MapId::Psi0, 0});
  for (int j = 1; j <= opts.p_symbols; ++j) tasks.push_back({MapId::Psi, j});
  return run_tasks(regions, tasks, opts);
}

// ------------------------------------------------------------------ certificate

namespace {

void add(Stage& s, const std::string& k, double v) { s.values.emplace_back(k, num(v)); }
void add(Stage& s, const std::string& k, bool v) { s.values.emplace_back(k, v ? "true" : "false"); }
void add(Stage& s, const std::string& k, const std::string& v) { s.values.emplace_back(k, v); }

}  // namespace

Certificate certify_horseshoe(const ModelParams& params, double pbar0, double p0,
                              const CertifyOptions& opts) {
  Certificate cert;
  cert.params = params;
  cert.pbar0 = pbar0;
  cert.p0 = p0;
  cert.p_symbols = opts.stretch.p_symbols;
  cert.paths = opts.stretch.paths;
  cert.refine_tol = opts.stretch.refine_tol;
  cert.integration_tol = opts.stretch.tol.rel;
  cert.min_margin = kNaN;

  auto finish = [&](Stage st) {
    const bool ok = st.pass;
    cert.stages.push_back(std::move(st));
    if (!ok) {
      cert.pass = false;
      cert.first_failure = cert.stages.back().name;
    }
    return ok;
  };
  auto fail_with = [&](const std::string& name, const Error& e) {
    Stage st{name, false, {}};
    add(st, "error", std::string(e.what()));
    return finish(std::move(st));
  };

  // Regime.
  Thresholds th;
  {
    Stage st{"regime", false, {}};
    try {
      params.validate();
      th = horseshoe_constants(params, opts.mu_bar);
    } catch (const Error& e) {
      fail_with("regime", e);
      return cert;
    }
    add(st, "n0", params.n0);
    add(st, "m0star", th.m0star);
    add(st, "m1star", th.m1star);
    add(st, "m2star", th.m2star);
    add(st, "n1", params.n1);
    add(st, "n0_below_m0star", params.n0 < th.m0star);
    add(st, "n1_above_m2star", params.n1 > th.m2star);
    add(st, "margin_low", th.m0star - params.n0);
    add(st, "margin_high", params.n1 - th.m2star);
    st.pass = params.n0 < th.m0star && th.m0star < th.m2star && params.n1 > th.m2star;
    if (!finish(std::move(st))) return cert;
  }

  // Timing inequalities and anchor order.
  {
    Stage st{"timing", false, {}};
    try {
      const Model m = params.model();
      const double half = 0.5 * params.low_duration();
      const auto check = timemaps::p_check0(params);
      const double pstar = std::min(check.value, th.p_hat0);
      const double sig = timemaps::sigma(m, params.n0, p0, params.a);
      const auto gap = timemaps::check_gap_crossing(params, p0);
      add(st, "p_check0", check.value);
      add(st, "p_hat0", th.p_hat0);
      add(st, "p_star", pstar);
      add(st, "pbar0", pbar0);
      add(st, "p0", p0);
      add(st, "anchor_order", pbar0 > 0.0 && pbar0 < p0 && p0 < pstar);
      add(st, "sigma0_p0_a", sig);
      add(st, "half_low_phase", half);
      add(st, "check_margin", sig - half);
      add(st, "p1", gap.p1);
      add(st, "sigma0_p1_bn1", gap.sigma0);
      add(st, "hat_margin", gap.direct_margin);
      add(st, "kappa_route", gap.sufficient);
      st.pass = pbar0 > 0.0 && pbar0 < p0 && p0 < pstar && sig > half && gap.direct;
    } catch (const Error& e) {
      fail_with("timing", e);
      return cert;
    }
    if (!finish(std::move(st))) return cert;
  }

  // Separation claim.
  {
    Stage st{"separation", false, {}};
    const auto sep = check_separation_claim(params, pbar0, p0);
    add(st, "min_zeta", sep.min_zeta);
    add(st, "argmin", sep.argmin);
    add(st, "floor", sep.floor);
    add(st, "pbar0_plus", sep.pbar0_plus);
    add(st, "a_n1", sep.a_n1);
    add(st, "a_n1_le_pbar0_plus", sep.center_inside);
    st.pass = sep.holds;
    if (!finish(std::move(st))) return cert;
  }

  // Inclusion A ⊆ N_c.
  RegionSet regions;
  {
    Stage st{"inclusion", false, {}};
    try {
      RegionOptions ro;
      ro.mu_bar = opts.mu_bar;
      regions = build_regions(params, pbar0, p0, ro);
    } catch (const Error& e) {
      fail_with("inclusion", e);
      return cert;
    }
    const PhaseState corner = regions.from_chart({regions.c, regions.e0_hi}, true);
    add(st, "c", regions.c);
    add(st, "e1_center", regions.center_energy);
    add(st, "e0_hi", regions.e0_hi);
    add(st, "e0_lo", regions.e0_lo);
    add(st, "leftmost_x", corner.x);
    add(st, "a_n1", regions.a_n1);
    add(st, "x_margin", corner.x - regions.a_n1);
    st.pass = corner.x > regions.a_n1;
    if (!finish(std::move(st))) return cert;
  }

  // Band reachability along the two A sides.
  {
    Stage st{"band_reachability", false, {}};
    const int p = opts.stretch.p_symbols;
    const double need_left = -(4 * p + 1) * kPi / 2;
    double left_max = -std::numeric_limits<double>::infinity();
    double right_min = std::numeric_limits<double>::infinity();
    double edge_min = right_min;
    try {
      const int n = opts.stretch.paths;
      std::vector<double> lefts(static_cast<std::size_t>(n)), rights(lefts), edges(lefts);
      parallel_for(static_cast<std::size_t>(n), opts.stretch.threads, [&](std::size_t i) {
        const double prof = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
        lefts[i] = flow::theta_alpha(params, path_point(regions, prof, 0.0), opts.stretch.tol);
        edges[i] = flow::theta_alpha(params, path_point(regions, prof, 1.0), opts.stretch.tol);
        // Supremum over the approach t = 1 − 10⁻ᵏ to the homoclinic side.
        double sup = -std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 15; ++k) {
          const double t = 1.0 - std::pow(10.0, -k);
          sup = std::max(sup, flow::theta_alpha(params, path_point(regions, prof, t), opts.stretch.tol));
        }
        rights[i] = sup;
      });
      for (int i = 0; i < n; ++i) {
        left_max = std::max(left_max, lefts[static_cast<std::size_t>(i)]);
        right_min = std::min(right_min, rights[static_cast<std::size_t>(i)]);
        edge_min = std::min(edge_min, edges[static_cast<std::size_t>(i)]);
      }
    } catch (const Error& e) {
      fail_with("band_reachability", e);
      return cert;
    }
    add(st, "theta_left_max", left_max);
    add(st, "theta_left_required_below", need_left);
    // Exactly on ℰ₁ = 0 the computed orbit cannot stay near the saddle for the
    // whole high phase, so the side value itself is reported but not used.
    add(st, "theta_right_approach_min_sup", right_min);
    add(st, "theta_right_required_above", -2 * kPi);
    add(st, "theta_right_approach_above_minus_pi", right_min > -kPi);
    add(st, "theta_right_side_min", edge_min);
    st.pass = left_max < need_left && right_min > -2 * kPi;
    if (!finish(std::move(st))) return cert;
  }

  // Stretching.
  cert.stretches = verify_all_stretches(regions, opts.stretch);
  double min_margin = std::numeric_limits<double>::infinity();
  bool order = true;
  {
    Stage st{"stretch", true, {}};
    for (const auto& rep : cert.stretches) {
      const std::string key = to_string(rep.map) + (rep.symbol ? "_D" + std::to_string(rep.symbol) : "_B");
      add(st, key + "_passed_paths", static_cast<double>(rep.passed_paths));
      add(st, key + "_min_margin", rep.min_margin);
      st.pass = st.pass && rep.pass;
      min_margin = std::min(min_margin, rep.min_margin);
      for (const auto& pr : rep.paths) order = order && pr.order_ok;
    }
    add(st, "paths", static_cast<double>(opts.stretch.paths));
    if (!finish(std::move(st))) {
      cert.min_margin = min_margin;
      return cert;
    }
  }
  cert.min_margin = min_margin;
  {
    Stage st{"margins", false, {}};
    add(st, "min_margin", min_margin);
    add(st, "floor", margin_floor(opts.stretch));
    st.pass = min_margin > margin_floor(opts.stretch);
    if (!finish(std::move(st))) return cert;
  }
  {
    Stage st{"crossing_order", order, {}};
    add(st, "order_holds_on_every_path", order);
    if (!finish(std::move(st))) return cert;
  }
  cert.pass = true;
  cert.first_failure = "none";
  return cert;
}

void Certificate::write(std::ostream& os) const {
  os << "certificate\n";
  os << "  pass = " << (pass ? "true" : "false") << "\n";
  os << "  first_failure = " << (first_failure.empty() ? "none" : first_failure) << "\n";
  os << "  min_margin = " << num(min_margin) << "\n";
  os << "  parameters\n";
  os << "    g = " << num(params.g) << "\n";
  os << "    a = " << num(params.a) << "\n";
  os << "    n0 = " << num(params.n0) << "\n";
  os << "    n1 = " << num(params.n1) << "\n";
  os << "    alpha = " << num(params.alpha) << "\n";
  os << "    beta = " << num(params.beta) << "\n";
  os << "    pbar0 = " << num(pbar0) << "\n";
  os << "    p0 = " << num(p0) << "\n";
  os << "    p_symbols = " << p_symbols << "\n";
  os << "    paths = " << paths << "\n";
  os << "    refine_tol = " << num(refine_tol) << "\n";
  os << "    integration_tol = " << num(integration_tol) << "\n";
  for (const Stage& st : stages) {
    os << "  stage " << st.name << "\n";
    os << "    pass = " << (st.pass ? "true" : "false") << "\n";
    for (const auto& [k, v] : st.values) os << "    " << k << " = " << v << "\n";
  }
}

void Certificate::write_paths_csv(std::ostream& os) const {
  os << "map,symbol,path,profile,pass,t_band2_lo,t_band2_hi,t_band1_lo,t_band1_hi,order_ok,"
        "sub_t1,sub_t2,margin,side_residual,evaluations,note\n";
  char buf[512];
  for (const auto& rep : stretches) {
    for (std::size_t i = 0; i < rep.paths.size(); ++i) {
      const PathRecord& pr = rep.paths[i];
      auto band = [&](int j, bool hi) {
        if (static_cast<std::size_t>(j) > pr.band_params.size() || j < 1) return kNaN;
        const auto& b = pr.band_params[static_cast<std::size_t>(j - 1)];
        return hi ? b.second : b.first;
      };
      const double s1 = pr.sub ? pr.sub->t1 : kNaN, s2 = pr.sub ? pr.sub->t2 : kNaN;
      const double mg = pr.sub ? pr.sub->margin : kNaN, sr = pr.sub ? pr.sub->side_residual : kNaN;
      std::snprintf(buf, sizeof buf,
                    "%s,%d,%zu,%.17e,%d,%.17e,%.17e,%.17e,%.17e,%d,%.17e,%.17e,%.17e,%.17e,%d,\"%s\"\n",
                    to_string(rep.map).c_str(), rep.symbol, i, pr.profile, pr.pass ? 1 : 0,
                    band(2, false), band(2, true), band(1, false), band(1, true), pr.order_ok ? 1 : 0,
                    s1, s2, mg, sr, pr.evaluations, pr.note.empty() ? "ok" : pr.note.c_str());
      os << buf;
    }
  }
}

}  // namespace nagumo::horseshoe
