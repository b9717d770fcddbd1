#include "nagumo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace nagumo::flow {

namespace {

constexpr double kEventTimeTol = 1e-12;
constexpr double kDegenerateSlope = 1e-12;
constexpr double kCenterRadius = 1e-10;

ode::State<2> to_state(PhaseState z) { return {z.x, z.y}; }
PhaseState to_phase(const ode::State<2>& s) { return {s[0], s[1]}; }

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void Trajectory::append_segment(double mu, double t0, PhaseState z0, double t1,
                                const ode::Tolerances& tol) {
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "segment must have positive length");
  Field field{&model_, mu};
  if (!segments_.empty()) events_.push_back({EventKind::Switch, t0, z0.x, 0.0, false});

  Segment seg{t0, t1, mu, nodes_.size(), nodes_.size()};
  nodes_.push_back({t0, z0.x, z0.y});
  int last_sign = sign_of(z0.y);

  auto observer = [&](double tp, const ode::State<2>& yp, double tn, const ode::State<2>& yn) {
    const int s_new = sign_of(yn[1]);
    if (s_new != 0 && last_sign != 0 && s_new != last_sign) {
      // Localize the y = 0 crossing inside the accepted step.
      double lo = 0.0, hi = tn - tp;
      ode::State<2> at = yn;
      while (hi - lo > kEventTimeTol) {
        const double mid = 0.5 * (lo + hi);
        at = ode::restep<2>(field, tp, yp, mid);
        if (sign_of(at[1]) == last_sign)
          lo = mid;
        else
          hi = mid;
      }
      const double h = 0.5 * (lo + hi);
      at = ode::restep<2>(field, tp, yp, h);
      ode::State<2> d;
      field(tp + h, at, d);
      Event ev;
      ev.kind = last_sign > 0 ? EventKind::Maximum : EventKind::Minimum;
      ev.t = tp + h;
      ev.x = at[0];
      ev.slope = d[1];
      ev.degenerate = std::abs(d[1]) < kDegenerateSlope;
      events_.push_back(ev);
    }
    if (s_new != 0) last_sign = s_new;
    nodes_.push_back({tn, yn[0], yn[1]});
  };
  ode::integrate<2>(field, t0, to_state(z0), t1, tol, observer);
  seg.last = nodes_.size() - 1;
  segments_.push_back(seg);
}

const Segment& Trajectory::segment_at(double t) const {
  if (segments_.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  if (t < segments_.front().t0 || t > segments_.back().t1) {
    std::ostringstream os;
    os << "time " << t << " outside trajectory span";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t0; });
  return *std::prev(it);
}

PhaseState Trajectory::state_at(double t) const {
  const Segment& seg = segment_at(t);
  auto first = nodes_.begin() + static_cast<std::ptrdiff_t>(seg.first);
  auto last = nodes_.begin() + static_cast<std::ptrdiff_t>(seg.last) + 1;
  auto it = std::upper_bound(first, last, t, [](double v, const Node& n) { return v < n.t; });
  const Node& n = *std::prev(it);
  if (n.t == t) return {n.x, n.y};
  Field field{&model_, seg.mu};
  return to_phase(ode::restep<2>(field, n.t, ode::State<2>{n.x, n.y}, t - n.t));
}

double Trajectory::weight_at(double t) const { return segment_at(t).mu; }

double Trajectory::energy_drift(std::size_t i) const {
  const Segment& seg = segments_.at(i);
  const Node& s = nodes_[seg.first];
  const double e0 = model_.energy(seg.mu, s.x, s.y);
  double drift = 0.0;
  for (std::size_t k = seg.first; k <= seg.last; ++k)
    drift = std::max(drift, std::abs(model_.energy(seg.mu, nodes_[k].x, nodes_[k].y) - e0));
  return drift;
}

void Trajectory::write_csv(std::ostream& os, double n0, double n1) const {
  os << "t,x,y,n,E0,E1\n";
  char buf[256];
  for (const Segment& seg : segments_) {
    // The first node of a later segment repeats the switch point; skip it.
    const std::size_t start = (&seg == &segments_.front()) ? seg.first : seg.first + 1;
    for (std::size_t k = start; k <= seg.last; ++k) {
      const Node& n = nodes_[k];
      std::snprintf(buf, sizeof buf, "%.17e,%.17e,%.17e,%.17e,%.17e,%.17e\n", n.t, n.x, n.y,
                    seg.mu, model_.energy(n0, n.x, n.y), model_.energy(n1, n.x, n.y));
      os << buf;
    }
  }
}

Trajectory flow_autonomous(const Model& model, double mu, PhaseState z0, double t_end,
                           const ode::Tolerances& tol) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  Trajectory traj(model);
  traj.append_segment(mu, 0.0, z0, t_end, tol);
  return traj;
}

Trajectory flow_switched(const ModelParams& params, PhaseState z0, double t_end,
                         const ode::Tolerances& tol) {
  params.validate();
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must be positive");
  Trajectory traj(params.model());
  PhaseState z = z0;
  for (long k = 0;; ++k) {
    const double base = static_cast<double>(k) * params.beta;
    const double sw = base + params.alpha;
    const double next = static_cast<double>(k + 1) * params.beta;
    if (base >= t_end) break;
    const double e1 = std::min(sw, t_end);
    traj.append_segment(params.n1, base, z, e1, tol);
    const Node& n1 = traj.nodes().back();
    z = {n1.x, n1.y};
    if (sw >= t_end) break;
    const double e0 = std::min(next, t_end);
    traj.append_segment(params.n0, sw, z, e0, tol);
    const Node& n0 = traj.nodes().back();
    z = {n0.x, n0.y};
  }
  return traj;
}

PhaseState propagate(const Model& model, double mu, PhaseState z, double duration,
                     const ode::Tolerances& tol) {
  Field field{&model, mu};
  auto none = [](double, const ode::State<2>&, double, const ode::State<2>&) {};
  return to_phase(ode::integrate<2>(field, 0.0, to_state(z), duration, tol, none));
}

PhaseState poincare_psi1(const ModelParams& params, PhaseState z, const ode::Tolerances& tol) {
  return propagate(params.model(), params.n1, z, params.alpha, tol);
}

PhaseState poincare_psi0(const ModelParams& params, PhaseState z, const ode::Tolerances& tol) {
  return propagate(params.model(), params.n0, z, params.low_duration(), tol);
}

PhaseState poincare(const ModelParams& params, PhaseState z, const ode::Tolerances& tol) {
  return poincare_psi0(params, poincare_psi1(params, z, tol), tol);
}

AngleResult angle_flow(const Model& model, double mu, double center, PhaseState z,
                       double duration, const ode::Tolerances& tol) {
  AngleResult res;
  const double r0 = std::hypot(z.x - center, z.y);
  if (r0 < kCenterRadius) throw Error(ErrorKind::CenterSingularity, "start point at the center");
  res.theta0 = std::atan2(z.y, z.x - center);
  res.min_radius = r0;
  Field field{&model, mu};
  auto rhs = [&](double t, const ode::State<3>& s, ode::State<3>& d) {
    ode::State<2> zz{s[0], s[1]}, dz;
    field(t, zz, dz);
    d[0] = dz[0];
    d[1] = dz[1];
    const double u = s[0] - center;
    const double r2 = u * u + s[1] * s[1];
    d[2] = r2 > 0.0 ? (u * dz[1] - s[1] * dz[0]) / r2 : 0.0;
  };
  auto observer = [&](double, const ode::State<3>& p, double tn, const ode::State<3>& s) {
    const double r = std::hypot(s[0] - center, s[1]);
    res.min_radius = std::min(res.min_radius, r);
    if (r < kCenterRadius) {
      std::ostringstream os;
      os << "orbit within " << r << " of the center at t = " << tn;
      throw Error(ErrorKind::CenterSingularity, os.str());
    }
    res.max_increment = std::max(res.max_increment, std::abs(s[2] - p[2]));
  };
  ode::State<3> s0{z.x, z.y, res.theta0};
  const ode::State<3> s1 = ode::integrate<3>(rhs, 0.0, s0, duration, tol, observer);
  res.theta = s1[2];
  res.end = {s1[0], s1[1]};
  return res;
}

AngleResult theta_alpha_full(const ModelParams& params, PhaseState z, const ode::Tolerances& tol) {
  const Model m = params.model();
  const double center = m.equilibria(params.n1).first;
  return angle_flow(m, params.n1, center, z, params.alpha, tol);
}

double theta_alpha(const ModelParams& params, PhaseState z, const ode::Tolerances& tol) {
  return theta_alpha_full(params, z, tol).theta;
}

std::pair<int, int> count_extrema(const Trajectory& traj, double t0, double t1) {
  int nmax = 0, nmin = 0;
  for (const Event& e : traj.events()) {
    if (e.kind == EventKind::Switch || !(e.t > t0 && e.t < t1)) continue;
    if (e.degenerate) {
      std::ostringstream os;
      os << "tangential contact with y = 0 at t = " << e.t << " (slope " << e.slope << ")";
      throw Error(ErrorKind::DegenerateCrossing, os.str());
    }
    (e.kind == EventKind::Maximum ? nmax : nmin)++;
  }
  return {nmax, nmin};
}

ConfinementReport confinement_check(const Trajectory& traj) {
  ConfinementReport rep;
  rep.inf_x = std::numeric_limits<double>::infinity();
  rep.sup_x = -std::numeric_limits<double>::infinity();
  auto outside = [](double x) { return !(x > 0.0 && x < 1.0); };
  auto note = [&](double x) {
    rep.inf_x = std::min(rep.inf_x, x);
    rep.sup_x = std::max(rep.sup_x, x);
  };
  const double t0 = traj.t_begin(), t1 = traj.t_end();
  const std::size_t n = static_cast<std::size_t>(std::ceil((t1 - t0) / 1e-3));
  double t_prev = t0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
    const double x = traj.state_at(t).x;
    note(x);
    if (!rep.first_exit && outside(x)) {
      if (i == 0) {
        rep.first_exit = t0;
      } else {
        double lo = t_prev, hi = t;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          (outside(traj.state_at(mid).x) ? hi : lo) = mid;
        }
        rep.first_exit = hi;
      }
    }
    t_prev = t;
  }
  for (const Node& nd : traj.nodes()) note(nd.x);
  for (const Event& e : traj.events())
    if (e.kind != EventKind::Switch) note(e.x);
  if (!rep.first_exit && outside(rep.inf_x)) rep.first_exit = t0;
  if (!rep.first_exit && outside(rep.sup_x)) rep.first_exit = t0;
  rep.confined = !outside(rep.inf_x) && !outside(rep.sup_x);
  return rep;
}

}  // namespace nagumo::flow
