#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "nagumo/model.hpp"
#include "nagumo/ode.hpp"

namespace nagumo::flow {

/// x' = y, y' = g x − mu F_ext(x). The clamped extension keeps every solution global.
struct Field {
  const Model* model;
  double mu;
  void operator()(double, const ode::State<2>& z, ode::State<2>& dz) const {
    dz[0] = z[1];
    dz[1] = model->g() * z[0] - mu * model->F().F_ext(z[0]);
  }
};

enum class EventKind { Maximum, Minimum, Switch };

/// A y-axis crossing (extremum of x) or a weight switch.
struct Event {
  EventKind kind = EventKind::Maximum;
  double t = 0.0;
  double x = 0.0;
  double slope = 0.0;  ///< y' at the crossing
  bool degenerate = false;
};

struct Node {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Maximal interval of constant weight; nodes[first..last] lie in it.
struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  double mu = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Dense record of a (possibly switched) solution with its event log.
class Trajectory {
 public:
  explicit Trajectory(Model model) : model_(std::move(model)) {}

  const Model& model() const noexcept { return model_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  double t_begin() const { return nodes_.front().t; }
  double t_end() const { return nodes_.back().t; }

  /// Solution at any t in the span: one 5th-order step from the preceding node.
  PhaseState state_at(double t) const;
  double weight_at(double t) const;
  /// Largest |ℰ^mu(node) − ℰ^mu(segment start)| within segment `i`.
  double energy_drift(std::size_t i) const;

  /// CSV with columns t,x,y,n,E0,E1 (17 significant digits).
  void write_csv(std::ostream& os, double n0, double n1) const;

  // Builders.
  void append_segment(double mu, double t0, PhaseState z0, double t1, const ode::Tolerances& tol);

 private:
  const Segment& segment_at(double t) const;

  Model model_;
  std::vector<Node> nodes_;
  std::vector<Segment> segments_;
  std::vector<Event> events_;
};

/// Solution of (E) with constant weight mu on [0, t_end].
Trajectory flow_autonomous(const Model& model, double mu, PhaseState z0, double t_end,
                           const ode::Tolerances& tol = {});

/// Solution of the switched system on [0, t_end]; restarts exactly at every switch.
Trajectory flow_switched(const ModelParams& params, PhaseState z0, double t_end,
                         const ode::Tolerances& tol = {});

/// Time-`duration` map of (E) (negative durations integrate backwards).
PhaseState propagate(const Model& model, double mu, PhaseState z, double duration,
                     const ode::Tolerances& tol = {});

/// Time-α map of (E₁).
PhaseState poincare_psi1(const ModelParams& params, PhaseState z, const ode::Tolerances& tol = {});
/// Time-(β−α) map of (E₀).
PhaseState poincare_psi0(const ModelParams& params, PhaseState z, const ode::Tolerances& tol = {});
/// Period map of the switched system, integrated over [0, β] with a restart at α.
PhaseState poincare(const ModelParams& params, PhaseState z, const ode::Tolerances& tol = {});

struct AngleResult {
  double theta0 = 0.0;
  double theta = 0.0;
  PhaseState end;
  double min_radius = 0.0;
  double max_increment = 0.0;  ///< largest |Δθ| over one accepted step
};

/// Continuous angle about (center, 0) along (E) with weight mu, integrated as an
/// augmented equation. θ(0) = atan2(y, x − center).
AngleResult angle_flow(const Model& model, double mu, double center, PhaseState z,
                       double duration, const ode::Tolerances& tol = {});

/// θ(α, z) about P₁ = (a_{n1}, 0) under (E₁). Throws CenterSingularity if the
/// orbit comes within 1e-10 of P₁.
AngleResult theta_alpha_full(const ModelParams& params, PhaseState z,
                             const ode::Tolerances& tol = {});
double theta_alpha(const ModelParams& params, PhaseState z, const ode::Tolerances& tol = {});

/// Strict maxima and minima of x in the open interval (t0, t1).
std::pair<int, int> count_extrema(const Trajectory& traj, double t0, double t1);

struct ConfinementReport {
  double inf_x = 0.0;
  double sup_x = 0.0;
  bool confined = false;  ///< 0 < x < 1 throughout
  std::optional<double> first_exit;
};

ConfinementReport confinement_check(const Trajectory& traj);

}  // namespace nagumo::flow
