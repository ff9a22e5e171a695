#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "shrinkerlab/dop853.hpp"
#include "shrinkerlab/geometry.hpp"

namespace shrinkerlab {

struct SolverConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.05;
  double r_floor = 1e-6;      // radial cutoff; the geodesic equation is singular at r = 0
  double t_max = 200.0;       // arclength budget
  double escape_radius = 20.0;
  double crossing_tol = 1e-10;
  double transversal_margin = 1e-8;  // minimum |cos theta| at a recorded crossing

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

enum class Termination { EventLimit, RFloor, Escape, TimeBudget };

std::string_view to_string(Termination t);

struct CrossingEvent {
  int index = 0;  // 1 = first crossing of x = 0 at t > 0
  double t = 0.0;
  GeodesicState state;

  /// +1 when crossing towards x > 0, -1 otherwise.
  int direction() const { return std::cos(state.theta) > 0.0 ? 1 : -1; }
};

struct TrajectoryPoint {
  double t = 0.0;
  GeodesicState state;
};

class Trajectory {
 public:
  const std::vector<TrajectoryPoint>& points() const { return points_; }
  const std::vector<CrossingEvent>& crossings() const { return crossings_; }
  Termination termination() const { return termination_; }

  double t_end() const { return points_.back().t; }
  const GeodesicState& final_state() const { return points_.back().state; }

  /// Dense-output evaluation, t in [0, t_end()].
  GeodesicState at(double t) const;

  /// States at t = 0, h, 2h, ..., plus t_end, with h <= spacing chosen so that
  /// [0, t_end] splits into equal pieces.
  std::vector<TrajectoryPoint> sample_uniform(double spacing) const;

 private:
  friend class TrajectoryBuilder;

  std::vector<TrajectoryPoint> points_;
  std::vector<DenseSegment<3>> segments_;
  std::vector<CrossingEvent> crossings_;
  Termination termination_ = Termination::TimeBudget;
};

/// Integrates the geodesic equations from `initial` until `stop_after_crossings`
/// crossings of x = 0 at t > 0 have been recorded (0 = no limit), or until the
/// trajectory reaches r <= r_floor, leaves the ball of radius escape_radius, or
/// exhausts t_max. The reason is reported in Trajectory::termination().
///
/// Throws IntegrationError on step-size underflow or on a crossing whose
/// |cos theta| is below transversal_margin, DomainError on a bad start.
Trajectory integrate(const GeodesicState& initial, Dimension n, const SolverConfig& config,
                     int stop_after_crossings = 0);

struct VariationalTrajectory {
  Trajectory trajectory;
  /// Fundamental matrix d(x, r, theta)(t) / d(x, r, theta)(0) at each crossing.
  std::vector<Eigen::Matrix3d> crossing_matrices;
  Eigen::Matrix3d final_matrix = Eigen::Matrix3d::Identity();
};

/// integrate() jointly with the linearized flow, started from the identity.
/// The variational components take part in step-size control.
VariationalTrajectory integrate_with_variations(const GeodesicState& initial, Dimension n,
                                                const SolverConfig& config, int stop_after_crossings = 0);

/// Jacobian of the geodesic vector field at s.
Eigen::Matrix3d rhs_jacobian(const GeodesicState& s, Dimension n);

}  // namespace shrinkerlab
