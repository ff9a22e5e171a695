#pragma once

// Return maps of the geodesic flow to the section x = 0 and their fixed points.
//
// A start (0, R, theta) on the section is followed to its m-th crossing of
// x = 0 at t > 0. With m = 2 this is the Poincare map P(R, theta); closed
// profile curves crossing the r-axis twice are fixed points of P (theta taken
// mod 2 pi, since a loop turns by -2 pi).

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/integrator.hpp"

namespace shrinkerlab {

/// The trajectory stopped (r_floor, escape, t_max) before the requested crossing.
class NoReturn : public Error {
 public:
  NoReturn(Termination reason, int crossings_seen, const std::string& what)
      : Error(what), reason_(reason), crossings_seen_(crossings_seen) {}
  Termination reason() const noexcept { return reason_; }
  int crossings_seen() const noexcept { return crossings_seen_; }

 private:
  Termination reason_;
  int crossings_seen_;
};

struct ReturnMapResult {
  double r_out = 0.0;
  double theta_out = 0.0;  // unwrapped
  double t_star = 0.0;     // time of the m-th crossing
  int m = 2;
  Trajectory trajectory;
};

inline constexpr int kPoincareCrossing = 2;

ReturnMapResult return_map(double R, double theta, int m, Dimension n, const SolverConfig& config);

/// P_f(R): radial component of P(R, 0).
double forgetful_map(double R, Dimension n, const SolverConfig& config);

/// theta + pi at the first crossing from (0, R, 0). Zero means the curve meets
/// the r-axis perpendicularly after half a loop and closes up by reflection.
double symmetric_shooting_residual(double R, Dimension n, const SolverConfig& config);

enum class JacobianMethod { FiniteDifference, Variational };

/// dP in section coordinates (r, theta) at (R, theta), for the m-crossing map.
/// The variational route corrects the fundamental matrix for the variation of
/// the crossing time.
Eigen::Matrix2d jacobian(double R, double theta, Dimension n, JacobianMethod method, const SolverConfig& config,
                         int m = kPoincareCrossing);

/// Both Jacobians; throws JacobianMismatch if any entry differs by more than tol.
Eigen::Matrix2d cross_validated_jacobian(double R, double theta, Dimension n, const SolverConfig& config,
                                         double tol = 1e-4, int m = kPoincareCrossing);

enum class Classification { Isolated, CurveCandidate, Degenerate };

std::string_view to_string(Classification c);

/// Rank test on dP - I via its singular values.
Classification classify_jacobian(const Eigen::Matrix2d& dP, double tol);

struct FixedPointRecord {
  double R_star = 0.0;
  double theta_star = 0.0;
  double residual = 0.0;  // max-norm of P - id (theta mod 2 pi)
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
  Classification classification = Classification::Isolated;
  Dimension n;
  double shooting_residual = 0.0;  // Symmetric mode only
  double half_loop_length = 0.0;   // arclength to the first crossing
  double inner_radius = 0.0;       // r at the first crossing
};

Classification classify_fixed_point(const FixedPointRecord& record, double tol);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct FixedPointOptions {
  double shooting_tol = 1e-10;  // |symmetric residual|
  double closure_tol = 1e-8;    // max-norm of P - id
  double classification_tol = 1e-6;
  int newton_max_iterations = 40;
  int damping_halvings = 20;
};

/// Root of the symmetric shooting residual inside `bracket`, assembled into a
/// full loop and checked for closure. Throws NoBracket when the bracket has no
/// sign change, straddles a discontinuity (2 pi jump in the winding) rather
/// than a root, or contains starts whose trajectories never return.
FixedPointRecord find_fixed_point_symmetric(const Bracket& bracket, Dimension n, const SolverConfig& config,
                                            const FixedPointOptions& options = {});

/// Damped Newton on P - id from a seed (R, theta). Throws NewtonDiverged.
FixedPointRecord find_fixed_point_full(double R_seed, double theta_seed, Dimension n, const SolverConfig& config,
                                       const FixedPointOptions& options = {});

struct ScanPoint {
  double R = 0.0;
  std::optional<double> residual;  // empty = NoReturn
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::vector<Bracket> brackets;
};

/// Default window [sqrt(2(n-1)) + 0.02, sqrt(2n) + 2].
Bracket default_scan_window(Dimension n);

inline constexpr double kDefaultScanStep = 0.01;

/// Symmetric residual on the grid lo, lo + step, ..., hi. A bracket joins two
/// neighbouring grid points with finite residuals of opposite sign. Grid points
/// run on up to `jobs` threads; results keep grid order.
ScanResult scan(const Bracket& window, double step, Dimension n, const SolverConfig& config, int jobs = 1);

}  // namespace shrinkerlab
