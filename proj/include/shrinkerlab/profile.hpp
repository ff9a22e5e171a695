#pragma once

#include <limits>
#include <string>
#include <vector>

#include "shrinkerlab/geometry.hpp"
#include "shrinkerlab/integrator.hpp"
#include "shrinkerlab/poincare.hpp"

namespace shrinkerlab {

inline constexpr double kDefaultProfileSpacing = 0.04;

struct ProfileSample {
  double t = 0.0;  // Euclidean arclength
  double x = 0.0;
  double r = 0.0;
  double theta = 0.0;
};

struct ProfileSource {
  double R_star = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string config_digest;
};

/// A sampled profile curve in the (x, r) half-plane. A closed profile repeats its
/// first point (mod 2 pi in theta) as its last sample.
struct ShrinkerProfile {
  Dimension n;
  std::vector<ProfileSample> samples;
  bool closed = false;
  ProfileSource source;

  double length() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

struct ProfileChecks {
  double max_gap = std::numeric_limits<double>::infinity();
  double closure_tol = 1e-6;
};

/// Throws ProfileError unless: r > 0 everywhere, t strictly increasing, gaps
/// <= max_gap, and (if closed) the ends agree and theta turns by +-2 pi.
void validate_profile(const ShrinkerProfile& profile, const ProfileChecks& checks = {});

/// Full loop through a symmetric fixed point: the half loop from (0, R*, 0) to
/// the first crossing, sampled uniformly with gaps <= spacing, followed by its
/// mirror image under x -> -x.
ShrinkerProfile assemble_symmetric_profile(const FixedPointRecord& record, const SolverConfig& config,
                                           double spacing);

/// Full loop through any fixed point of P: the trajectory from (0, R*, theta*)
/// to its second crossing, sampled uniformly with gaps <= spacing.
ShrinkerProfile assemble_loop_profile(const FixedPointRecord& record, const SolverConfig& config, double spacing);

/// Uniform resampling of an (open) trajectory.
ShrinkerProfile trajectory_profile(const Trajectory& trajectory, Dimension n, double spacing);

/// Upper semicircle of radius sqrt(2n), traversed from x < 0 to x > 0 over the top,
/// with `trim` arclength removed at each end so that r stays positive.
ShrinkerProfile sphere_profile(Dimension n, std::size_t pieces, double trim = 1e-7);

/// Segment of the cylinder line r = sqrt(2(n-1)) for x in [x_lo, x_hi].
ShrinkerProfile cylinder_profile(Dimension n, double x_lo, double x_hi, std::size_t pieces);

}  // namespace shrinkerlab
