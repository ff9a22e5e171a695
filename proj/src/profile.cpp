#include "shrinkerlab/profile.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "shrinkerlab/errors.hpp"

namespace shrinkerlab {

void validate_profile(const ShrinkerProfile& p, const ProfileChecks& checks) {
  if (p.samples.empty()) throw ProfileError("profile has no samples");
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    const auto& s = p.samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.r) || !std::isfinite(s.theta))
      throw ProfileError("non-finite sample at index " + std::to_string(i));
    if (!(s.r > 0.0)) throw ProfileError("sample " + std::to_string(i) + " has r <= 0");
    if (i > 0) {
      const double gap = s.t - p.samples[i - 1].t;
      if (!(gap > 0.0)) throw ProfileError("arclength must increase strictly (index " + std::to_string(i) + ")");
      if (gap > checks.max_gap * (1.0 + 1e-9)) throw ProfileError("sample gap exceeds max_step");
    }
  }
  if (p.closed) {
    if (p.samples.size() < 4) throw ProfileError("closed profile needs at least four samples");
    const auto& a = p.samples.front();
    const auto& b = p.samples.back();
    const double turning = b.theta - a.theta;
    if (std::abs(a.x - b.x) > checks.closure_tol || std::abs(a.r - b.r) > checks.closure_tol)
      throw ProfileError("closed profile does not return to its first point");
    if (std::abs(std::abs(turning) - 2.0 * std::numbers::pi) > checks.closure_tol)
      throw ProfileError("closed profile must turn by +-2 pi");
  }
}

ShrinkerProfile assemble_symmetric_profile(const FixedPointRecord& record, const SolverConfig& config,
                                           double spacing) {
  if (!(spacing > 0.0)) throw DomainError("profile spacing must be positive");
  const auto half = return_map(record.R_star, record.theta_star, 1, record.n, config);
  const auto first = half.trajectory.sample_uniform(spacing);
  const double T = half.t_star;
  const std::size_t N = first.size() - 1;

  ShrinkerProfile p;
  p.n = record.n;
  p.closed = true;
  p.source.R_star = record.R_star;
  p.source.residual = record.residual;
  p.samples.reserve(2 * N + 1);
  for (const auto& q : first) p.samples.push_back({q.t, q.state.x, q.state.r, q.state.theta});
  // Mirror: the point at T + s is the reflection of the point at T - s, with the
  // tangent angle continued past -pi.
  for (std::size_t k = 1; k <= N; ++k) {
    const auto& q = first[N - k];
    p.samples.push_back({T + (T - q.t), -q.state.x, q.state.r, -q.state.theta - 2.0 * std::numbers::pi});
  }
  p.samples.back().t = 2.0 * T;
  return p;
}

ShrinkerProfile assemble_loop_profile(const FixedPointRecord& record, const SolverConfig& config, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("profile spacing must be positive");
  const auto loop = return_map(record.R_star, record.theta_star, kPoincareCrossing, record.n, config);
  ShrinkerProfile p = trajectory_profile(loop.trajectory, record.n, spacing);
  p.closed = true;
  p.source.R_star = record.R_star;
  p.source.residual = record.residual;
  return p;
}

ShrinkerProfile trajectory_profile(const Trajectory& trajectory, Dimension n, double spacing) {
  ShrinkerProfile p;
  p.n = n;
  for (const auto& q : trajectory.sample_uniform(spacing))
    p.samples.push_back({q.t, q.state.x, q.state.r, q.state.theta});
  return p;
}

ShrinkerProfile sphere_profile(Dimension n, std::size_t pieces, double trim) {
  if (pieces < 1) throw DomainError("sphere profile needs at least one piece");
  const double rho = sphere_radius(n);
  const double phi0 = trim / rho;
  const double span = std::numbers::pi - 2.0 * phi0;
  ShrinkerProfile p;
  p.n = n;
  p.samples.reserve(pieces + 1);
  for (std::size_t k = 0; k <= pieces; ++k) {
    const double phi = phi0 + span * static_cast<double>(k) / static_cast<double>(pieces);
    p.samples.push_back({rho * (phi - phi0), -rho * std::cos(phi), rho * std::sin(phi), 0.5 * std::numbers::pi - phi});
  }
  return p;
}

ShrinkerProfile cylinder_profile(Dimension n, double x_lo, double x_hi, std::size_t pieces) {
  if (!(x_hi > x_lo) || pieces < 1) throw DomainError("cylinder profile needs x_lo < x_hi and pieces >= 1");
  const double rc = cylinder_radius(n);
  ShrinkerProfile p;
  p.n = n;
  for (std::size_t k = 0; k <= pieces; ++k) {
    const double t = (x_hi - x_lo) * static_cast<double>(k) / static_cast<double>(pieces);
    p.samples.push_back({t, x_lo + t, rc, 0.0});
  }
  return p;
}

}  // namespace shrinkerlab
