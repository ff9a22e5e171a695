#include "shrinkerlab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "shrinkerlab/roots.hpp"

namespace shrinkerlab {

namespace {

void check_start(double R, double theta, const SolverConfig& config) {
  if (!(R > config.r_floor)) throw DomainError("start radius must exceed r_floor");
  if (!(std::abs(std::cos(theta)) > config.transversal_margin))
    throw NonTransversalStart("start angle is tangent to the section x = 0");
}

double closure_norm(double R, double theta, const ReturnMapResult& p) {
  return std::max(std::abs(p.r_out - R), std::abs(wrap_angle(p.theta_out - theta)));
}

}  // namespace

ReturnMapResult return_map(double R, double theta, int m, Dimension n, const SolverConfig& config) {
  if (m < 1) throw DomainError("crossing index m must be >= 1");
  check_start(R, theta, config);
  Trajectory traj = integrate({0.0, R, theta}, n, config, m);
  const auto& crossings = traj.crossings();
  if (static_cast<int>(crossings.size()) < m) {
    throw NoReturn(traj.termination(), static_cast<int>(crossings.size()),
                   "no return to x = 0 (crossing " + std::to_string(m) + "): trajectory ended with " +
                       std::string(to_string(traj.termination())));
  }
  const auto& c = crossings[m - 1];
  return {c.state.r, c.state.theta, c.t, m, std::move(traj)};
}

double forgetful_map(double R, Dimension n, const SolverConfig& config) {
  return return_map(R, 0.0, kPoincareCrossing, n, config).r_out;
}

double symmetric_shooting_residual(double R, Dimension n, const SolverConfig& config) {
  return return_map(R, 0.0, 1, n, config).theta_out + std::numbers::pi;
}

Eigen::Matrix2d jacobian(double R, double theta, Dimension n, JacobianMethod method, const SolverConfig& config,
                         int m) {
  Eigen::Matrix2d dP;
  if (method == JacobianMethod::FiniteDifference) {
    const double h = std::max(1e-6, 1e-6 * std::abs(R));
    auto image = [&](double r0, double th0) {
      const auto p = return_map(r0, th0, m, n, config);
      return Eigen::Vector2d(p.r_out, p.theta_out);
    };
    // Central differences; the perturbation integrations are independent.
    auto fr_p = std::async(std::launch::async, image, R + h, theta);
    auto fr_m = std::async(std::launch::async, image, R - h, theta);
    auto ft_p = std::async(std::launch::async, image, R, theta + h);
    const Eigen::Vector2d ft_m = image(R, theta - h);
    dP.col(0) = (fr_p.get() - fr_m.get()) / (2.0 * h);
    dP.col(1) = (ft_p.get() - ft_m) / (2.0 * h);
    return dP;
  }

  if (m < 1) throw DomainError("crossing index m must be >= 1");
  check_start(R, theta, config);
  const auto vt = integrate_with_variations({0.0, R, theta}, n, config, m);
  const auto& crossings = vt.trajectory.crossings();
  if (static_cast<int>(crossings.size()) < m)
    throw NoReturn(vt.trajectory.termination(), static_cast<int>(crossings.size()),
                   "no return to x = 0 while integrating variations");
  const Eigen::Matrix3d& M = vt.crossing_matrices[m - 1];
  const auto& s = crossings[m - 1].state;
  const auto f = rhs(s, n);
  const Eigen::Vector3d flow(f.dx, f.dr, f.dtheta);
  // Perturbing the start shifts the crossing time by -(dx row of M) / x'.
  const Eigen::Matrix3d section = M - flow * M.row(0) / f.dx;
  return section.block<2, 2>(1, 1);
}

Eigen::Matrix2d cross_validated_jacobian(double R, double theta, Dimension n, const SolverConfig& config,
                                         double tol, int m) {
  const Eigen::Matrix2d fd = jacobian(R, theta, n, JacobianMethod::FiniteDifference, config, m);
  const Eigen::Matrix2d var = jacobian(R, theta, n, JacobianMethod::Variational, config, m);
  const double gap = (fd - var).cwiseAbs().maxCoeff();
  if (!(gap <= tol))
    throw JacobianMismatch("finite-difference and variational Jacobians differ by " + std::to_string(gap));
  return var;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Isolated: return "Isolated";
    case Classification::CurveCandidate: return "CurveCandidate";
    case Classification::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

Classification classify_jacobian(const Eigen::Matrix2d& dP, double tol) {
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2d>(dP - Eigen::Matrix2d::Identity()).singularValues();
  const int small = (sv(0) <= tol) + (sv(1) <= tol);
  if (small == 0) return Classification::Isolated;
  if (small == 1) return Classification::CurveCandidate;
  return Classification::Degenerate;
}

Classification classify_fixed_point(const FixedPointRecord& record, double tol) {
  return classify_jacobian(record.jacobian, tol);
}

namespace {

void finish_record(FixedPointRecord& rec, const SolverConfig& config, const FixedPointOptions& options) {
  rec.jacobian = jacobian(rec.R_star, rec.theta_star, rec.n, JacobianMethod::Variational, config);
  rec.classification = classify_jacobian(rec.jacobian, options.classification_tol);
  const auto half = return_map(rec.R_star, rec.theta_star, 1, rec.n, config);
  rec.half_loop_length = half.t_star;
  rec.inner_radius = half.r_out;
}

}  // namespace

namespace {

FixedPointRecord symmetric_root(const Bracket& bracket, Dimension n, const SolverConfig& config,
                                const FixedPointOptions& options) {
  auto residual = [&](double R) { return symmetric_shooting_residual(R, n, config); };
  const double f_lo = residual(bracket.lo);
  const double f_hi = residual(bracket.hi);
  if (!(f_lo * f_hi <= 0.0)) throw NoBracket("symmetric residual has the same sign at both bracket ends");

  RootOptions opt;
  opt.f_tol = 0.1 * options.shooting_tol;
  opt.x_tol = 1e-15;
  const RootResult root = hybrid_root(residual, bracket.lo, bracket.hi, f_lo, f_hi, opt);
  if (!(std::abs(root.fx) < options.shooting_tol))
    throw NoBracket("bracket collapsed without a root (residual " + std::to_string(root.fx) +
                    "); the sign change is a discontinuity");

  // A winding jump of 2 pi can masquerade as a sign change whose one-sided limit is 0.
  const double delta = 1e-6 * std::max(1.0, std::abs(root.x));
  for (double probe : {root.x - delta, root.x + delta}) {
    if (!(std::abs(residual(probe)) < 1e-2))
      throw NoBracket("symmetric residual is discontinuous at R = " + std::to_string(root.x));
  }

  FixedPointRecord rec;
  rec.n = n;
  rec.R_star = root.x;
  rec.theta_star = 0.0;
  rec.shooting_residual = root.fx;
  const auto loop = return_map(rec.R_star, 0.0, kPoincareCrossing, n, config);
  rec.residual = closure_norm(rec.R_star, 0.0, loop);
  if (!(rec.residual < options.closure_tol))
    throw NoBracket("reflected profile fails to close: |P - id| = " + std::to_string(rec.residual));
  finish_record(rec, config, options);
  return rec;
}

}  // namespace

FixedPointRecord find_fixed_point_symmetric(const Bracket& bracket, Dimension n, const SolverConfig& config,
                                            const FixedPointOptions& options) {
  try {
    return symmetric_root(bracket, n, config, options);
  } catch (const NoReturn& e) {
    throw NoBracket(std::string("bracket contains starts that never return: ") + e.what());
  } catch (const IntegrationError& e) {
    throw NoBracket(std::string("integration failed inside the bracket: ") + e.what());
  }
}

FixedPointRecord find_fixed_point_full(double R_seed, double theta_seed, Dimension n, const SolverConfig& config,
                                       const FixedPointOptions& options) {
  Eigen::Vector2d z(R_seed, theta_seed);
  auto defect = [&](const Eigen::Vector2d& p) {
    const auto img = return_map(p(0), p(1), kPoincareCrossing, n, config);
    return Eigen::Vector2d(img.r_out - p(0), wrap_angle(img.theta_out - p(1)));
  };

  Eigen::Vector2d F = defect(z);
  double norm = F.cwiseAbs().maxCoeff();
  for (int it = 0; it < options.newton_max_iterations && norm > 1e-14; ++it) {
    const Eigen::Matrix2d J =
        jacobian(z(0), z(1), n, JacobianMethod::Variational, config) - Eigen::Matrix2d::Identity();
    const auto lu = J.fullPivLu();
    if (!lu.isInvertible()) throw NewtonDiverged("singular Jacobian of P - id");
    const Eigen::Vector2d step = -lu.solve(F);
    if (!step.allFinite()) throw NewtonDiverged("non-finite Newton step");

    bool improved = false;
    double lambda = 1.0;
    for (int k = 0; k <= options.damping_halvings; ++k, lambda *= 0.5) {
      const Eigen::Vector2d trial = z + lambda * step;
      try {
        const Eigen::Vector2d Ft = defect(trial);
        const double nt = Ft.cwiseAbs().maxCoeff();
        if (nt < norm) {
          z = trial;
          F = Ft;
          norm = nt;
          improved = true;
          break;
        }
      } catch (const NoReturn&) {
      } catch (const NonTransversalStart&) {
      }
    }
    if (!improved) break;  // at the integration noise floor, or stuck
    if (step.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, std::abs(z(0)))) break;
  }
  if (!(norm < options.closure_tol))
    throw NewtonDiverged("Newton on P - id stalled at |P - id| = " + std::to_string(norm));

  FixedPointRecord rec;
  rec.n = n;
  rec.R_star = z(0);
  rec.theta_star = z(1);
  rec.residual = norm;
  finish_record(rec, config, options);
  return rec;
}

Bracket default_scan_window(Dimension n) {
  return {cylinder_radius(n) + 0.02, sphere_radius(n) + 2.0};
}

ScanResult scan(const Bracket& window, double step, Dimension n, const SolverConfig& config, int jobs) {
  if (!(step > 0.0)) throw DomainError("scan step must be positive");
  if (!(window.hi >= window.lo)) throw DomainError("scan window must satisfy lo <= hi");
  if (!(window.lo > config.r_floor)) throw DomainError("scan window must lie above r_floor");

  const auto count = static_cast<std::size_t>(std::floor((window.hi - window.lo) / step + 1e-9)) + 1;
  ScanResult out;
  out.points.resize(count);

  auto evaluate = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < count; k += stride) {
      const double R = window.lo + step * static_cast<double>(k);
      out.points[k].R = R;
      try {
        out.points[k].residual = symmetric_shooting_residual(R, n, config);
      } catch (const NoReturn&) {
      } catch (const IntegrationError&) {
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  std::vector<std::future<void>> pending;
  for (std::size_t w = 1; w < workers; ++w) pending.push_back(std::async(std::launch::async, evaluate, w, workers));
  evaluate(0, workers);
  for (auto& p : pending) p.get();

  for (std::size_t k = 0; k + 1 < count; ++k) {
    const auto& a = out.points[k];
    const auto& b = out.points[k + 1];
    if (a.residual && b.residual && (*a.residual) * (*b.residual) < 0.0) out.brackets.push_back({a.R, b.R});
  }
  return out;
}

}  // namespace shrinkerlab
