#include "shrinkerlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/roots.hpp"

namespace shrinkerlab {

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("solver config: ") + name + " must be positive");
  };
  positive(rel_tol, "rel_tol");
  positive(abs_tol, "abs_tol");
  positive(max_step, "max_step");
  positive(r_floor, "r_floor");
  positive(t_max, "t_max");
  positive(escape_radius, "escape_radius");
  positive(crossing_tol, "crossing_tol");
  positive(transversal_margin, "transversal_margin");
  if (!(r_floor < 1.0)) throw ConfigError("solver config: r_floor must be < 1");
  if (crossing_tol > abs_tol * 1e3) throw ConfigError("solver config: crossing_tol must be <= 1e3 * abs_tol");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::EventLimit: return "EventLimit";
    case Termination::RFloor: return "RFloor";
    case Termination::Escape: return "Escape";
    case Termination::TimeBudget: return "TimeBudget";
  }
  return "Unknown";
}

GeodesicState Trajectory::at(double t) const {
  if (segments_.empty() || t <= 0.0) return points_.front().state;
  t = std::min(t, t_end());
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const DenseSegment<3>& s) { return v < s.t0; });
  const auto& seg = *std::prev(it);
  return {seg.component(0, t), seg.component(1, t), seg.component(2, t)};
}

std::vector<TrajectoryPoint> Trajectory::sample_uniform(double spacing) const {
  if (!(spacing > 0.0)) throw DomainError("sample spacing must be positive");
  const double len = t_end();
  if (len <= 0.0) return {points_.front()};
  const auto pieces = static_cast<std::size_t>(std::ceil(len / spacing - 1e-12));
  const double h = len / static_cast<double>(std::max<std::size_t>(pieces, 1));
  std::vector<TrajectoryPoint> out;
  out.reserve(pieces + 1);
  for (std::size_t k = 0; k < pieces; ++k) {
    const double t = h * static_cast<double>(k);
    out.push_back({t, at(t)});
  }
  out.push_back(points_.back());
  return out;
}

class TrajectoryBuilder {
 public:
  explicit TrajectoryBuilder(Trajectory& tr) : tr_(tr) {}

  void point(double t, double x, double r, double theta) { tr_.points_.push_back({t, {x, r, theta}}); }

  template <std::size_t N>
  void segment(const DenseSegment<N>& seg) {
    DenseSegment<3> s;
    s.t0 = seg.t0;
    s.h = seg.h;
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t i = 0; i < 3; ++i) s.c[j][i] = seg.c[j][i];
    tr_.segments_.push_back(s);
  }

  void crossing(const CrossingEvent& e) { tr_.crossings_.push_back(e); }
  void finish(Termination t) { tr_.termination_ = t; }

 private:
  Trajectory& tr_;
};

namespace {

constexpr long kMaxSteps = 20'000'000;

template <std::size_t N>
struct EngineOutput {
  std::vector<OdeState<N>> crossing_states;
  OdeState<N> final_state{};
};

// Shared step loop for the plain (N = 3) and variational (N = 12) systems. The
// first three components are always (x, r, theta).
template <std::size_t N, class F>
EngineOutput<N> run_engine(const OdeState<N>& y0, const SolverConfig& cfg, int stop_after, F&& f,
                           Trajectory& traj) {
  cfg.validate();
  if (stop_after < 0) throw DomainError("stop_after_crossings must be >= 0");
  if (!(y0[1] > cfg.r_floor)) throw DomainError("initial radius must exceed r_floor");

  TrajectoryBuilder out(traj);
  EngineOutput<N> result;
  Dop853<N> stepper(cfg.rel_tol, cfg.abs_tol);

  double t = 0.0;
  OdeState<N> y = y0;
  OdeState<N> k1{};
  if (!f(t, y, k1)) throw DomainError("right-hand side undefined at the initial state");
  out.point(t, y[0], y[1], y[2]);

  const double esc2 = cfg.escape_radius * cfg.escape_radius;
  double h = stepper.initial_step(f, t, y, k1, cfg.max_step);
  bool rejected = false;
  int crossings = 0;

  for (long step = 0;; ++step) {
    if (step > kMaxSteps)
      throw IntegrationError(IntegrationError::Kind::StepSizeUnderflow, "step budget exhausted");
    if (t >= cfg.t_max) {
      out.finish(Termination::TimeBudget);
      break;
    }
    bool last = false;
    if (t + 1.01 * h >= cfg.t_max) {
      h = cfg.t_max - t;
      last = true;
    }

    const double err = stepper.attempt(f, t, y, k1, h);
    DenseSegment<N> seg;
    OdeState<N> k1_next{};
    const bool ok = err <= 1.0 && stepper.accept(f, k1_next, seg);
    if (!ok) {
      const double shrink = std::isfinite(err) && err > 1.0
                                ? std::max(1.0 / 6.0, 0.9 * std::pow(err, -Dop853<N>::kOrderExponent))
                                : 0.25;
      h *= shrink;
      rejected = true;
      if (h < 1e-14 * std::max(1.0, t)) {
        // Step collapse right above the axis is the singular r -> 0 end of a geodesic.
        if (y[1] < 1e-3) {
          out.finish(Termination::RFloor);
          break;
        }
        throw IntegrationError(IntegrationError::Kind::StepSizeUnderflow,
                               "step size underflow at t = " + std::to_string(t));
      }
      continue;
    }

    const OdeState<N>& yn = stepper.proposed();
    const double tn = last ? cfg.t_max : t + h;

    if (yn[1] <= cfg.r_floor) {
      out.finish(Termination::RFloor);
      break;
    }
    if (yn[0] * yn[0] + yn[1] * yn[1] > esc2) {
      out.finish(Termination::Escape);
      break;
    }

    const double x0 = y[0];
    const double x1 = yn[0];
    if ((x0 < 0.0 && x1 >= 0.0) || (x0 > 0.0 && x1 <= 0.0)) {
      double tc = tn;
      if (x1 != 0.0) {
        auto g = [&](double s) { return seg.component(0, s); };
        RootOptions opt;
        opt.f_tol = 1e-2 * cfg.crossing_tol;
        opt.x_tol = 1e-16;
        tc = hybrid_root(g, t, tn, x0, x1, opt).x;
      }
      OdeState<N> yc = tc == tn ? yn : seg(tc);
      if (!(std::abs(yc[0]) <= cfg.crossing_tol))
        throw IntegrationError(IntegrationError::Kind::NonTransversalCrossing,
                               "crossing could not be resolved to crossing_tol");
      if (!(std::abs(std::cos(yc[2])) > cfg.transversal_margin))
        throw IntegrationError(IntegrationError::Kind::NonTransversalCrossing,
                               "near-tangential crossing of x = 0 at t = " + std::to_string(tc));
      ++crossings;
      out.crossing({crossings, tc, {yc[0], yc[1], yc[2]}});
      result.crossing_states.push_back(yc);
      if (stop_after > 0 && crossings == stop_after) {
        out.segment(seg);
        out.point(tc, yc[0], yc[1], yc[2]);
        out.finish(Termination::EventLimit);
        result.final_state = yc;
        return result;
      }
    }

    out.segment(seg);
    out.point(tn, yn[0], yn[1], yn[2]);
    t = tn;
    y = yn;
    k1 = k1_next;
    if (last) {
      out.finish(Termination::TimeBudget);
      break;
    }

    const double fac = std::clamp(std::pow(err, Dop853<N>::kOrderExponent) / 0.9, 1.0 / 6.0, 3.0);
    double h_new = h / fac;
    if (rejected) h_new = std::min(h_new, h);
    rejected = false;
    h = std::min(h_new, cfg.max_step);
  }
  result.final_state = y;
  return result;
}

}  // namespace

namespace {

// The cylinder line r = sqrt(2(n-1)) is an exact solution, but perturbations of
// it grow like exp(x^2/4), so round-off alone would bend a numerical line back
// towards the section. Exact equilibrium starts are therefore traced analytically.
bool is_cylinder_start(const GeodesicState& s, Dimension n) {
  constexpr double eps = 4.0 * std::numeric_limits<double>::epsilon();
  const double rc = cylinder_radius(n);
  return std::abs(s.r - rc) <= eps * rc && std::abs(std::sin(s.theta)) <= eps;
}

Trajectory cylinder_line(const GeodesicState& s, const SolverConfig& cfg) {
  cfg.validate();
  Trajectory traj;
  TrajectoryBuilder out(traj);
  const double dir = std::cos(s.theta) > 0.0 ? 1.0 : -1.0;
  // Leave the escape ball or exhaust t_max, whichever comes first.
  const double reach = std::sqrt(std::max(0.0, cfg.escape_radius * cfg.escape_radius - s.r * s.r));
  const double to_escape = dir > 0 ? reach - s.x : reach + s.x;
  const bool escapes = to_escape < cfg.t_max;
  const double t_end = escapes ? std::max(0.0, to_escape) : cfg.t_max;
  out.point(0.0, s.x, s.r, s.theta);
  for (double t0 = 0.0; t0 < t_end;) {
    const double h = std::min(cfg.max_step, t_end - t0);
    DenseSegment<3> seg;
    seg.t0 = t0;
    seg.h = h;
    seg.c[0] = {s.x + dir * t0, s.r, s.theta};
    seg.c[1] = {dir * h, 0.0, 0.0};
    out.segment(seg);
    t0 = (t_end - t0 - h <= 1e-12) ? t_end : t0 + h;
    out.point(t0, s.x + dir * t0, s.r, s.theta);
  }
  out.finish(escapes ? Termination::Escape : Termination::TimeBudget);
  return traj;
}

}  // namespace

Trajectory integrate(const GeodesicState& initial, Dimension n, const SolverConfig& config,
                     int stop_after_crossings) {
  if (!(initial.r > 0.0)) throw DomainError("initial radius must be positive");
  if (stop_after_crossings < 0) throw DomainError("stop_after_crossings must be >= 0");
  if (is_cylinder_start(initial, n)) return cylinder_line(initial, config);
  const int nn = n.value();
  auto f = [nn](double, const OdeState<3>& y, OdeState<3>& dy) {
    if (!(y[1] > 0.0) || !std::isfinite(y[2])) return false;
    const auto d = rhs_unchecked(y[0], y[1], y[2], nn);
    dy = {d.dx, d.dr, d.dtheta};
    return true;
  };
  Trajectory traj;
  run_engine<3>({initial.x, initial.r, initial.theta}, config, stop_after_crossings, f, traj);
  return traj;
}

Eigen::Matrix3d rhs_jacobian(const GeodesicState& s, Dimension n) {
  const auto p = angle_rate_partials(s, n);
  Eigen::Matrix3d j;
  j << 0.0, 0.0, -std::sin(s.theta),
       0.0, 0.0, std::cos(s.theta),
       p.d_x, p.d_r, p.d_theta;
  return j;
}

namespace {

Eigen::Matrix3d unpack_matrix(const OdeState<12>& y) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = y[3 + 3 * i + j];
  return m;
}

}  // namespace

VariationalTrajectory integrate_with_variations(const GeodesicState& initial, Dimension n,
                                                const SolverConfig& config, int stop_after_crossings) {
  if (!(initial.r > 0.0)) throw DomainError("initial radius must be positive");
  const int nn = n.value();
  const double k = nn - 1;
  auto f = [nn, k](double, const OdeState<12>& y, OdeState<12>& dy) {
    const double x = y[0], r = y[1], th = y[2];
    if (!(r > 0.0) || !std::isfinite(th)) return false;
    const double c = std::cos(th), s = std::sin(th);
    const auto d = rhs_unchecked(x, r, th, nn);
    dy[0] = d.dx;
    dy[1] = d.dr;
    dy[2] = d.dtheta;
    const double jx = 0.5 * s;
    const double jr = (-k / (r * r) - 0.5) * c;
    const double jt = 0.5 * x * c - (k / r - 0.5 * r) * s;
    for (int col = 0; col < 3; ++col) {
      const double m0 = y[3 + col], m1 = y[6 + col], m2 = y[9 + col];
      dy[3 + col] = -s * m2;
      dy[6 + col] = c * m2;
      dy[9 + col] = jx * m0 + jr * m1 + jt * m2;
    }
    return true;
  };

  OdeState<12> y0{initial.x, initial.r, initial.theta, 1, 0, 0, 0, 1, 0, 0, 0, 1};
  VariationalTrajectory result;
  const auto raw = run_engine<12>(y0, config, stop_after_crossings, f, result.trajectory);
  result.crossing_matrices.reserve(raw.crossing_states.size());
  for (const auto& yc : raw.crossing_states) result.crossing_matrices.push_back(unpack_matrix(yc));
  result.final_matrix = unpack_matrix(raw.final_state);
  return result;
}

}  // namespace shrinkerlab
