#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/integrator.hpp"

using namespace shrinkerlab;

namespace {

// Max deviation from the circle x^2 + r^2 = rho^2 (and of theta from the circle's
// tangent angle) over the first quarter arc, where the solution is well away
// from the singular axis.
double sphere_deviation(Dimension n) {
  SolverConfig cfg;
  const double rho = sphere_radius(n);
  const Trajectory traj = integrate({0.0, rho, 0.0}, n, cfg);
  double worst = 0.0;
  for (const auto& p : traj.points()) {
    if (p.state.r < 0.1 * rho) break;
    const double phi = 0.5 * std::numbers::pi + p.t / rho;  // polar angle from -x axis
    worst = std::max(worst, std::abs(std::hypot(p.state.x, p.state.r) - rho));
    worst = std::max(worst, std::abs(p.state.x + rho * std::cos(phi)));
    worst = std::max(worst, std::abs(p.state.theta - (0.5 * std::numbers::pi - phi)));
  }
  return worst;
}

}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = [](auto mutate) {
    SolverConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  bad([](SolverConfig& c) { c.rel_tol = 0.0; });
  bad([](SolverConfig& c) { c.abs_tol = -1.0; });
  bad([](SolverConfig& c) { c.max_step = std::nan(""); });
  bad([](SolverConfig& c) { c.r_floor = 1.5; });
  bad([](SolverConfig& c) { c.crossing_tol = 1.0; });
  bad([](SolverConfig& c) { c.escape_radius = 0.0; });
}

TEST_CASE("sphere circle is reproduced to 1e-8 for n = 2, 3, 5") {
  for (int n : {2, 3, 5}) {
    CAPTURE(n);
    CHECK(sphere_deviation(Dimension(n)) < 1e-8);
  }
}

TEST_CASE("sphere circle ends at the axis without crossing x = 0") {
  SolverConfig cfg;
  const Trajectory traj = integrate({0.0, 2.0, 0.0}, Dimension(2), cfg);
  CHECK(traj.termination() == Termination::RFloor);
  CHECK(traj.crossings().empty());
  CHECK(traj.final_state().x == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("cylinder line") {
  SolverConfig cfg;
  SUBCASE("exact start is the straight line until escape") {
    for (int n : {2, 3, 5}) {
      const Dimension d(n);
      const Trajectory traj = integrate({0.0, cylinder_radius(d), 0.0}, d, cfg);
      CHECK(traj.termination() == Termination::Escape);
      CHECK(traj.crossings().empty());
      for (const auto& p : traj.points()) {
        CHECK(p.state.r == cylinder_radius(d));
        CHECK(p.state.theta == 0.0);
        CHECK(p.state.x == doctest::Approx(p.t).epsilon(1e-15));
      }
    }
  }
  SUBCASE("numerically integrated line stays within 1e-8 for x <= 6") {
    // Off the exact equilibrium by 1e-13, so the adaptive integrator does the work;
    // deviations grow like exp(x^2/4).
    for (int n : {2, 3, 5}) {
      const Dimension d(n);
      const double rc = cylinder_radius(d);
      const Trajectory traj = integrate({0.0, rc + 1e-13, 0.0}, d, cfg);
      double worst = 0.0;
      for (const auto& p : traj.points()) {
        if (p.state.x > 6.0) break;
        worst = std::max({worst, std::abs(p.state.r - rc), std::abs(p.state.theta)});
      }
      CAPTURE(n);
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("arclength parametrization and dense output") {
  SolverConfig cfg;
  const Dimension n(2);
  const Trajectory traj = integrate({0.0, 2.7, 0.2}, n, cfg, 3);
  const auto& pts = traj.points();
  REQUIRE(pts.size() > 10);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double chord = std::hypot(pts[i].state.x - pts[i - 1].state.x, pts[i].state.r - pts[i - 1].state.r);
    const double dt = pts[i].t - pts[i - 1].t;
    CHECK(dt <= cfg.max_step * (1 + 1e-12));
    CHECK(chord <= dt * (1 + 1e-9));
    CHECK(chord >= dt * (1 - dt * dt));  // chord of a curve with |kappa| < ~3
  }
  for (std::size_t i = 0; i < pts.size(); i += 17) {
    const auto s = traj.at(pts[i].t);
    CHECK(s.x == doctest::Approx(pts[i].state.x).epsilon(1e-12));
    CHECK(s.r == doctest::Approx(pts[i].state.r).epsilon(1e-12));
  }
  const auto uniform = traj.sample_uniform(0.04);
  CHECK(uniform.front().t == 0.0);
  CHECK(uniform.back().t == traj.t_end());
  for (std::size_t i = 1; i < uniform.size(); ++i) CHECK(uniform[i].t - uniform[i - 1].t <= 0.04 + 1e-12);
}

TEST_CASE("crossings alternate in direction and sit on x = 0") {
  SolverConfig cfg;
  const Trajectory traj = integrate({0.0, 3.1, 0.0}, Dimension(2), cfg, 6);
  REQUIRE(traj.termination() == Termination::EventLimit);
  const auto& c = traj.crossings();
  REQUIRE(c.size() == 6);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].index == static_cast<int>(i) + 1);
    CHECK(std::abs(c[i].state.x) <= cfg.crossing_tol);
    if (i > 0) {
      CHECK(c[i].direction() == -c[i - 1].direction());
      CHECK(c[i].t > c[i - 1].t);
    }
  }
  CHECK(traj.t_end() == c.back().t);
}

TEST_CASE("time reversal symmetry") {
  // The flow commutes with (x, r, theta, t) -> (-x, r, -theta, -t): following the
  // reflected end point for the same arclength returns to the reflected start.
  SolverConfig cfg;
  const Dimension n(3);
  for (double theta0 : {0.0, 0.3}) {
    const GeodesicState start{0.0, 3.0, theta0};
    const Trajectory fwd = integrate(start, n, cfg, 1);
    const auto end = fwd.final_state();
    SolverConfig back_cfg = cfg;
    back_cfg.t_max = fwd.t_end();
    const Trajectory back = integrate({-end.x, end.r, -end.theta}, n, back_cfg);
    const auto s = back.final_state();
    CHECK(back.termination() == Termination::TimeBudget);
    CHECK(std::abs(s.x - (-start.x)) < 1e-8);
    CHECK(std::abs(s.r - start.r) < 1e-8);
    CHECK(std::abs(s.theta - (-start.theta)) < 1e-8);
  }
}

TEST_CASE("termination reasons") {
  SolverConfig cfg;
  SUBCASE("escape") {
    cfg.escape_radius = 5.0;
    const auto t = integrate({0.0, cylinder_radius(Dimension(2)), 0.0}, Dimension(2), cfg);
    CHECK(t.termination() == Termination::Escape);
  }
  SUBCASE("time budget") {
    cfg.t_max = 1.0;
    const auto t = integrate({0.0, 3.0, 0.0}, Dimension(2), cfg);
    CHECK(t.termination() == Termination::TimeBudget);
    CHECK(t.t_end() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("start on the axis is rejected") {
    CHECK_THROWS_AS(integrate({0.0, 0.0, 0.0}, Dimension(2), cfg), DomainError);
  }
  CHECK(to_string(Termination::RFloor) == "RFloor");
  CHECK(to_string(Termination::EventLimit) == "EventLimit");
}

TEST_CASE("variational equations match finite differences of the flow") {
  SolverConfig cfg;
  const Dimension n(2);
  const GeodesicState s0{0.0, 3.0, 0.1};
  cfg.t_max = 2.5;
  const auto vt = integrate_with_variations(s0, n, cfg);
  const Eigen::Matrix3d& M = vt.final_matrix;
  const double h = 1e-6;
  auto end = [&](GeodesicState s) {
    const auto f = integrate(s, n, cfg).final_state();
    return Eigen::Vector3d(f.x, f.r, f.theta);
  };
  Eigen::Matrix3d fd;
  fd.col(0) = (end({s0.x + h, s0.r, s0.theta}) - end({s0.x - h, s0.r, s0.theta})) / (2 * h);
  fd.col(1) = (end({s0.x, s0.r + h, s0.theta}) - end({s0.x, s0.r - h, s0.theta})) / (2 * h);
  fd.col(2) = (end({s0.x, s0.r, s0.theta + h}) - end({s0.x, s0.r, s0.theta - h})) / (2 * h);
  CHECK((fd - M).cwiseAbs().maxCoeff() < 1e-6);

  const auto plain = integrate(s0, n, cfg).final_state();
  CHECK(std::abs(plain.r - vt.trajectory.final_state().r) < 1e-9);
}
