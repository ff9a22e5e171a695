#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "shrinkerlab/analysis.hpp"
#include "shrinkerlab/errors.hpp"

using namespace shrinkerlab;

namespace {

const ShrinkerProfile& donut_profile(int dim, double spacing = kDefaultProfileSpacing) {
  static std::map<std::pair<int, double>, ShrinkerProfile> cache;
  auto key = std::make_pair(dim, spacing);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const SolverConfig cfg;
  const Dimension n(dim);
  const auto sc = scan(default_scan_window(n), kDefaultScanStep, n, cfg, 4);
  for (const auto& b : sc.brackets) {
    try {
      const auto rec = find_fixed_point_symmetric(b, n, cfg);
      if (rec.inner_radius < cylinder_radius(n))
        return cache[key] = assemble_symmetric_profile(rec, cfg, spacing);
    } catch (const NoBracket&) {
    }
  }
  throw std::runtime_error("no donut");
}

}  // namespace

TEST_CASE("profile validation") {
  ShrinkerProfile p;
  CHECK_THROWS_AS(validate_profile(p), ProfileError);
  p.samples = {{0.0, 0.0, 1.0, 0.0}, {0.1, 0.1, 1.0, 0.0}};
  CHECK_NOTHROW(validate_profile(p));
  CHECK_THROWS_AS(validate_profile(p, {0.05, 1e-6}), ProfileError);
  p.samples[1].t = 0.0;
  CHECK_THROWS_AS(validate_profile(p), ProfileError);
  p.samples[1] = {0.1, 0.1, -1.0, 0.0};
  CHECK_THROWS_AS(validate_profile(p), ProfileError);
  p.samples[1] = {0.1, 0.1, 1.0, 0.0};
  p.closed = true;
  CHECK_THROWS_AS(validate_profile(p), ProfileError);
  CHECK_NOTHROW(validate_profile(donut_profile(2), {0.05, 1e-6}));
}

TEST_CASE("assembled donut is a mirror-symmetric closed loop") {
  const auto& p = donut_profile(2);
  CHECK(p.closed);
  const auto& s = p.samples;
  const std::size_t N = s.size() - 1;
  REQUIRE(N % 2 == 0);
  for (std::size_t k = 0; k <= N; ++k) {
    CHECK(s[k].x == doctest::Approx(-s[N - k].x).epsilon(1e-9).scale(1));
    CHECK(s[k].r == doctest::Approx(s[N - k].r).epsilon(1e-12));
  }
  CHECK(s.back().theta - s.front().theta == doctest::Approx(-2 * std::numbers::pi).epsilon(1e-9));
  for (std::size_t k = 1; k <= N; ++k) CHECK(s[k].t - s[k - 1].t <= kDefaultProfileSpacing * (1 + 1e-9));
}

TEST_CASE("round sphere: Gaussian length 8/e and entropy 4/e for n = 2") {
  const auto sphere = sphere_profile(Dimension(2), 400);
  CHECK(gaussian_length(sphere) == doctest::Approx(8.0 / std::numbers::e).epsilon(1e-10));
  CHECK(entropy(sphere) == doctest::Approx(4.0 / std::numbers::e).epsilon(1e-10));
  CHECK(f_functional(sphere, 0.0, 1.0) == doctest::Approx(4.0 / std::numbers::e).epsilon(1e-10));
}

TEST_CASE("round sphere entropy in higher dimensions") {
  // Vol(S^n) rho^n e^{-n/2} (4 pi)^{-n/2} with rho^2 = 2n.
  for (int n : {3, 5}) {
    const Dimension d(n);
    const double area = (n + 1) * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0 + 1) *
                        std::pow(2.0 * n, n / 2.0);
    const double expected = area * std::exp(-n / 2.0) * std::pow(4 * std::numbers::pi, -n / 2.0);
    CHECK(entropy(sphere_profile(d, 600)) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("entropy does not depend on the parametrization of the semicircle") {
  const Dimension n(2);
  const double rho = sphere_radius(n);
  const double trim = 1e-7;
  const double phi0 = trim / rho;
  const double span = std::numbers::pi - 2 * phi0;
  ShrinkerProfile p;
  p.n = n;
  const int M = 500;
  for (int k = 0; k <= M; ++k) {
    const double u = static_cast<double>(k) / M;
    const double phi = phi0 + span * (u - 0.05 * std::sin(2 * std::numbers::pi * u));
    p.samples.push_back({rho * (phi - phi0), -rho * std::cos(phi), rho * std::sin(phi), 0.5 * std::numbers::pi - phi});
  }
  CHECK(entropy(p) == doctest::Approx(entropy(sphere_profile(n, 300))).epsilon(1e-9));
}

TEST_CASE("Gaussian length edge cases") {
  ShrinkerProfile single;
  single.samples = {{0.0, 0.0, 1.0, 0.0}};
  CHECK(gaussian_length(single) == 0.0);
  const auto cyl = cylinder_profile(Dimension(2), -1.0, 1.0, 100);
  CHECK_THROWS_AS(entropy(cyl), ProfileError);
  CHECK_THROWS_AS(f_functional(cyl, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(f_functional(cyl, 0.0, -1.0), DomainError);
}

TEST_CASE("curvature conventions on the exact fixtures") {
  SUBCASE("cylinder: H = -1/sqrt 2 = <X, nu>/2") {
    const auto cyl = cylinder_profile(Dimension(2), -2.0, 2.0, 100);
    const auto f = profile_curvature(cyl);
    for (std::size_t i = 0; i < f.kappa.size(); ++i) {
      if (!f.valid[i]) continue;
      CHECK(std::abs(f.kappa[i]) < 1e-10);
      CHECK(f.mean_curvature[i] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-10));
    }
    CHECK(curvature_diagnostics(cyl).shrinker_residual < 1e-10);
  }
  SUBCASE("sphere top: kappa = -1/2, H = -1 for n = 2") {
    const auto s = sphere_profile(Dimension(2), 400);
    const auto f = profile_curvature(s);
    const std::size_t top = 200;
    CHECK(s.samples[top].x == doctest::Approx(0.0).scale(1));
    CHECK(f.kappa[top] == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(f.mean_curvature[top] == doctest::Approx(-1.0).epsilon(1e-9));
    const auto rep = curvature_diagnostics(s);
    CHECK(rep.shrinker_residual < 1e-8);
    CHECK(rep.convex);
    CHECK(std::abs(rep.max_H - 0.5 * rep.farthest_point_norm) < 1e-8);
  }
  SUBCASE("grim reaper: kappa = <e/2, nu> with e = -e_r") {
    // r = 1 - 2 log cos(x/2) by Euclidean arclength: x = 4 atan(tanh(s/4)), theta = x/2.
    ShrinkerProfile g;
    for (int k = 0; k <= 300; ++k) {
      const double s = -6.0 + 0.04 * k;
      const double x = 4 * std::atan(std::tanh(s / 4));
      g.samples.push_back({s + 6.0, x, 1.0 - 2 * std::log(std::cos(x / 2)), x / 2});
    }
    const auto f = profile_curvature(g);
    for (std::size_t i = 0; i < f.kappa.size(); ++i) {
      if (!f.valid[i]) continue;
      CHECK(std::abs(f.kappa[i] - 0.5 * f.cos_theta[i]) < 1e-8);
      CHECK(f.speed[i] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("Angenent donut, n = 2") {
  const auto& p = donut_profile(2);
  SUBCASE("entropy and bounds") {
    const double lambda = entropy(p);
    CHECK(lambda == doctest::Approx(1.85122).epsilon(1e-5));
    CHECK(lambda < 2.0);
    CHECK(gaussian_length(p) < gaussian_length_bound(Dimension(2)));
    CHECK(std::abs(f_functional(p, 0.0, 1.0) - lambda) < 1e-10 * lambda);
  }
  SUBCASE("identities") {
    const auto rep = curvature_diagnostics(p);
    CHECK(rep.shrinker_residual < 1e-6);
    CHECK(std::abs(rep.max_H - 0.5 * rep.farthest_point_norm) < 1e-6);
    CHECK(rep.convex);
    const auto jac = jacobi_identity_check(p);
    CHECK(jac.residual_H < 1e-4);
    CHECK(jac.residual_nu < 1e-4);
  }
  SUBCASE("audit") {
    const auto d = audit(p);
    CHECK(d.closed);
    CHECK(d.crossing_count == 2);
    CHECK(d.convex);
    REQUIRE(d.entropy.has_value());
    CHECK(*d.entropy > 1.0);
    CHECK(d.entropy_below_two);
    CHECK(d.length_below_bound);
    CHECK(*d.entropy_margin == doctest::Approx(2.0 - *d.entropy));
    CHECK(d.min_r < cylinder_radius(Dimension(2)));
    CHECK(d.max_r == doctest::Approx(p.source.R_star).epsilon(1e-9));
    CHECK(d.diameter == doctest::Approx(2 * d.max_r).epsilon(1e-6));
  }
  SUBCASE("zero function is in the kernel") {
    const std::vector<double> zero(p.samples.size() - 1, 0.0);
    for (double v : apply_jacobi_operator(p, zero)) CHECK(v == 0.0);
    CHECK_THROWS_AS(apply_jacobi_operator(p, std::vector<double>(3, 0.0)), ProfileError);
  }
}

TEST_CASE("quadrature converges under doubling the sample density") {
  for (int n : {2, 4}) {
    const auto& coarse = donut_profile(n, 0.04);
    const auto& fine = donut_profile(n, 0.02);
    const double a = gaussian_length(coarse), b = gaussian_length(fine);
    CHECK(std::abs(a - b) < 1e-8 * b);
    CHECK(std::abs(entropy(coarse) - entropy(fine)) < 1e-8 * entropy(fine));
  }
}

TEST_CASE("the shrinker check detects a non-geodesic curve") {
  ShrinkerProfile p = donut_profile(2);
  const double L = p.length();
  for (auto& s : p.samples) s.r += 0.01 * std::sin(6 * std::numbers::pi * s.t / L);
  const auto rep = curvature_diagnostics(p);
  CHECK(rep.shrinker_residual > 1e-2);
  CHECK(jacobi_identity_check(p).residual_H > 1e-2);
}

TEST_CASE("sphere profile as an open curve") {
  const auto s = sphere_profile(Dimension(2), 400);
  const auto d = audit(s);
  CHECK_FALSE(d.closed);
  CHECK(d.crossing_count == 1);
  CHECK(d.jacobi_residual_H < 1e-4);
  CHECK(d.entropy.has_value());
}

TEST_CASE("donuts in higher dimensions") {
  for (int n : {3, 6}) {
    CAPTURE(n);
    const auto d = audit(donut_profile(n));
    CHECK(d.crossing_count == 2);
    CHECK(d.convex);
    CHECK(d.entropy_below_two);
    CHECK(d.length_below_bound);
    CHECK(d.shrinker_residual < 1e-6);
  }
}

TEST_CASE("F-functional grid") {
  const auto& p = donut_profile(2);
  const std::vector<double> a = {-1.0, -0.5, 0.0, 0.5, 1.0};
  const std::vector<double> tau = {0.5, 0.75, 1.0, 1.25, 1.5};
  const auto g1 = f_functional_grid(p, a, tau, 1);
  const auto g3 = f_functional_grid(p, a, tau, 3);
  CHECK(g1.values == g3.values);
  CHECK(g1.a[g1.best_a] == 0.0);
  CHECK(g1.tau[g1.best_tau] == 1.0);
  CHECK(g1.best_value == doctest::Approx(entropy(p)).epsilon(1e-12));
}
