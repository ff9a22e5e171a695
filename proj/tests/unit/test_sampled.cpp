#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/sampled.hpp"

using namespace shrinkerlab;

TEST_CASE("Fornberg weights reproduce polynomial derivatives") {
  const std::vector<double> nodes = {-0.3, 0.0, 0.2, 0.5, 0.9};
  const auto w = fornberg_weights(0.1, nodes, 2);
  // p(x) = x^4 - 2 x^2 + x: p(0.1), p'(0.1), p''(0.1)
  auto p = [](double x) { return x * x * x * x - 2 * x * x + x; };
  double v[3] = {0, 0, 0};
  for (std::size_t j = 0; j < nodes.size(); ++j)
    for (int k = 0; k < 3; ++k) v[k] += w[k][j] * p(nodes[j]);
  CHECK(v[0] == doctest::Approx(p(0.1)).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(4 * 0.001 - 4 * 0.1 + 1).epsilon(1e-12));
  CHECK(v[2] == doctest::Approx(12 * 0.01 - 4).epsilon(1e-11));
}

TEST_CASE("periodic derivatives of a trigonometric function") {
  const std::size_t N = 200;
  const double L = 2 * std::numbers::pi;
  std::vector<double> t(N), f(N);
  for (std::size_t i = 0; i < N; ++i) {
    t[i] = L * static_cast<double>(i) / N;
    f[i] = std::sin(3 * t[i]);
  }
  const auto d = derivatives({t, true, L, 13}, f, 2);
  for (std::size_t i = 0; i < N; ++i) {
    CHECK(std::abs(d[0][i] - 3 * std::cos(3 * t[i])) < 1e-9);
    CHECK(std::abs(d[1][i] + 9 * std::sin(3 * t[i])) < 1e-7);
  }
}

TEST_CASE("open-grid derivatives near both ends") {
  std::vector<double> t, f;
  for (int i = 0; i <= 60; ++i) {
    t.push_back(0.05 * i + 0.001 * std::sin(i));  // mildly non-uniform
    f.push_back(std::exp(t.back()));
  }
  const auto d = derivatives({t, false, 0.0, 11}, f, 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(d[0][i] - f[i]) < 1e-9 * f[i]);
    CHECK(std::abs(d[1][i] - f[i]) < 1e-7 * f[i]);
  }
}

TEST_CASE("quadrature on sampled data") {
  SUBCASE("open grid, smooth integrand") {
    std::vector<double> t, f;
    for (int i = 0; i <= 40; ++i) {
      t.push_back(std::numbers::pi * i / 40.0);
      f.push_back(std::sin(t.back()));
    }
    CHECK(integrate_samples({t, false, 0.0, 11}, f) == doctest::Approx(2.0).epsilon(1e-13));
  }
  SUBCASE("periodic grid integrates over one full period") {
    const std::size_t N = 64;
    const double L = 2 * std::numbers::pi;
    std::vector<double> t(N), f(N);
    for (std::size_t i = 0; i < N; ++i) {
      t[i] = L * static_cast<double>(i) / N;
      f[i] = 1.0 + std::cos(t[i]) * std::cos(t[i]);
    }
    CHECK(integrate_samples({t, true, L, 11}, f) == doctest::Approx(3 * std::numbers::pi).epsilon(1e-13));
  }
  SUBCASE("too few samples") {
    std::vector<double> t = {0.0}, f = {1.0};
    CHECK_THROWS_AS(derivatives({t, false, 0.0, 11}, f, 1), ProfileError);
  }
}

TEST_CASE("maximum refined between samples") {
  std::vector<double> t, f;
  for (int i = 0; i <= 30; ++i) {
    t.push_back(0.1 * i);
    f.push_back(-(t.back() - 1.234) * (t.back() - 1.234) + 5.0);
  }
  CHECK(refine_maximum({t, false, 0.0, 11}, f, 12) == doctest::Approx(5.0).epsilon(1e-13));
}
