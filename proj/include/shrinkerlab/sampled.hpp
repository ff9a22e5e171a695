#pragma once

// Calculus on sampled curves: derivatives and integrals of f(t) given at nodes
// t_0 < t_1 < ... via local interpolating polynomials (Fornberg weights).
// Periodic data wraps stencils around with the given period.

#include <cstddef>
#include <span>
#include <vector>

namespace shrinkerlab {

struct SampleGrid {
  std::span<const double> t;
  bool periodic = false;
  double period = 0.0;  // used when periodic; t spans [t0, t0 + period)
  int stencil = 11;     // nodes per local polynomial
};

/// Weights w[k][j] such that f^{(k)}(z) ~ sum_j w[k][j] f(nodes[j]), k = 0..max_order.
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes, int max_order);

/// Derivatives of order 1..max_order of f at every node. Result[k-1][i].
std::vector<std::vector<double>> derivatives(const SampleGrid& grid, std::span<const double> f, int max_order);

/// Integral of f over the sampled range (a full period if periodic), exact for
/// polynomials of degree < stencil on each local window.
double integrate_samples(const SampleGrid& grid, std::span<const double> f);

/// Local maximum of the interpolant of f near node `index`, searched on the two
/// adjacent intervals. Returns the maximum value.
double refine_maximum(const SampleGrid& grid, std::span<const double> f, std::size_t index);

}  // namespace shrinkerlab
