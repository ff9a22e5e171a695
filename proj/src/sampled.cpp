#include "shrinkerlab/sampled.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "shrinkerlab/errors.hpp"

namespace shrinkerlab {

std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> nodes, int max_order) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

struct Stencil {
  std::vector<double> nodes;
  std::vector<std::size_t> index;
};

// Stencil of `width` nodes centred on position `center` (may be fractional for
// interval-based windows). Open grids shift the window to stay in range.
Stencil make_stencil(const SampleGrid& g, long first) {
  const long n = static_cast<long>(g.t.size());
  const long w = std::min<long>(g.stencil, n);
  Stencil s;
  s.nodes.reserve(w);
  s.index.reserve(w);
  if (!g.periodic) first = std::clamp<long>(first, 0, n - w);
  for (long j = first; j < first + w; ++j) {
    if (g.periodic) {
      long q = j % n;
      long wraps = j / n;
      if (q < 0) {
        q += n;
        wraps -= 1;
      }
      s.index.push_back(static_cast<std::size_t>(q));
      s.nodes.push_back(g.t[q] + static_cast<double>(wraps) * g.period);
    } else {
      s.index.push_back(static_cast<std::size_t>(j));
      s.nodes.push_back(g.t[j]);
    }
  }
  return s;
}

void check_grid(const SampleGrid& g, std::span<const double> f) {
  if (g.t.size() != f.size()) throw ProfileError("sample grid and values differ in length");
  if (g.stencil < 2) throw ProfileError("stencil needs at least two nodes");
  if (static_cast<int>(g.t.size()) < g.stencil) throw ProfileError("too few samples for the differentiation stencil");
  if (g.periodic && !(g.period > 0.0)) throw ProfileError("periodic grid needs a positive period");
}

double evaluate(const Stencil& s, std::span<const double> f, double z) {
  const auto w = fornberg_weights(z, s.nodes, 0);
  double v = 0.0;
  for (std::size_t j = 0; j < s.index.size(); ++j) v += w[0][j] * f[s.index[j]];
  return v;
}

}  // namespace

std::vector<std::vector<double>> derivatives(const SampleGrid& grid, std::span<const double> f, int max_order) {
  check_grid(grid, f);
  const std::size_t n = f.size();
  const long half = grid.stencil / 2;
  std::vector<std::vector<double>> out(max_order, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = make_stencil(grid, static_cast<long>(i) - half);
    const auto w = fornberg_weights(grid.t[i], s.nodes, max_order);
    for (int k = 1; k <= max_order; ++k) {
      double v = 0.0;
      for (std::size_t j = 0; j < s.index.size(); ++j) v += w[k][j] * f[s.index[j]];
      out[k - 1][i] = v;
    }
  }
  return out;
}

double integrate_samples(const SampleGrid& grid, std::span<const double> f) {
  if (f.size() < 2) return 0.0;
  check_grid(grid, f);
  // 5-point Gauss-Legendre on each interval, applied to the local interpolant.
  static constexpr std::array<double, 5> gx = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                               0.9061798459386640};
  static constexpr std::array<double, 5> gw = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                               0.4786286704993665, 0.2369268850561891};
  const std::size_t n = f.size();
  const std::size_t intervals = grid.periodic ? n : n - 1;
  const long half = grid.stencil / 2;
  double total = 0.0;
  for (std::size_t i = 0; i < intervals; ++i) {
    const double a = grid.t[i];
    const double b = (i + 1 < n) ? grid.t[i + 1] : grid.t[0] + grid.period;
    const auto s = make_stencil(grid, static_cast<long>(i) - half + 1);
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    double part = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) part += gw[q] * evaluate(s, f, mid + rad * gx[q]);
    total += rad * part;
  }
  return total;
}

double refine_maximum(const SampleGrid& grid, std::span<const double> f, std::size_t index) {
  check_grid(grid, f);
  const std::size_t n = f.size();
  const auto s = make_stencil(grid, static_cast<long>(index) - grid.stencil / 2);
  const double t0 = grid.t[index];
  double lo = t0, hi = t0;
  if (index > 0) lo = grid.t[index - 1];
  else if (grid.periodic) lo = grid.t[n - 1] - grid.period;
  if (index + 1 < n) hi = grid.t[index + 1];
  else if (grid.periodic) hi = grid.t[0] + grid.period;

  // Golden-section search; the interpolant is unimodal on this short window.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = evaluate(s, f, c), fd = evaluate(s, f, d);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(t0)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = evaluate(s, f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = evaluate(s, f, d);
    }
  }
  return std::max({f[index], fc, fd});
}

}  // namespace shrinkerlab
