#pragma once

#include <cmath>
#include <utility>

#include "shrinkerlab/errors.hpp"

namespace shrinkerlab {

struct RootOptions {
  double x_tol = 1e-14;
  double f_tol = 0.0;
  int max_iterations = 200;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  // Final bracket; f_lo and f_hi have opposite signs unless fx hit zero.
  double lo = 0.0, hi = 0.0;
  double f_lo = 0.0, f_hi = 0.0;
  int iterations = 0;
};

/// Safeguarded bisection + secant on a sign-changing bracket [a, b].
///
/// Each iteration proposes the Illinois-weighted secant point and falls back to
/// bisection when the point leaves the bracket or when the bracket has not
/// halved over the last three iterations. Stops when |f| <= f_tol or the
/// bracket is narrower than x_tol (relative to the magnitude of the ends).
template <class F>
RootResult hybrid_root(F&& f, double a, double b, double fa, double fb, const RootOptions& opt = {}) {
  if (!(fa * fb <= 0.0)) throw NoBracket("hybrid_root: f(a) and f(b) must have opposite signs");
  RootResult res;
  if (fa == 0.0) return {a, fa, a, a, fa, fa, 0};
  if (fb == 0.0) return {b, fb, b, b, fb, fb, 0};
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }

  double wa = fa, wb = fb;  // Illinois-scaled values
  int side = 0;
  double width_before = b - a;
  double best = std::abs(fa) < std::abs(fb) ? a : b;
  double f_best = std::abs(fa) < std::abs(fb) ? fa : fb;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    const double width = b - a;
    const double tol = opt.x_tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    if (width <= tol || std::abs(f_best) <= opt.f_tol) break;

    double s = b - wb * (b - a) / (wb - wa);
    const double guard = 0.5 * tol;
    bool bisect = !(s > a + guard && s < b - guard);
    if (it % 3 == 0) {
      if (b - a > 0.5 * width_before) bisect = true;
      width_before = b - a;
    }
    if (bisect) s = 0.5 * (a + b);

    const double fs = f(s);
    if (std::abs(fs) < std::abs(f_best)) {
      best = s;
      f_best = fs;
    }
    if (fs == 0.0) {
      a = b = s;
      fa = fb = fs;
      break;
    }
    if ((fs < 0.0) == (fa < 0.0)) {
      a = s;
      fa = wa = fs;
      if (side == -1) wb *= 0.5;
      side = -1;
    } else {
      b = s;
      fb = wb = fs;
      if (side == 1) wa *= 0.5;
      side = 1;
    }
  }
  res.x = best;
  res.fx = f_best;
  res.lo = a;
  res.hi = b;
  res.f_lo = fa;
  res.f_hi = fb;
  return res;
}

}  // namespace shrinkerlab
