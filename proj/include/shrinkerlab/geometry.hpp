#pragma once

// Weighted half-plane geometry of rotationally symmetric hypersurfaces in
// R^{n+1}. A profile curve (x(t), r(t)) parametrized by Euclidean arclength
// with tangent (cos theta, sin theta) generates a self-shrinker exactly when it
// is a geodesic of the length density r^{n-1} exp(-(x^2 + r^2)/4).

#include <cmath>
#include <numbers>

namespace shrinkerlab {

/// Surface dimension n; the ambient space is R^{n+1}.
class Dimension {
 public:
  constexpr Dimension() = default;
  explicit Dimension(int n);

  constexpr int value() const noexcept { return n_; }
  constexpr operator int() const noexcept { return n_; }

 private:
  int n_ = 2;
};

struct GeodesicState {
  double x = 0.0;
  double r = 1.0;
  double theta = 0.0;  // unwrapped, never reduced mod 2 pi
};

struct GeodesicRate {
  double dx = 0.0;
  double dr = 0.0;
  double dtheta = 0.0;
};

/// Partial derivatives of theta' with respect to (x, r, theta).
struct AngleRatePartials {
  double d_x = 0.0;
  double d_r = 0.0;
  double d_theta = 0.0;
};

/// Length density w(x, r) = r^{n-1} exp(-(x^2 + r^2)/4). Throws DomainError for r <= 0.
double weight(double x, double r, Dimension n);

/// Geodesic equations: x' = cos theta, r' = sin theta,
/// theta' = (x/2) sin theta + ((n-1)/r - r/2) cos theta. Throws DomainError for r <= 0.
GeodesicRate rhs(const GeodesicState& s, Dimension n);

/// Same as rhs() without the domain check; r must be positive.
inline GeodesicRate rhs_unchecked(double x, double r, double theta, int n) noexcept {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, 0.5 * x * s + ((n - 1) / r - 0.5 * r) * c};
}

AngleRatePartials angle_rate_partials(const GeodesicState& s, Dimension n);

/// Radius of the cylinder S^{n-1} x R shrinker, sqrt(2(n-1)).
inline double cylinder_radius(Dimension n) { return std::sqrt(2.0 * (n.value() - 1)); }

/// Radius of the round sphere shrinker, sqrt(2n).
inline double sphere_radius(Dimension n) { return std::sqrt(2.0 * n.value()); }

/// Vol(S^{n-1}) = n pi^{n/2} / Gamma(n/2 + 1).
double unit_sphere_volume(Dimension n);

/// Length bound 2^n Gamma(n/2) for the Gaussian length of a donut profile.
double gaussian_length_bound(Dimension n);

/// Wraps an angle difference into (-pi, pi].
double wrap_angle(double a);

}  // namespace shrinkerlab
