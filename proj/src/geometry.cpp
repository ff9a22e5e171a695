#include "shrinkerlab/geometry.hpp"

#include <string>

#include "shrinkerlab/errors.hpp"

namespace shrinkerlab {

Dimension::Dimension(int n) : n_(n) {
  if (n < 2) throw DomainError("dimension n must be >= 2, got " + std::to_string(n));
}

namespace {

void require_positive_radius(double r) {
  if (!(r > 0.0)) throw DomainError("radial coordinate must be positive, got r = " + std::to_string(r));
}

}  // namespace

double weight(double x, double r, Dimension n) {
  require_positive_radius(r);
  return std::pow(r, n.value() - 1) * std::exp(-(x * x + r * r) / 4.0);
}

GeodesicRate rhs(const GeodesicState& s, Dimension n) {
  require_positive_radius(s.r);
  return rhs_unchecked(s.x, s.r, s.theta, n.value());
}

AngleRatePartials angle_rate_partials(const GeodesicState& s, Dimension n) {
  require_positive_radius(s.r);
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const double k = n.value() - 1;
  return {0.5 * sn, (-k / (s.r * s.r) - 0.5) * c, 0.5 * s.x * c - (k / s.r - 0.5 * s.r) * sn};
}

// std::tgamma is accurate to a few ulp for the half-integer arguments used here.
double unit_sphere_volume(Dimension n) {
  const double h = 0.5 * n.value();
  return n.value() * std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double gaussian_length_bound(Dimension n) {
  return std::ldexp(std::tgamma(0.5 * n.value()), n.value());
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

}  // namespace shrinkerlab
