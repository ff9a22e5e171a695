#pragma once

#include <string>

#include "shrinkerlab/profile.hpp"

namespace shrinkerlab::lab {

/// Static plot of a profile curve in the upper half-plane: x- and r-axes, the
/// cylinder line r = sqrt(2(n-1)), the sphere circle x^2 + r^2 = 2n, and the
/// curve as one polyline. viewBox "0 0 800 600", r pointing up.
/// Throws ProfileError for fewer than two samples.
std::string render_svg(const ShrinkerProfile& profile);

}  // namespace shrinkerlab::lab
