#pragma once

// Gaussian length, entropy and curvature diagnostics of sampled profile curves.
//
// Sign conventions: unit normal nu = (sin theta, -cos theta), profile curvature
// kappa = d theta / dt, rotational principal curvature -cos(theta) / r with
// multiplicity n - 1, H = kappa + (n - 1)(-cos theta / r). With these, the
// shrinker equation reads H = <X, nu>/2 = (x sin theta - r cos theta)/2.
//
// Curvatures are computed from the sampled (x, r) positions alone; the theta
// channel of the samples is ignored so that the checks stay independent of the
// integrator that produced the curve.

#include <optional>
#include <vector>

#include "shrinkerlab/profile.hpp"

namespace shrinkerlab {

struct AnalysisOptions {
  int stencil = 13;            // nodes per local polynomial
  double axis_trim = 0.05;     // open curves: skip samples with r < axis_trim * max r
  double convexity_threshold = 1e-8;
  double axis_tol = 1e-6;      // open curves ending this close to the axis bound a closed hypersurface
};

/// Per-sample curvature data. `valid[i]` is false where an open curve is too
/// close to its ends or to the axis for stable differentiation.
struct CurvatureField {
  std::vector<double> kappa;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
  std::vector<double> mean_curvature;  // H
  std::vector<double> norm_A2;         // |A|^2
  std::vector<double> speed;           // |(x', r')|, ~1 for arclength samples
  std::vector<bool> valid;
};

CurvatureField profile_curvature(const ShrinkerProfile& profile, const AnalysisOptions& options = {});

/// L_n = integral of r^{n-1} exp(-(x^2 + r^2)/4) along the curve.
double gaussian_length(const ShrinkerProfile& profile, const AnalysisOptions& options = {});

/// (4 pi)^{-n/2} Vol(S^{n-1}) L_n. Requires a profile whose revolution is closed:
/// a closed loop, or an arc with both ends on the axis. Throws ProfileError otherwise.
double entropy(const ShrinkerProfile& profile, const AnalysisOptions& options = {});

/// F-functional centred on the rotation axis at x = a, scale tau > 0.
double f_functional(const ShrinkerProfile& profile, double a, double tau, const AnalysisOptions& options = {});

struct FGrid {
  std::vector<double> a;
  std::vector<double> tau;
  std::vector<std::vector<double>> values;  // values[i][j] = F(a[i], tau[j])
  std::size_t best_a = 0;
  std::size_t best_tau = 0;
  double best_value = 0.0;
};

FGrid f_functional_grid(const ShrinkerProfile& profile, const std::vector<double>& a_values,
                        const std::vector<double>& tau_values, int jobs = 1, const AnalysisOptions& options = {});

struct CurvatureReport {
  double max_H = 0.0;                // max |H|, refined between samples
  double farthest_point_norm = 0.0;  // max sqrt(x^2 + r^2), refined between samples
  double shrinker_residual = 0.0;    // max |H - <X, nu>/2|
  double max_abs_A = 0.0;
  bool convex = false;
};

/// Throws ProfileError if there are too few samples to differentiate.
CurvatureReport curvature_diagnostics(const ShrinkerProfile& profile, const AnalysisOptions& options = {});

struct JacobiResiduals {
  double residual_H = 0.0;   // max |L H - H| / max |H|
  double residual_nu = 0.0;  // max |L phi - phi/2| with phi = sin theta
};

/// Residuals of the eigen-identities of the Jacobi operator, restricted to
/// rotationally symmetric functions:
///   L f = f'' + ((n-1) r'/r - (x x' + r r')/2) f' + (|A|^2 + 1/2) f.
/// Meaningful on shrinkers only.
JacobiResiduals jacobi_identity_check(const ShrinkerProfile& profile, const AnalysisOptions& options = {});

/// Applies the reduced Jacobi operator to f sampled on the profile.
std::vector<double> apply_jacobi_operator(const ShrinkerProfile& profile, const std::vector<double>& f,
                                          const AnalysisOptions& options = {});

/// Sign changes of x along the curve (cyclically for closed profiles).
int count_axis_crossings(const ShrinkerProfile& profile);

struct DiagnosticsReport {
  bool closed = false;
  std::optional<double> entropy;
  double gaussian_length = 0.0;
  double gaussian_length_bound = 0.0;  // 2^n Gamma(n/2)
  double diameter = 0.0;               // extrinsic, of the revolved hypersurface
  double max_H = 0.0;
  double max_abs_A = 0.0;
  double farthest_point_norm = 0.0;
  double farthest_point_gap = 0.0;  // | max|H| - |p|/2 |
  int crossing_count = 0;
  bool convex = false;
  double min_r = 0.0;
  double max_r = 0.0;
  double shrinker_residual = 0.0;
  double jacobi_residual_H = 0.0;
  double jacobi_residual_nu = 0.0;
  bool entropy_below_two = false;
  bool length_below_bound = false;
  std::optional<double> entropy_margin;  // 2 - entropy
  double length_margin = 0.0;            // bound - L_n
};

/// Every diagnostic in one pass. Failed checks are recorded, never thrown.
DiagnosticsReport audit(const ShrinkerProfile& profile, const AnalysisOptions& options = {});

}  // namespace shrinkerlab
