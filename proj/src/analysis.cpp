#include "shrinkerlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/sampled.hpp"

namespace shrinkerlab {

namespace {

// Profile columns with the duplicated closing sample of a loop dropped.
struct Columns {
  std::vector<double> t, x, r;
  bool periodic = false;
  double period = 0.0;

  SampleGrid grid(int stencil) const { return {t, periodic, period, stencil}; }
  std::size_t size() const { return t.size(); }
};

Columns columns(const ShrinkerProfile& p) {
  Columns c;
  std::size_t n = p.samples.size();
  if (p.closed && n > 1) {
    --n;
    c.periodic = true;
    c.period = p.samples.back().t - p.samples.front().t;
  }
  c.t.reserve(n);
  c.x.reserve(n);
  c.r.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.t.push_back(p.samples[i].t);
    c.x.push_back(p.samples[i].x);
    c.r.push_back(p.samples[i].r);
  }
  return c;
}

double max_valid_abs(const std::vector<double>& v, const std::vector<bool>& valid) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (valid[i]) m = std::max(m, std::abs(v[i]));
  return m;
}

bool closes_revolution(const ShrinkerProfile& p, const AnalysisOptions& o) {
  if (p.closed) return true;
  if (p.samples.size() < 2) return false;
  double scale = 1.0;
  for (const auto& s : p.samples) scale = std::max(scale, s.r);
  return p.samples.front().r <= o.axis_tol * scale && p.samples.back().r <= o.axis_tol * scale;
}

}  // namespace

CurvatureField profile_curvature(const ShrinkerProfile& profile, const AnalysisOptions& options) {
  validate_profile(profile);
  const Columns c = columns(profile);
  if (static_cast<int>(c.size()) < options.stencil)
    throw ProfileError("too few samples for stable differentiation");
  const auto grid = c.grid(options.stencil);
  const auto dx = derivatives(grid, c.x, 2);
  const auto dr = derivatives(grid, c.r, 2);
  const int k = profile.n.value() - 1;

  const std::size_t n = c.size();
  CurvatureField f;
  f.kappa.resize(n);
  f.cos_theta.resize(n);
  f.sin_theta.resize(n);
  f.mean_curvature.resize(n);
  f.norm_A2.resize(n);
  f.speed.resize(n);
  f.valid.assign(n, true);

  double r_max = 0.0;
  for (double r : c.r) r_max = std::max(r_max, r);
  const std::size_t half = static_cast<std::size_t>(options.stencil / 2);

  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = dx[0][i], x2 = dx[1][i];
    const double r1 = dr[0][i], r2 = dr[1][i];
    const double v = std::hypot(x1, r1);
    f.speed[i] = v;
    f.cos_theta[i] = x1 / v;
    f.sin_theta[i] = r1 / v;
    f.kappa[i] = (x1 * r2 - r1 * x2) / (v * v * v);
    const double rot = -f.cos_theta[i] / c.r[i];
    f.mean_curvature[i] = f.kappa[i] + k * rot;
    f.norm_A2[i] = f.kappa[i] * f.kappa[i] + k * rot * rot;
    if (!c.periodic) {
      const bool near_end = i < half || i + half >= n;
      const bool near_axis = c.r[i] < options.axis_trim * r_max;
      f.valid[i] = !near_end && !near_axis;
    }
  }
  return f;
}

double gaussian_length(const ShrinkerProfile& profile, const AnalysisOptions& options) {
  validate_profile(profile);
  const Columns c = columns(profile);
  if (c.size() < 2) return 0.0;
  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) w[i] = weight(c.x[i], c.r[i], profile.n);
  return integrate_samples(c.grid(std::min<int>(options.stencil, static_cast<int>(c.size()))), w);
}

double entropy(const ShrinkerProfile& profile, const AnalysisOptions& options) {
  if (!closes_revolution(profile, options))
    throw ProfileError("entropy needs a closed profile (or an arc with both ends on the axis)");
  const Dimension n = profile.n;
  return std::pow(4.0 * std::numbers::pi, -0.5 * n.value()) * unit_sphere_volume(n) *
         gaussian_length(profile, options);
}

double f_functional(const ShrinkerProfile& profile, double a, double tau, const AnalysisOptions& options) {
  if (!(tau > 0.0)) throw DomainError("F-functional scale tau must be positive");
  validate_profile(profile);
  const Columns c = columns(profile);
  if (c.size() < 2) return 0.0;
  const int k = profile.n.value() - 1;
  std::vector<double> g(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double dx = c.x[i] - a;
    g[i] = std::pow(c.r[i], k) * std::exp(-(dx * dx + c.r[i] * c.r[i]) / (4.0 * tau));
  }
  const double integral = integrate_samples(c.grid(std::min<int>(options.stencil, static_cast<int>(c.size()))), g);
  return std::pow(4.0 * std::numbers::pi * tau, -0.5 * profile.n.value()) * unit_sphere_volume(profile.n) * integral;
}

FGrid f_functional_grid(const ShrinkerProfile& profile, const std::vector<double>& a_values,
                        const std::vector<double>& tau_values, int jobs, const AnalysisOptions& options) {
  FGrid g;
  g.a = a_values;
  g.tau = tau_values;
  g.values.assign(a_values.size(), std::vector<double>(tau_values.size(), 0.0));
  const std::size_t rows = a_values.size();
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < rows; i += stride)
      for (std::size_t j = 0; j < tau_values.size(); ++j)
        g.values[i][j] = f_functional(profile, a_values[i], tau_values[j], options);
  };
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  std::vector<std::future<void>> pending;
  for (std::size_t w = 1; w < workers; ++w) pending.push_back(std::async(std::launch::async, work, w, workers));
  work(0, workers);
  for (auto& p : pending) p.get();

  g.best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < tau_values.size(); ++j)
      if (g.values[i][j] > g.best_value) {
        g.best_value = g.values[i][j];
        g.best_a = i;
        g.best_tau = j;
      }
  return g;
}

CurvatureReport curvature_diagnostics(const ShrinkerProfile& profile, const AnalysisOptions& options) {
  const CurvatureField f = profile_curvature(profile, options);
  const Columns c = columns(profile);
  const auto grid = c.grid(options.stencil);
  const std::size_t n = c.size();

  CurvatureReport rep;
  std::vector<double> absH(n), norm(n);
  std::size_t iH = 0, iP = 0;
  bool have = false;
  int sign = 0;
  bool flips = false;
  for (std::size_t i = 0; i < n; ++i) {
    absH[i] = std::abs(f.mean_curvature[i]);
    norm[i] = std::hypot(c.x[i], c.r[i]);
    if (!f.valid[i]) continue;
    if (!have || absH[i] > absH[iH]) iH = i;
    if (!have || norm[i] > norm[iP]) iP = i;
    have = true;
    const double support = 0.5 * (c.x[i] * f.sin_theta[i] - c.r[i] * f.cos_theta[i]);
    rep.shrinker_residual = std::max(rep.shrinker_residual, std::abs(f.mean_curvature[i] - support));
    rep.max_abs_A = std::max(rep.max_abs_A, std::sqrt(f.norm_A2[i]));
    if (std::abs(f.kappa[i]) > options.convexity_threshold) {
      const int s = f.kappa[i] > 0.0 ? 1 : -1;
      if (sign != 0 && s != sign) flips = true;
      sign = s;
    }
  }
  if (!have) throw ProfileError("no samples far enough from the ends and the axis");
  rep.max_H = f.valid[iH] ? refine_maximum(grid, absH, iH) : absH[iH];
  rep.farthest_point_norm = refine_maximum(grid, norm, iP);
  rep.convex = !flips && sign != 0;
  return rep;
}

std::vector<double> apply_jacobi_operator(const ShrinkerProfile& profile, const std::vector<double>& f,
                                          const AnalysisOptions& options) {
  const CurvatureField cf = profile_curvature(profile, options);
  const Columns c = columns(profile);
  if (f.size() != c.size()) throw ProfileError("function must be sampled on the profile nodes");
  const auto grid = c.grid(options.stencil);
  const auto df = derivatives(grid, f, 2);
  const int k = profile.n.value() - 1;
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double ct = cf.cos_theta[i], st = cf.sin_theta[i];
    // Unit-speed derivatives: f' and f'' with respect to Euclidean arclength.
    const double v = cf.speed[i];
    const double f1 = df[0][i] / v;
    const double f2 = df[1][i] / (v * v);
    const double drift = k * st / c.r[i] - 0.5 * (c.x[i] * ct + c.r[i] * st);
    out[i] = f2 + drift * f1 + (cf.norm_A2[i] + 0.5) * f[i];
  }
  return out;
}

JacobiResiduals jacobi_identity_check(const ShrinkerProfile& profile, const AnalysisOptions& options) {
  const CurvatureField cf = profile_curvature(profile, options);
  const auto LH = apply_jacobi_operator(profile, cf.mean_curvature, options);
  const auto Lphi = apply_jacobi_operator(profile, cf.sin_theta, options);
  JacobiResiduals res;
  double scale = max_valid_abs(cf.mean_curvature, cf.valid);
  if (scale == 0.0) scale = 1.0;
  for (std::size_t i = 0; i < LH.size(); ++i) {
    if (!cf.valid[i]) continue;
    res.residual_H = std::max(res.residual_H, std::abs(LH[i] - cf.mean_curvature[i]) / scale);
    res.residual_nu = std::max(res.residual_nu, std::abs(Lphi[i] - 0.5 * cf.sin_theta[i]));
  }
  return res;
}

int count_axis_crossings(const ShrinkerProfile& profile) {
  const Columns c = columns(profile);
  std::vector<int> signs;
  for (double x : c.x)
    if (std::abs(x) > 1e-9) signs.push_back(x > 0.0 ? 1 : -1);
  if (signs.empty()) return 0;
  int count = 0;
  for (std::size_t i = 1; i < signs.size(); ++i) count += signs[i] != signs[i - 1];
  if (c.periodic) count += signs.back() != signs.front();
  return count;
}

DiagnosticsReport audit(const ShrinkerProfile& profile, const AnalysisOptions& options) {
  validate_profile(profile);
  DiagnosticsReport d;
  d.closed = profile.closed;
  d.gaussian_length = gaussian_length(profile, options);
  d.gaussian_length_bound = gaussian_length_bound(profile.n);
  d.length_margin = d.gaussian_length_bound - d.gaussian_length;
  d.length_below_bound = d.gaussian_length < d.gaussian_length_bound;
  if (closes_revolution(profile, options)) {
    d.entropy = entropy(profile, options);
    d.entropy_margin = 2.0 - *d.entropy;
    d.entropy_below_two = *d.entropy < 2.0;
  }

  const auto& s = profile.samples;
  d.min_r = d.max_r = s.front().r;
  for (const auto& p : s) {
    d.min_r = std::min(d.min_r, p.r);
    d.max_r = std::max(d.max_r, p.r);
  }
  // Farthest pair on the revolved hypersurface: antipodal points of the two orbit spheres.
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i; j < s.size(); ++j)
      d.diameter = std::max(d.diameter, std::hypot(s[i].x - s[j].x, s[i].r + s[j].r));

  d.crossing_count = count_axis_crossings(profile);

  const auto curv = curvature_diagnostics(profile, options);
  d.max_H = curv.max_H;
  d.max_abs_A = curv.max_abs_A;
  d.farthest_point_norm = curv.farthest_point_norm;
  d.farthest_point_gap = std::abs(curv.max_H - 0.5 * curv.farthest_point_norm);
  d.convex = curv.convex;
  d.shrinker_residual = curv.shrinker_residual;

  const auto jac = jacobi_identity_check(profile, options);
  d.jacobi_residual_H = jac.residual_H;
  d.jacobi_residual_nu = jac.residual_nu;
  return d;
}

}  // namespace shrinkerlab
