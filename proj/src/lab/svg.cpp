#include "shrinkerlab/lab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shrinkerlab/errors.hpp"

namespace shrinkerlab::lab {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 40.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const ShrinkerProfile& profile) {
  if (profile.samples.size() < 2) throw ProfileError("nothing to plot: fewer than two samples");
  for (const auto& s : profile.samples)
    if (!std::isfinite(s.x) || !std::isfinite(s.r)) throw ProfileError("non-finite sample");

  const double rho = sphere_radius(profile.n);
  const double rc = cylinder_radius(profile.n);
  double half_width = rho, top = rho;
  for (const auto& s : profile.samples) {
    half_width = std::max(half_width, std::abs(s.x));
    top = std::max(top, s.r);
  }
  half_width *= 1.05;
  top *= 1.05;
  // Equal scales on both axes; the origin sits at the bottom centre.
  const double scale = std::min((kWidth - 2 * kMargin) / (2 * half_width), (kHeight - 2 * kMargin) / top);
  const double ox = kWidth / 2;
  const double oy = kHeight - kMargin;
  auto px = [&](double x) { return fixed(ox + scale * x); };
  auto py = [&](double r) { return fixed(oy - scale * r); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s += "<line id=\"x-axis\" x1=\"" + px(-half_width) + "\" y1=\"" + py(0) + "\" x2=\"" + px(half_width) + "\" y2=\"" +
       py(0) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line id=\"r-axis\" x1=\"" + px(0) + "\" y1=\"" + py(0) + "\" x2=\"" + px(0) + "\" y2=\"" + py(top) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line id=\"cylinder\" x1=\"" + px(-half_width) + "\" y1=\"" + py(rc) + "\" x2=\"" + px(half_width) +
       "\" y2=\"" + py(rc) + "\" stroke=\"#888\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
  const std::string rad = fixed(scale * rho);
  s += "<path id=\"sphere\" d=\"M " + px(-rho) + " " + py(0) + " A " + rad + " " + rad + " 0 0 1 " + px(rho) + " " +
       py(0) + "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"2 3\" stroke-width=\"1\"/>\n";
  s += "<polyline id=\"profile\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < profile.samples.size(); ++i) {
    if (i) s += ' ';
    s += px(profile.samples[i].x) + "," + py(profile.samples[i].r);
  }
  s += "\"/>\n";
  s += "<text x=\"" + fixed(kMargin) + "\" y=\"" + fixed(kMargin / 2 + 4) + "\" font-family=\"sans-serif\" font-size=\"14\">n = " +
       std::to_string(profile.n.value()) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace shrinkerlab::lab
