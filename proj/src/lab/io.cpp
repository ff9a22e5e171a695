#include "shrinkerlab/lab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <system_error>

#include "shrinkerlab/errors.hpp"

namespace shrinkerlab::lab {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProfileError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json nullable(const std::optional<double>& v) { return v ? nullable(*v) : Json(nullptr); }

double number_or_nan(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

Json to_json(const ShrinkerProfile& p) {
  Json samples = Json::array();
  for (const auto& s : p.samples) samples.push_back({{"t", s.t}, {"x", s.x}, {"r", s.r}, {"theta", s.theta}});
  Json j;
  j["n"] = p.n.value();
  j["closed"] = p.closed;
  j["samples"] = std::move(samples);
  j["source"] = {{"R_star", nullable(p.source.R_star)},
                 {"residual", nullable(p.source.residual)},
                 {"config_digest", p.source.config_digest}};
  return j;
}

Json to_json(const DiagnosticsReport& d) {
  Json j;
  j["closed"] = d.closed;
  j["entropy"] = nullable(d.entropy);
  j["gaussian_length"] = d.gaussian_length;
  j["gaussian_length_bound"] = d.gaussian_length_bound;
  j["diameter"] = d.diameter;
  j["max_H"] = d.max_H;
  j["max_abs_A"] = d.max_abs_A;
  j["farthest_point_norm"] = d.farthest_point_norm;
  j["farthest_point_gap"] = d.farthest_point_gap;
  j["crossing_count"] = d.crossing_count;
  j["convex"] = d.convex;
  j["min_r"] = d.min_r;
  j["max_r"] = d.max_r;
  j["shrinker_residual"] = d.shrinker_residual;
  j["jacobi_residual_H"] = d.jacobi_residual_H;
  j["jacobi_residual_nu"] = d.jacobi_residual_nu;
  j["entropy_below_two"] = d.entropy_below_two;
  j["length_below_bound"] = d.length_below_bound;
  j["entropy_margin"] = nullable(d.entropy_margin);
  j["length_margin"] = d.length_margin;
  return j;
}

Json to_json(const FixedPointRecord& r) {
  const auto& J = r.jacobian;
  Json j;
  j["n"] = r.n.value();
  j["R_star"] = r.R_star;
  j["theta_star"] = r.theta_star;
  j["residual"] = r.residual;
  j["shooting_residual"] = r.shooting_residual;
  j["jacobian"] = {{J(0, 0), J(0, 1)}, {J(1, 0), J(1, 1)}};
  j["classification"] = std::string(to_string(r.classification));
  j["half_loop_length"] = r.half_loop_length;
  j["inner_radius"] = r.inner_radius;
  return j;
}

ShrinkerProfile profile_from_json(const Json& j) {
  try {
    ShrinkerProfile p;
    p.n = Dimension(j.at("n").get<int>());
    p.closed = j.at("closed").get<bool>();
    for (const auto& s : j.at("samples"))
      p.samples.push_back({s.at("t").get<double>(), s.at("x").get<double>(), s.at("r").get<double>(),
                           s.at("theta").get<double>()});
    if (j.contains("source")) {
      const auto& src = j.at("source");
      p.source.R_star = number_or_nan(src.at("R_star"));
      p.source.residual = number_or_nan(src.at("residual"));
      p.source.config_digest = src.at("config_digest").get<std::string>();
    }
    return p;
  } catch (const Json::exception& e) {
    throw ProfileError(std::string("malformed profile: ") + e.what());
  } catch (const DomainError& e) {
    throw ProfileError(std::string("malformed profile: ") + e.what());
  }
}

ShrinkerProfile load_profile(const fs::path& path) {
  const std::string text = read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ProfileError(path.string() + " is not valid JSON: " + e.what());
  }
  return profile_from_json(j);
}

DiagnosticsReport diagnostics_from_json(const Json& j) {
  try {
    DiagnosticsReport d;
    d.closed = j.at("closed").get<bool>();
    if (!j.at("entropy").is_null()) d.entropy = j.at("entropy").get<double>();
    d.gaussian_length = j.at("gaussian_length").get<double>();
    d.gaussian_length_bound = j.at("gaussian_length_bound").get<double>();
    d.diameter = j.at("diameter").get<double>();
    d.max_H = j.at("max_H").get<double>();
    d.max_abs_A = j.at("max_abs_A").get<double>();
    d.farthest_point_norm = j.at("farthest_point_norm").get<double>();
    d.farthest_point_gap = j.at("farthest_point_gap").get<double>();
    d.crossing_count = j.at("crossing_count").get<int>();
    d.convex = j.at("convex").get<bool>();
    d.min_r = j.at("min_r").get<double>();
    d.max_r = j.at("max_r").get<double>();
    d.shrinker_residual = j.at("shrinker_residual").get<double>();
    d.jacobi_residual_H = j.at("jacobi_residual_H").get<double>();
    d.jacobi_residual_nu = j.at("jacobi_residual_nu").get<double>();
    d.entropy_below_two = j.at("entropy_below_two").get<bool>();
    d.length_below_bound = j.at("length_below_bound").get<bool>();
    if (!j.at("entropy_margin").is_null()) d.entropy_margin = j.at("entropy_margin").get<double>();
    d.length_margin = j.at("length_margin").get<double>();
    return d;
  } catch (const Json::exception& e) {
    throw ProfileError(std::string("malformed diagnostics: ") + e.what());
  }
}

FixedPointRecord fixed_point_from_json(const Json& j) {
  try {
    FixedPointRecord r;
    r.n = Dimension(j.at("n").get<int>());
    r.R_star = j.at("R_star").get<double>();
    r.theta_star = j.at("theta_star").get<double>();
    r.residual = j.at("residual").get<double>();
    r.shooting_residual = j.at("shooting_residual").get<double>();
    const auto& J = j.at("jacobian");
    r.jacobian << J.at(0).at(0).get<double>(), J.at(0).at(1).get<double>(), J.at(1).at(0).get<double>(),
        J.at(1).at(1).get<double>();
    const auto cls = j.at("classification").get<std::string>();
    if (cls == "Isolated") r.classification = Classification::Isolated;
    else if (cls == "CurveCandidate") r.classification = Classification::CurveCandidate;
    else if (cls == "Degenerate") r.classification = Classification::Degenerate;
    else throw ProfileError("unknown classification " + cls);
    r.half_loop_length = j.at("half_loop_length").get<double>();
    r.inner_radius = j.at("inner_radius").get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw ProfileError(std::string("malformed fixed point record: ") + e.what());
  } catch (const DomainError& e) {
    throw ProfileError(std::string("malformed fixed point record: ") + e.what());
  }
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& points) {
  std::string out = "t,x,r,theta\n";
  for (const auto& p : points) {
    out += format_number(p.t) + "," + format_number(p.state.x) + "," + format_number(p.state.r) + "," +
           format_number(p.state.theta) + "\n";
  }
  return out;
}

ShrinkerProfile profile_from_csv(const std::string& text, Dimension n) {
  ShrinkerProfile p;
  p.n = n;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x,r,theta", 0) != 0)
    throw ProfileError("trajectory CSV must start with the header t,x,r,theta");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[4];
    const char* cur = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 4; ++k) {
      const auto [ptr, ec] = std::from_chars(cur, end, v[k]);
      const char expected = k < 3 ? ',' : '\0';
      if (ec != std::errc() || (expected ? (ptr == end || *ptr != expected) : ptr != end))
        throw ProfileError("malformed CSV row " + std::to_string(row));
      cur = ptr + 1;
    }
    p.samples.push_back({v[0], v[1], v[2], v[3]});
  }
  return p;
}

Json crossings_json(const Trajectory& trajectory, Dimension n, const GeodesicState& start) {
  Json rows = Json::array();
  for (const auto& c : trajectory.crossings()) {
    rows.push_back({{"index", c.index},
                    {"t", c.t},
                    {"x", c.state.x},
                    {"r", c.state.r},
                    {"theta", c.state.theta},
                    {"direction", c.direction()}});
  }
  Json j;
  j["n"] = n.value();
  j["start"] = {{"x", start.x}, {"r", start.r}, {"theta", start.theta}};
  j["termination"] = std::string(to_string(trajectory.termination()));
  j["t_end"] = trajectory.t_end();
  j["crossings"] = std::move(rows);
  return j;
}

}  // namespace shrinkerlab::lab
