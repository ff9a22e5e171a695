#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/lab/commands.hpp"
#include "shrinkerlab/lab/io.hpp"
#include "shrinkerlab/lab/run_config.hpp"
#include "shrinkerlab/lab/svg.hpp"

using namespace shrinkerlab;
using namespace shrinkerlab::lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("shrinkerlab-unit-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t c = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++c;
  return c;
}

}  // namespace

TEST_CASE("number formatting is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 3.3147082665545553, -2.5e-300, 1e21, 4.0}) {
    const std::string s = format_number(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(4.0) == "4");
}

TEST_CASE("config digest") {
  RunConfig a;
  RunConfig b;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  b.output_dir = "elsewhere";
  CHECK(config_digest(a) == config_digest(b));
  b.solver.rel_tol = 1e-11;
  CHECK(config_digest(a) != config_digest(b));
  RunConfig c;
  c.n = Dimension(3);
  CHECK(config_digest(a) != config_digest(c));
  RunConfig d;
  d.scan_window = default_scan_window(d.n);
  CHECK(config_digest(a) == config_digest(d));  // same effective window
  CHECK(canonical_text(a).find(kCodeVersion) != std::string::npos);
}

TEST_CASE("run config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.scan_window = Bracket{1.40, 1.48};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.scan_window = Bracket{1.46, 1.48};
  CHECK_NOTHROW(c.validate());
  c.scan_window = Bracket{0.5, 1.41};
  CHECK_THROWS_AS(c.validate(), ConfigError);  // within one step below
  c.scan_window = Bracket{0.5, 1.35};
  CHECK_NOTHROW(c.validate());
  c.scan_step = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  RunConfig s;
  s.profile_spacing = 0.1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("config files and flag overrides") {
  const auto dir = scratch("config");
  const auto file = dir / "run.toml";
  std::ofstream(file) << "# comment\nn = 3\nrel_tol = 1e-11\nwindow = [3.0, 4.5]\nseeds = [3.7, 0.0]\n"
                         "[solver]\nmax_step = 0.04\n";
  auto settings = read_settings(file);
  RunConfig c;
  apply_settings(c, settings);
  CHECK(c.n.value() == 3);
  CHECK(c.solver.rel_tol == 1e-11);
  CHECK(c.solver.max_step == 0.04);
  REQUIRE(c.scan_window.has_value());
  CHECK(c.scan_window->lo == 3.0);
  CHECK(c.seed_list.size() == 1);

  settings["n"] = {"4"};  // a flag wins over the file
  RunConfig d;
  apply_settings(d, settings);
  CHECK(d.n.value() == 4);

  RunConfig e;
  CHECK_THROWS_AS(apply_settings(e, {{"bogus", {"1"}}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(e, {{"rel_tol", {"abc"}}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(e, {{"n", {"1"}}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(e, {{"n", {"2.5"}}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(e, {{"window", {"1"}}}), ConfigError);
  CHECK_THROWS_AS(read_settings(dir / "missing.toml"), ConfigError);
}

TEST_CASE("profile JSON round trip") {
  ShrinkerProfile p = sphere_profile(Dimension(3), 20);
  p.source.config_digest = "0123456789abcdef";
  p.source.R_star = 2.5;
  const std::string text = dump(to_json(p));
  const ShrinkerProfile q = profile_from_json(Json::parse(text));
  CHECK(q.n.value() == 3);
  CHECK(q.closed == p.closed);
  REQUIRE(q.samples.size() == p.samples.size());
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    CHECK(q.samples[i].t == p.samples[i].t);
    CHECK(q.samples[i].x == p.samples[i].x);
    CHECK(q.samples[i].r == p.samples[i].r);
    CHECK(q.samples[i].theta == p.samples[i].theta);
  }
  CHECK(std::isnan(q.source.residual));
  CHECK(q.source.R_star == 2.5);
  CHECK(dump(to_json(q)) == text);

  CHECK_THROWS_AS(profile_from_json(Json::parse("{\"n\": 2}")), ProfileError);
  CHECK_THROWS_AS(profile_from_json(Json::parse("{\"n\": 1, \"closed\": false, \"samples\": []}")), ProfileError);
  CHECK_THROWS_AS(profile_from_json(Json::parse("{\"n\": 2, \"closed\": 3, \"samples\": []}")), ProfileError);
}

TEST_CASE("trajectory CSV round trip") {
  std::vector<TrajectoryPoint> pts = {{0.0, {0.0, 2.0, 0.0}}, {0.5, {0.49, 1.94, -0.25}}};
  const std::string csv = trajectory_csv(pts);
  CHECK(csv.rfind("t,x,r,theta\n", 0) == 0);
  const auto p = profile_from_csv(csv, Dimension(2));
  REQUIRE(p.samples.size() == 2);
  CHECK(p.samples[1].theta == -0.25);
  CHECK_THROWS_AS(profile_from_csv("a,b\n1,2\n", Dimension(2)), ProfileError);
  CHECK_THROWS_AS(profile_from_csv("t,x,r,theta\n1,2,3\n", Dimension(2)), ProfileError);
  CHECK_THROWS_AS(profile_from_csv("t,x,r,theta\n1,2,3,x\n", Dimension(2)), ProfileError);
}

TEST_CASE("SVG output") {
  const auto s = sphere_profile(Dimension(2), 50);
  const std::string svg = render_svg(s);
  CHECK(svg.find("viewBox=\"0 0 800 600\"") != std::string::npos);
  CHECK(count(svg, "<polyline") == 1);
  CHECK(svg.find("id=\"cylinder\"") != std::string::npos);
  CHECK(svg.find("id=\"sphere\"") != std::string::npos);
  CHECK(render_svg(s) == svg);
  ShrinkerProfile empty;
  CHECK_THROWS_AS(render_svg(empty), ProfileError);
}

TEST_CASE("atomic writes replace whole files") {
  const auto dir = scratch("atomic");
  write_atomic(dir / "sub" / "a.txt", "first");
  write_atomic(dir / "sub" / "a.txt", "second");
  CHECK(read_text(dir / "sub" / "a.txt") == "second");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "sub")) files += e.is_regular_file();
  CHECK(files == 1);
}

TEST_CASE("solve caches by digest and reproduces outputs byte for byte") {
  const auto dir = scratch("solve");
  ::setenv("SHRINKERLAB_CACHE", (dir / "cache").c_str(), 1);
  CHECK(cache_root() == dir / "cache");
  RunConfig c;
  c.scan_window = Bracket{3.2, 3.4};
  const auto first = solve(c, 1);
  CHECK_FALSE(first.from_cache);
  CHECK(fs::exists(dir / "cache" / first.config_digest / "record.json"));
  const auto second = solve(c, 1);
  CHECK(second.from_cache);
  CHECK(second.profile_text == first.profile_text);
  CHECK(second.diagnostics_text == first.diagnostics_text);
  CHECK(second.fixed_point_text == first.fixed_point_text);
  CHECK(second.created_at == first.created_at);
  CHECK(second.fixed_point.R_star == first.fixed_point.R_star);
  CHECK(second.fixed_point.classification == first.fixed_point.classification);

  ::setenv("SHRINKERLAB_CACHE", (dir / "cache2").c_str(), 1);
  const auto fresh = solve(c, 2);
  CHECK_FALSE(fresh.from_cache);
  CHECK(fresh.profile_text == first.profile_text);
  CHECK(fresh.diagnostics_text == first.diagnostics_text);

  RunConfig none;
  none.scan_window = Bracket{1.46, 1.48};
  CHECK_THROWS_AS(solve(none, 1), NoFixedPoint);
}

TEST_CASE("command exit codes") {
  const auto dir = scratch("commands");
  ::setenv("SHRINKERLAB_CACHE", (dir / "cache").c_str(), 1);
  std::ostringstream out, err;

  RunConfig c;
  c.output_dir = dir / "find";
  CHECK(cmd_find(c, 2, out, err) == kExitOk);
  CHECK(fs::exists(dir / "find" / "profile.json"));
  CHECK(fs::exists(dir / "find" / "diagnostics.json"));

  RunConfig bad = c;
  bad.scan_window = Bracket{1.46, 1.48};
  CHECK(cmd_find(bad, 1, out, err) == kExitNoFixedPoint);
  bad.scan_window = Bracket{1.40, 1.48};
  CHECK(cmd_find(bad, 1, out, err) == kExitInvalidInput);

  ShootRequest shoot;
  shoot.config.output_dir = dir / "shoot";
  shoot.radius = 2.0;
  CHECK(cmd_shoot(shoot, out, err) == kExitOk);
  shoot.crossings = 1;
  CHECK(cmd_shoot(shoot, out, err) == kExitIntegrationFailure);
  shoot.radius = 0.0;
  CHECK(cmd_shoot(shoot, out, err) == kExitInvalidInput);

  CHECK(cmd_audit(dir / "find" / "profile.json", dir / "audit", out, err) == kExitOk);
  CHECK(read_text(dir / "audit" / "diagnostics.json") == read_text(dir / "find" / "diagnostics.json"));
  CHECK(cmd_audit(dir / "nope.json", std::nullopt, out, err) == kExitInvalidInput);

  CHECK(cmd_plot(dir / "find" / "profile.json", dir / "p.svg", Dimension(2), out, err) == kExitOk);
  CHECK(cmd_plot(dir / "shoot" / "trajectory.csv", dir / "t.svg", Dimension(2), out, err) == kExitOk);
  std::ofstream(dir / "empty.json") << "{\"n\": 2, \"closed\": false, \"samples\": []}";
  CHECK(cmd_plot(dir / "empty.json", dir / "e.svg", Dimension(2), out, err) == kExitInvalidInput);
  std::ofstream(dir / "junk.json") << "not json";
  CHECK(cmd_plot(dir / "junk.json", dir / "j.svg", Dimension(2), out, err) == kExitInvalidInput);

  RunConfig sweep;
  sweep.output_dir = dir / "sweep";
  CHECK(cmd_sweep(sweep, {2, 3}, 2, out, err) == kExitOk);
  const std::string summary = read_text(dir / "sweep" / "summary.csv");
  CHECK(count(summary, "\n") == 3);
  CHECK(read_text(dir / "sweep" / "n2" / "profile.json") == read_text(dir / "find" / "profile.json"));
  CHECK(cmd_sweep(sweep, {}, 1, out, err) == kExitInvalidInput);
}
