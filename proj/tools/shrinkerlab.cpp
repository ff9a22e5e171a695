#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <numeric>

#include "shrinkerlab/lab/commands.hpp"
#include "shrinkerlab/lab/io.hpp"

namespace lab = shrinkerlab::lab;

namespace {

// Flags that may also appear in a config file, by config key.
struct SharedOptions {
  std::map<std::string, CLI::Option*> by_key;
  std::map<std::string, std::vector<std::string>> values;
  std::string config_path;
  std::string out_dir;
  int jobs = 1;

  void add_to(CLI::App* app, bool with_n, bool with_scan) {
    auto add = [&](const std::string& key, const std::string& flag, const std::string& help, int arity = 1) {
      auto* opt = app->add_option(flag, values[key], help)->expected(arity)->type_name(key == "n" ? "INT" : "FLOAT");
      by_key[key] = opt;
    };
    if (with_n) add("n", "--n", "dimension n >= 2 of the shrinker");
    if (with_scan) {
      auto* w = app->add_option("--window", values["window"], "scan window LO HI")->expected(2)->type_name("FLOAT");
      by_key["window"] = w;
      add("step", "--step", "scan step");
      auto* seed = app->add_option("--seed", values["seeds"], "FullMap Newton seed R THETA (replaces the symmetric scan)")
                       ->expected(2)
                       ->type_name("FLOAT")
                       ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
      by_key["seeds"] = seed;
    }
    add("rel_tol", "--rel-tol", "integrator relative tolerance");
    add("abs_tol", "--abs-tol", "integrator absolute tolerance");
    add("max_step", "--max-step", "largest integration step");
    add("r_floor", "--r-floor", "stop when r falls below this");
    add("t_max", "--t-max", "arclength budget");
    add("escape_radius", "--escape-radius", "stop outside this ball");
    add("crossing_tol", "--crossing-tol", "tolerance on |x| at crossings");
    add("spacing", "--spacing", "sample spacing of exported curves");
    app->add_option("--config", config_path, "TOML-style key = value file; flags override it")->type_name("FILE");
    app->add_option("--out", out_dir, "output directory")->type_name("DIR");
    app->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 64));
  }

  lab::RunConfig build(const std::vector<std::string>& skip = {}) const {
    lab::Settings merged;
    if (!config_path.empty()) merged = lab::read_settings(config_path);
    for (const auto& [key, opt] : by_key)
      if (opt->count() > 0) merged[key] = values.at(key);
    for (const auto& k : skip) merged.erase(k);
    lab::RunConfig config;
    lab::apply_settings(config, merged);
    if (!out_dir.empty()) config.output_dir = out_dir;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotationally symmetric self-shrinker laboratory"};
  app.require_subcommand(1);

  SharedOptions shoot_opts, find_opts, sweep_opts;

  auto* shoot = app.add_subcommand("shoot", "integrate one geodesic from (0, R, theta)");
  shoot_opts.add_to(shoot, true, false);
  double radius = 0.0, angle = 0.0;
  int crossings = 0;
  shoot->add_option("--radius", radius, "start radius R")->required();
  shoot->add_option("--angle", angle, "start angle theta");
  shoot->add_option("--crossings", crossings, "stop after this many crossings of x = 0 (0 = none)");

  auto* find = app.add_subcommand("find", "locate a shrinking donut for one n");
  find_opts.add_to(find, true, true);

  auto* sweep = app.add_subcommand("sweep", "run find for several n and summarize");
  sweep_opts.add_to(sweep, false, true);
  std::vector<int> dims;
  sweep->add_option("--n", dims, "dimensions (default 2..10)");

  auto* audit = app.add_subcommand("audit", "recompute diagnostics of a stored profile");
  std::string audit_in, audit_out;
  audit->add_option("profile", audit_in, "profile.json")->required();
  audit->add_option("--out", audit_out, "output directory (default: next to the profile)");

  auto* plot = app.add_subcommand("plot", "draw a profile or trajectory as SVG");
  std::string plot_in, plot_out;
  int plot_n = 2;
  plot->add_option("input", plot_in, "profile.json or trajectory.csv")->required();
  plot->add_option("output", plot_out, "output .svg")->required();
  plot->add_option("--n", plot_n, "dimension for the reference curves of a CSV input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lab::kExitOk : lab::kExitInvalidInput;
  }

  try {
    if (*shoot) {
      lab::ShootRequest req;
      req.config = shoot_opts.build();
      req.radius = radius;
      req.angle = angle;
      req.crossings = crossings;
      return lab::cmd_shoot(req, std::cout, std::cerr);
    }
    if (*find) return lab::cmd_find(find_opts.build(), find_opts.jobs, std::cout, std::cerr);
    if (*sweep) {
      if (dims.empty()) {
        dims.resize(9);
        std::iota(dims.begin(), dims.end(), 2);
      }
      return lab::cmd_sweep(sweep_opts.build({"n"}), dims, sweep_opts.jobs, std::cout, std::cerr);
    }
    if (*audit)
      return lab::cmd_audit(audit_in, audit_out.empty() ? std::nullopt : std::optional<std::filesystem::path>(audit_out),
                            std::cout, std::cerr);
    if (*plot) return lab::cmd_plot(plot_in, plot_out, shrinkerlab::Dimension(plot_n), std::cout, std::cerr);
  } catch (const shrinkerlab::ConfigError& e) {
    std::cerr << "{\"error\":\"InvalidInput\",\"message\":" << lab::Json(e.what()).dump() << "}\n";
    return lab::kExitInvalidInput;
  } catch (const shrinkerlab::DomainError& e) {
    std::cerr << "{\"error\":\"InvalidInput\",\"message\":" << lab::Json(e.what()).dump() << "}\n";
    return lab::kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"Failure\",\"message\":" << lab::Json(e.what()).dump() << "}\n";
    return lab::kExitIntegrationFailure;
  }
  return lab::kExitInvalidInput;
}
