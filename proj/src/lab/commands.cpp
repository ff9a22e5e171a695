#include "shrinkerlab/lab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <future>
#include <mutex>

#include "shrinkerlab/lab/io.hpp"
#include "shrinkerlab/lab/svg.hpp"
#include "shrinkerlab/profile.hpp"

namespace shrinkerlab::lab {

namespace fs = std::filesystem;

namespace {

constexpr const char* kProfileFile = "profile.json";
constexpr const char* kDiagnosticsFile = "diagnostics.json";
constexpr const char* kFixedPointFile = "fixed_point.json";
constexpr const char* kRecordFile = "record.json";

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void report_failure(std::ostream& err, const std::string& kind, const std::string& detail) {
  Json j;
  j["error"] = kind;
  j["message"] = detail;
  err << j.dump() << "\n";
}

std::optional<ResultRecord> load_cached(const fs::path& dir) {
  if (!fs::exists(dir / kRecordFile)) return std::nullopt;
  try {
    ResultRecord rec;
    rec.profile_text = read_text(dir / kProfileFile);
    rec.diagnostics_text = read_text(dir / kDiagnosticsFile);
    rec.fixed_point_text = read_text(dir / kFixedPointFile);
    const Json meta = Json::parse(read_text(dir / kRecordFile));
    rec.profile = profile_from_json(Json::parse(rec.profile_text));
    rec.diagnostics = diagnostics_from_json(Json::parse(rec.diagnostics_text));
    rec.fixed_point = fixed_point_from_json(Json::parse(rec.fixed_point_text));
    rec.config_digest = meta.at("config_digest").get<std::string>();
    rec.created_at = meta.at("created_at").get<std::string>();
    rec.from_cache = true;
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;  // damaged entry: recompute and overwrite
  }
}

void store_cached(const fs::path& dir, const ResultRecord& rec, const RunConfig& config) {
  write_atomic(dir / kProfileFile, rec.profile_text);
  write_atomic(dir / kDiagnosticsFile, rec.diagnostics_text);
  write_atomic(dir / kFixedPointFile, rec.fixed_point_text);
  Json meta;
  meta["config_digest"] = rec.config_digest;
  meta["created_at"] = rec.created_at;
  meta["config"] = canonical_text(config);
  write_atomic(dir / kRecordFile, dump(meta));  // written last: marks the entry complete
}

bool is_donut(const FixedPointRecord& rec) {
  const double rc = cylinder_radius(rec.n);
  return rec.inner_radius < rc && rc < rec.R_star;
}

std::pair<FixedPointRecord, ShrinkerProfile> locate(const RunConfig& config, int jobs) {
  const SolverConfig& cfg = config.solver;
  std::string last_failure = "no sign change of the symmetric residual in the scan window";

  for (const auto& [R, theta] : config.seed_list) {
    try {
      auto rec = find_fixed_point_full(R, theta, config.n, cfg);
      return {rec, assemble_loop_profile(rec, cfg, config.profile_spacing)};
    } catch (const Error& e) {
      last_failure = e.what();
    }
  }
  if (!config.seed_list.empty()) throw NoFixedPoint("no seed converged: " + last_failure);

  const ScanResult sc = scan(config.window(), config.scan_step, config.n, cfg, jobs);
  for (const auto& b : sc.brackets) {
    try {
      auto rec = find_fixed_point_symmetric(b, config.n, cfg);
      if (!is_donut(rec)) {
        last_failure = "fixed point at R = " + format_number(rec.R_star) + " does not enclose the cylinder";
        continue;
      }
      return {rec, assemble_symmetric_profile(rec, cfg, config.profile_spacing)};
    } catch (const NoBracket& e) {
      last_failure = e.what();
    } catch (const NoReturn& e) {
      last_failure = e.what();
    } catch (const IntegrationError& e) {
      last_failure = e.what();
    }
  }
  throw NoFixedPoint(last_failure);
}

void write_outputs(const fs::path& dir, const ResultRecord& rec) {
  write_atomic(dir / kProfileFile, rec.profile_text);
  write_atomic(dir / kDiagnosticsFile, rec.diagnostics_text);
  write_atomic(dir / kFixedPointFile, rec.fixed_point_text);
}

void print_summary(std::ostream& out, const ResultRecord& rec) {
  const auto& d = rec.diagnostics;
  out << "n = " << rec.profile.n.value() << "  R* = " << format_number(rec.fixed_point.R_star)
      << "  entropy = " << (d.entropy ? format_number(*d.entropy) : "n/a")
      << "  L_n = " << format_number(d.gaussian_length) << " < " << format_number(d.gaussian_length_bound)
      << "  " << to_string(rec.fixed_point.classification) << (rec.from_cache ? "  (cached)" : "") << "\n";
}

}  // namespace

fs::path cache_root() {
  if (const char* env = std::getenv("SHRINKERLAB_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "shrinkerlab";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "shrinkerlab";
  return fs::temp_directory_path() / "shrinkerlab-cache";
}

ResultRecord solve(const RunConfig& config, int jobs) {
  config.validate();
  const std::string digest = config_digest(config);
  const fs::path entry = cache_root() / digest;
  if (auto cached = load_cached(entry)) return *cached;

  auto [fp, profile] = locate(config, jobs);
  profile.source.config_digest = digest;

  ResultRecord rec;
  rec.fixed_point = fp;
  rec.profile = std::move(profile);
  rec.diagnostics = audit(rec.profile);
  rec.config_digest = digest;
  rec.created_at = utc_now();
  rec.profile_text = dump(to_json(rec.profile));
  rec.diagnostics_text = dump(to_json(rec.diagnostics));
  rec.fixed_point_text = dump(to_json(rec.fixed_point));
  try {
    store_cached(entry, rec, config);
  } catch (const std::exception&) {
    // An unwritable cache only costs recomputation.
  }
  return rec;
}

int cmd_shoot(const ShootRequest& request, std::ostream& out, std::ostream& err) {
  const RunConfig& config = request.config;
  try {
    config.validate();
    if (request.crossings < 0) throw ConfigError("--crossings must be >= 0");
    if (!(request.radius > config.solver.r_floor)) throw ConfigError("--radius must exceed r_floor");
    if (!std::isfinite(request.angle)) throw ConfigError("--angle must be finite");
  } catch (const Error& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  }

  const GeodesicState start{0.0, request.radius, request.angle};
  try {
    const Trajectory traj = integrate(start, config.n, config.solver, request.crossings);
    write_atomic(config.output_dir / "trajectory.csv", trajectory_csv(traj.sample_uniform(config.profile_spacing)));
    write_atomic(config.output_dir / "crossings.json", dump(crossings_json(traj, config.n, start)));
    const int seen = static_cast<int>(traj.crossings().size());
    out << "termination " << to_string(traj.termination()) << ", " << seen << " crossing(s), t_end "
        << format_number(traj.t_end()) << "\n";
    if (seen < request.crossings) {
      Json j;
      j["error"] = "NoReturn";
      j["reason"] = std::string(to_string(traj.termination()));
      j["crossings_seen"] = seen;
      j["crossings_requested"] = request.crossings;
      err << j.dump() << "\n";
      return kExitIntegrationFailure;
    }
    return kExitOk;
  } catch (const IntegrationError& e) {
    Json j;
    j["error"] = "IntegrationError";
    j["reason"] = e.kind() == IntegrationError::Kind::StepSizeUnderflow ? "StepSizeUnderflow" : "NonTransversalCrossing";
    j["message"] = e.what();
    err << j.dump() << "\n";
    return kExitIntegrationFailure;
  } catch (const DomainError& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  }
}

int cmd_find(const RunConfig& config, int jobs, std::ostream& out, std::ostream& err) {
  try {
    const ResultRecord rec = solve(config, jobs);
    write_outputs(config.output_dir, rec);
    print_summary(out, rec);
    return kExitOk;
  } catch (const NoFixedPoint& e) {
    report_failure(err, "NoFixedPoint", e.what());
    return kExitNoFixedPoint;
  } catch (const ConfigError& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  } catch (const DomainError& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  } catch (const Error& e) {
    report_failure(err, "IntegrationFailure", e.what());
    return kExitIntegrationFailure;
  }
}

int cmd_sweep(const RunConfig& base, const std::vector<int>& dimensions, int jobs, std::ostream& out,
              std::ostream& err) {
  std::vector<RunConfig> configs;
  try {
    if (dimensions.empty()) throw ConfigError("sweep needs at least one dimension");
    for (int n : dimensions) {
      RunConfig c = base;
      c.n = Dimension(n);
      c.output_dir = base.output_dir / ("n" + std::to_string(n));
      c.validate();
      configs.push_back(std::move(c));
    }
  } catch (const Error& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  }

  const std::size_t count = configs.size();
  std::vector<std::optional<ResultRecord>> results(count);
  std::vector<std::string> failures(count);
  std::mutex io;
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < count; i += stride) {
      try {
        results[i] = solve(configs[i], 1);
        write_outputs(configs[i].output_dir, *results[i]);
        std::lock_guard lock(io);
        print_summary(out, *results[i]);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::clamp(jobs, 1, 64)), count);
  std::vector<std::future<void>> pending;
  for (std::size_t w = 1; w < workers; ++w) pending.push_back(std::async(std::launch::async, run, w, workers));
  run(0, workers);
  for (auto& p : pending) p.get();

  std::string csv = "n,R_star,entropy,L_n,bound,margin,classification\n";
  int status = kExitOk;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = configs[i].n.value();
    if (!results[i]) {
      csv += std::to_string(n) + ",nan,nan,nan," + format_number(gaussian_length_bound(configs[i].n)) +
             ",nan,NoFixedPoint\n";
      report_failure(err, "NoFixedPoint", "n = " + std::to_string(n) + ": " + failures[i]);
      status = kExitNoFixedPoint;
      continue;
    }
    const auto& r = *results[i];
    const auto& d = r.diagnostics;
    csv += std::to_string(n) + "," + format_number(r.fixed_point.R_star) + "," +
           format_number(d.entropy.value_or(std::nan(""))) + "," + format_number(d.gaussian_length) + "," +
           format_number(d.gaussian_length_bound) + "," + format_number(d.length_margin) + "," +
           std::string(to_string(r.fixed_point.classification)) + "\n";
  }
  try {
    write_atomic(base.output_dir / "summary.csv", csv);
  } catch (const std::exception& e) {
    report_failure(err, "IntegrationFailure", e.what());
    return kExitIntegrationFailure;
  }
  out << csv;
  return status;
}

int cmd_audit(const fs::path& profile_path, const std::optional<fs::path>& out_dir, std::ostream& out,
              std::ostream& err) {
  try {
    const ShrinkerProfile profile = load_profile(profile_path);
    validate_profile(profile);
    const DiagnosticsReport d = audit(profile);
    const fs::path dir = out_dir ? *out_dir : (profile_path.has_parent_path() ? profile_path.parent_path() : ".");
    write_atomic(dir / kDiagnosticsFile, dump(to_json(d)));
    out << "entropy " << (d.entropy ? format_number(*d.entropy) : "n/a") << ", shrinker residual "
        << format_number(d.shrinker_residual) << ", crossings " << d.crossing_count << ", convex "
        << (d.convex ? "yes" : "no") << "\n";
    return kExitOk;
  } catch (const Error& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  }
}

int cmd_plot(const fs::path& input, const fs::path& svg, Dimension csv_dimension, std::ostream& out,
             std::ostream& err) {
  try {
    ShrinkerProfile profile;
    if (input.extension() == ".csv") profile = profile_from_csv(read_text(input), csv_dimension);
    else profile = load_profile(input);
    write_atomic(svg, render_svg(profile));
    out << "wrote " << svg.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    report_failure(err, "InvalidInput", e.what());
    return kExitInvalidInput;
  }
}

}  // namespace shrinkerlab::lab
