#pragma once

// The command implementations behind the shrinkerlab executable. Each returns
// the process exit code; progress goes to `out`, failures to `err`.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shrinkerlab/analysis.hpp"
#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/lab/run_config.hpp"

namespace shrinkerlab::lab {

enum ExitCode : int {
  kExitOk = 0,
  kExitNoFixedPoint = 2,
  kExitIntegrationFailure = 3,
  kExitInvalidInput = 4,
};

class NoFixedPoint : public Error {
 public:
  using Error::Error;
};

/// The deterministic outputs of one `find`, as written to disk.
struct ResultRecord {
  FixedPointRecord fixed_point;
  ShrinkerProfile profile;
  DiagnosticsReport diagnostics;
  std::string config_digest;
  std::string created_at;  // ISO 8601, UTC; first computation of this digest
  bool from_cache = false;

  std::string profile_text;
  std::string diagnostics_text;
  std::string fixed_point_text;
};

/// Cache directory: $SHRINKERLAB_CACHE, else $XDG_CACHE_HOME/shrinkerlab, else
/// ~/.cache/shrinkerlab.
std::filesystem::path cache_root();

/// Scan, solve, assemble and audit, or load the entry cached under the config
/// digest. Throws NoFixedPoint when no donut is found in the window.
ResultRecord solve(const RunConfig& config, int jobs);

struct ShootRequest {
  RunConfig config;
  double radius = 0.0;
  double angle = 0.0;
  int crossings = 0;  // 0 = run until the trajectory terminates
};

int cmd_shoot(const ShootRequest& request, std::ostream& out, std::ostream& err);
int cmd_find(const RunConfig& config, int jobs, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& base, const std::vector<int>& dimensions, int jobs, std::ostream& out,
              std::ostream& err);
int cmd_audit(const std::filesystem::path& profile, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& out, std::ostream& err);
int cmd_plot(const std::filesystem::path& input, const std::filesystem::path& svg, Dimension csv_dimension,
             std::ostream& out, std::ostream& err);

}  // namespace shrinkerlab::lab
