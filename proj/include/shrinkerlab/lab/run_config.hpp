#pragma once

// Effective configuration of a run: config file values overridden by flags.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shrinkerlab/integrator.hpp"
#include "shrinkerlab/poincare.hpp"
#include "shrinkerlab/profile.hpp"

namespace shrinkerlab::lab {

inline constexpr const char* kCodeVersion = "shrinkerlab 1.0.0";

struct RunConfig {
  Dimension n;
  SolverConfig solver;
  std::optional<Bracket> scan_window;  // empty = default window for n
  double scan_step = kDefaultScanStep;
  double profile_spacing = kDefaultProfileSpacing;
  std::filesystem::path output_dir = ".";
  std::vector<std::pair<double, double>> seed_list;  // FullMap Newton seeds (R, theta)

  Bracket window() const { return scan_window ? *scan_window : default_scan_window(n); }

  /// Throws ConfigError: solver invariants, positive step and spacing, and a
  /// scan window at least one step away from the cylinder radius.
  void validate() const;
};

/// Flat key/value settings as read from a config file, keyed by option name
/// ("rel_tol", "window", ...). Array values are stored element-wise.
using Settings = std::map<std::string, std::vector<std::string>>;

/// Reads a TOML-style key = value file. Throws ConfigError if unreadable.
Settings read_settings(const std::filesystem::path& file);

/// Applies settings to `config`. Unknown keys and unparsable values throw ConfigError.
void apply_settings(RunConfig& config, const Settings& settings);

/// Canonical text of everything that affects results, plus the code version.
std::string canonical_text(const RunConfig& config);

/// 16 hex digits of FNV-1a 64 over canonical_text().
std::string config_digest(const RunConfig& config);

}  // namespace shrinkerlab::lab
