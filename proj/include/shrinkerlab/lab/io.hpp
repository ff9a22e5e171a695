#pragma once

// File formats: JSON records, CSV sample streams, atomic writes.
// Numbers are written in shortest round-trip form, so identical runs produce
// byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkerlab/analysis.hpp"
#include "shrinkerlab/integrator.hpp"
#include "shrinkerlab/poincare.hpp"
#include "shrinkerlab/profile.hpp"

namespace shrinkerlab::lab {

using Json = nlohmann::ordered_json;

std::string format_number(double v);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& j);

Json to_json(const ShrinkerProfile& profile);
Json to_json(const DiagnosticsReport& report);
Json to_json(const FixedPointRecord& record);

/// Throws ProfileError on missing or mistyped fields.
ShrinkerProfile profile_from_json(const Json& j);
ShrinkerProfile load_profile(const std::filesystem::path& path);

/// Inverses of to_json for cached records. Throw ProfileError.
DiagnosticsReport diagnostics_from_json(const Json& j);
FixedPointRecord fixed_point_from_json(const Json& j);

/// Columns t, x, r, theta.
std::string trajectory_csv(const std::vector<TrajectoryPoint>& points);

/// Reads a t, x, r, theta CSV back as an open profile. Throws ProfileError.
ShrinkerProfile profile_from_csv(const std::string& text, Dimension n);

Json crossings_json(const Trajectory& trajectory, Dimension n, const GeodesicState& start);

}  // namespace shrinkerlab::lab
