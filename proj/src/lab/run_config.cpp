#include "shrinkerlab/lab/run_config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "shrinkerlab/errors.hpp"
#include "shrinkerlab/lab/io.hpp"

namespace shrinkerlab::lab {

void RunConfig::validate() const {
  solver.validate();
  if (!(scan_step > 0.0) || !std::isfinite(scan_step)) throw ConfigError("scan step must be positive");
  if (!(profile_spacing > 0.0) || !(profile_spacing <= solver.max_step))
    throw ConfigError("profile spacing must lie in (0, max_step]");
  const Bracket w = window();
  if (!(w.lo <= w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi))
    throw ConfigError("scan window must satisfy lo <= hi");
  if (!(w.lo > solver.r_floor)) throw ConfigError("scan window must lie above r_floor");
  const double rc = cylinder_radius(n);
  if (!(w.lo >= rc + scan_step || w.hi <= rc - scan_step))
    throw ConfigError("scan window must stay at least one step away from the cylinder radius " +
                      format_number(rc));
  for (const auto& [R, theta] : seed_list)
    if (!(R > solver.r_floor) || !std::isfinite(theta)) throw ConfigError("invalid seed");
}

Settings read_settings(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  Settings out;
  try {
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
      if (item.name == "++" || item.name == "--") continue;  // section markers
      std::string key = item.fullname();
      out[key] = item.inputs;
    }
  } catch (const CLI::Error& e) {
    throw ConfigError("malformed config file " + file.string() + ": " + e.what());
  }
  return out;
}

namespace {

double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key " + key + ": not a number: '" + text + "'");
  return v;
}

double single_real(const std::string& key, const std::vector<std::string>& values) {
  if (values.size() != 1) throw ConfigError("config key " + key + " expects one value");
  return parse_real(key, values.front());
}

}  // namespace

void apply_settings(RunConfig& config, const Settings& settings) {
  std::map<std::string, double*> reals = {
      {"rel_tol", &config.solver.rel_tol},
      {"abs_tol", &config.solver.abs_tol},
      {"max_step", &config.solver.max_step},
      {"r_floor", &config.solver.r_floor},
      {"t_max", &config.solver.t_max},
      {"escape_radius", &config.solver.escape_radius},
      {"crossing_tol", &config.solver.crossing_tol},
      {"transversal_margin", &config.solver.transversal_margin},
      {"step", &config.scan_step},
      {"spacing", &config.profile_spacing},
  };
  for (const auto& [raw_key, values] : settings) {
    std::string key = raw_key;
    if (key.rfind("solver.", 0) == 0) key = key.substr(7);
    for (auto& c : key)
      if (c == '-') c = '_';

    if (auto it = reals.find(key); it != reals.end()) {
      *it->second = single_real(raw_key, values);
    } else if (key == "n") {
      const double v = single_real(raw_key, values);
      if (v != std::floor(v)) throw ConfigError("config key n must be an integer");
      try {
        config.n = Dimension(static_cast<int>(v));
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "window") {
      if (values.size() != 2) throw ConfigError("config key window expects [lo, hi]");
      config.scan_window = Bracket{parse_real(raw_key, values[0]), parse_real(raw_key, values[1])};
    } else if (key == "seeds") {
      if (values.size() % 2 != 0) throw ConfigError("config key seeds expects pairs R, theta");
      config.seed_list.clear();
      for (std::size_t i = 0; i < values.size(); i += 2)
        config.seed_list.emplace_back(parse_real(raw_key, values[i]), parse_real(raw_key, values[i + 1]));
    } else if (key == "out") {
      if (values.size() != 1) throw ConfigError("config key out expects one path");
      config.output_dir = values.front();
    } else {
      throw ConfigError("unknown config key '" + raw_key + "'");
    }
  }
}

std::string canonical_text(const RunConfig& c) {
  const Bracket w = c.window();
  std::string s;
  auto put = [&](const char* key, const std::string& value) {
    s += key;
    s += '=';
    s += value;
    s += '\n';
  };
  put("code", kCodeVersion);
  put("n", std::to_string(c.n.value()));
  put("rel_tol", format_number(c.solver.rel_tol));
  put("abs_tol", format_number(c.solver.abs_tol));
  put("max_step", format_number(c.solver.max_step));
  put("r_floor", format_number(c.solver.r_floor));
  put("t_max", format_number(c.solver.t_max));
  put("escape_radius", format_number(c.solver.escape_radius));
  put("crossing_tol", format_number(c.solver.crossing_tol));
  put("transversal_margin", format_number(c.solver.transversal_margin));
  put("window", format_number(w.lo) + "," + format_number(w.hi));
  put("step", format_number(c.scan_step));
  put("spacing", format_number(c.profile_spacing));
  std::string seeds;
  for (const auto& [R, theta] : c.seed_list) seeds += format_number(R) + ":" + format_number(theta) + ";";
  put("seeds", seeds);
  return s;
}

std::string config_digest(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace shrinkerlab::lab
