#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlhelm/forward.hpp"
#include "nlhelm/inverse.hpp"
#include "nlhelm/roundtrip.hpp"

namespace nlhelm {

using nlohmann::json;

/// Parses a JSON file; InputError carries the path and the parser's byte offset.
json load_json_file(const std::filesystem::path& path);

/// Forward settings from a config object. Fields absent from `j` keep the values
/// of `defaults`; wrong types and invalid values throw InputError naming the field.
ForwardConfig forward_config_from_json(const json& j, const ForwardConfig& defaults = {});
json to_json(const ForwardConfig& cfg);
json to_json(const Nonlinearity& f);
Nonlinearity nonlinearity_from_json(const json& j, const std::string& field = "nonlinearity");

/// The "inverse" section of a run config.
struct InverseSettings {
  InverseConfig config;
  bool auto_interval = false;      // "interval": "auto" -> estimate_bounds
  bool intensity_given = false;    // otherwise taken from the trajectory
  std::size_t bounds_grid = 64;
  std::vector<double> reference;   // expected a_k, for the summary line
};
InverseSettings inverse_settings_from_json(const json& j);
json to_json(const InverseConfig& cfg);

/// The "roundtrip" section plus the "forward" section it perturbs.
RoundtripConfig roundtrip_config_from_json(const json& run);

json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory(const std::filesystem::path& path);

/// Scientific notation, 5 significant digits.
std::string format_sci(double x);

/// t, Re U, Im U, |U| at r = R1 on `points` uniform t in [-1, 1].
void write_field_csv(const std::filesystem::path& path, const Trajectory& traj, const json& config,
                     std::size_t points = 181);

/// r,a_0,...,a_{K-1},residual,cond, one row per ring.
void write_inverse_csv(const std::filesystem::path& path, const InverseResult& result, std::size_t K,
                       const json& config);

void write_text(const std::filesystem::path& path, const std::string& text);

/// Run config {"forward", "inverse"} of a named experiment: experiment1 (F = s^2,
/// K = 3) or experiment2 (the eight-term sin series on [0, 1], K = 8).
json preset_config(const std::string& name);

}  // namespace nlhelm
