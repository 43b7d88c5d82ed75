#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stiffsense/integrators.hpp"
#include "stiffsense/objective.hpp"
#include "stiffsense/regime.hpp"
#include "stiffsense/verify.hpp"

// Serialization for the command-line front end: CSV trajectory/figure data
// and JSON manifests. Floating-point fields use the shortest representation
// that round-trips to the same double.

namespace stiffsense {

std::string format_double(double v);

std::string_view regime_name(Regime r);
std::string_view status_kind_name(StatusKind k);

// Single-token form, e.g. "completed" or "tangent_overflow:10323".
std::string status_token(const TrajectoryStatus& s);

// Columns: step,time,x,xd_alpha,xd_beta. Rows after a tangent overflow
// repeat the last finite tangent values, keeping the file rectangular.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

// Values of the named column from a CSV written by this module.
std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    std::string_view column);

nlohmann::json params_to_json(const ModelParams& p);
nlohmann::json config_to_json(const SimConfig& cfg);
nlohmann::json window_to_json(const AveragingWindow& w);
nlohmann::json status_to_json(const TrajectoryStatus& s);
nlohmann::json objective_to_json(const ObjectiveResult& r);
nlohmann::json regime_report_to_json(const RegimeReport& r);
nlohmann::json comparison_to_json(const GradientComparison& c);

}  // namespace stiffsense
