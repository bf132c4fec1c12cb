#pragma once

// File formats:
//   NetworkSpec, SimConfig, ReconstructionParams, LockReport, MetricsReport: JSON
//   PhaseTrace: CSV `t,theta_1,...,theta_n`, shortest round-trip doubles
//   InfluenceMatrix: CSV adjacency (row i = influenced node), DOT digraph
//   MetricsReport: one-row CSV `ppv,acc,tpr,fpr`
//   CalibrationMap: CSV `nu,mu,ppv,acc,tpr,fpr,satisfied,admissible`

#include "redraw/calibrate.hpp"
#include "redraw/metrics.hpp"
#include "redraw/model.hpp"
#include "redraw/reconstruct.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace redraw {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a whole field; throws ValidationError on trailing text.
double parse_double(std::string_view text);

std::string read_text(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename, creating parent directories.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

void to_json(Json& j, const NetworkSpec& spec);
void from_json(const Json& j, NetworkSpec& spec);

void to_json(Json& j, const SimConfig& config);
void from_json(const Json& j, SimConfig& config);

void to_json(Json& j, const ReconstructionParams& params);
void from_json(const Json& j, ReconstructionParams& params);

void to_json(Json& j, const LockCriterion& criterion);
void from_json(const Json& j, LockCriterion& criterion);

/// Summary fields only; the r(t) and psi(t) series are left to CSV.
void to_json(Json& j, const LockReport& report);

void to_json(Json& j, const ConfusionCounts& counts);
void to_json(Json& j, const MetricsReport& report);

void to_json(Json& j, const InfluenceMatrix& m);
void from_json(const Json& j, InfluenceMatrix& m);

NetworkSpec network_from_json_text(std::string_view text);
NetworkSpec load_network(const std::filesystem::path& path);

std::string format_trace_csv(const PhaseTrace& trace);
PhaseTrace parse_trace_csv(std::string_view text, int experiment_index = 1);
PhaseTrace load_trace(const std::filesystem::path& path, int experiment_index = 1);

/// r(t) and psi(t) as CSV `t,r,psi`.
std::string format_order_parameter_csv(const PhaseTrace& trace, const LockReport& report);

std::string format_matrix_csv(const Matrix& m);
Matrix parse_matrix_csv(std::string_view text);

/// Edge j -> i labelled with rho_ij to 3 decimals.
std::string format_influence_dot(const InfluenceMatrix& m, std::string_view name = "inferred");
/// Edge j -> i labelled with a_ij.
std::string format_network_dot(const NetworkSpec& spec, std::string_view name = "network");

std::string format_metrics_csv(const MetricsReport& report);
std::string format_calibration_csv(const CalibrationMap& map);

}  // namespace redraw
