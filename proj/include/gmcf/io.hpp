#pragma once

// Serialization: CSV ('.' decimal separator, LF endings, 15 significant
// digits) and JSON payloads for profiles, speed results, trajectories and
// monitor event logs.

#include "gmcf/core.hpp"
#include "gmcf/diagnostics.hpp"
#include "gmcf/evolve.hpp"
#include "gmcf/profile.hpp"
#include "gmcf/speed.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace gmcf {

inline constexpr const char* kSchemaVersion = "gmcf-1";

/// 15 significant digits, '.' separator, no grouping.
std::string format_sig(double v);

nlohmann::json to_json(const FlowParams& params);
FlowParams params_from_json(const nlohmann::json& j);

void write_profile_csv(const ProfileSolution& sol, const std::filesystem::path& path);
nlohmann::json profile_to_json(const ProfileSolution& sol);

nlohmann::json speed_to_json(const SpeedResult& result, const std::string& profile_csv_path);

nlohmann::json convergence_to_json(const ConvergenceRecord& record);
nlohmann::json estimate_report_to_json(const EstimateReport& report);
nlohmann::json events_to_json(const std::vector<MonitorEvent>& events);

/// Observer streaming `t,r,u,ur,urr,H` rows (long format) at every snapshot.
class TrajectoryWriter : public Observer {
public:
    explicit TrajectoryWriter(const std::filesystem::path& path);
    void sample(const EvolutionState& state) override;

private:
    std::ofstream out_;
};

/// Writes a JSON document with the schema version and resolved config.
void write_json_doc(const std::filesystem::path& path, const nlohmann::json& config,
                    const nlohmann::json& payload);

} // namespace gmcf
