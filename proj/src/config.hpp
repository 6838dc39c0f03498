#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geometry.hpp"

namespace semnet {

enum class Branch : uint8_t { SemCom = 0, Raw = 1, Both = 2 };

std::string branch_name(Branch b);
Branch branch_from_name(const std::string& name);

struct McsEntry {
    int modulation_order = 0;
    double code_rate = 0.0;
    double spectral_efficiency = 0.0;
};

// 15-entry 4-bit CQI table (QPSK/16QAM/64QAM efficiencies up to 5.5547).
std::vector<McsEntry> default_mcs_table();
// SINR thresholds (dB) for CQI 1..15; below the first entry maps to CQI 0.
std::vector<double> default_cqi_thresholds_db();

struct RadioParams {
    double carrier_ghz = 3.5;
    double bandwidth_hz = 1.0e7;
    double tx_power_dbm = 23.0;
    double noise_figure_db = 7.0;
    // Disabled ("none") by default: links are assumed orthogonally scheduled.
    std::optional<double> interference_dbm;
    Vec2 server_pos{50.0, 50.0};
    std::vector<double> cqi_thresholds_db = default_cqi_thresholds_db();
    std::vector<McsEntry> mcs_table = default_mcs_table();
    // Extra bits charged per transmission on top of the payload. Zero keeps
    // the bit accounting pure-payload.
    uint64_t header_overhead_bits = 0;
};

std::vector<Rect> default_walls();

struct ScenarioConfig {
    double width_m = 100.0;
    double height_m = 100.0;
    uint32_t n_robots = 4;
    uint32_t n_devices = 20;
    std::vector<Rect> walls = default_walls();
    double sense_radius_m = 2.0;
    double robot_speed_mps = 2.0;
    double sim_duration_s = 400.0;
    double step_s = 1.0;
    uint64_t seed = 1;
    RadioParams radio;
    Branch branch = Branch::SemCom;
};

// Throws Errc::invalid_config describing the first violated constraint.
void validate(const ScenarioConfig& config);

// Strict parse: unknown keys are rejected at every level, missing keys fall
// back to defaults. Throws Errc::parse_error / Errc::invalid_config.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& config);

// Wraps scenario_from_json with file IO; JSON syntax errors carry a
// line/column diagnostic.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text);

}  // namespace semnet
