#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "error.hpp"

namespace semnet {

using nlohmann::json;

std::string branch_name(Branch b) {
    switch (b) {
        case Branch::SemCom: return "SemCom";
        case Branch::Raw: return "Raw";
        case Branch::Both: return "Both";
    }
    fail(Errc::internal, "unhandled branch value");
}

Branch branch_from_name(const std::string& name) {
    if (name == "SemCom") return Branch::SemCom;
    if (name == "Raw") return Branch::Raw;
    if (name == "Both") return Branch::Both;
    fail(Errc::parse_error, "unknown branch '" + name + "' (expected SemCom, Raw or Both)");
}

std::vector<McsEntry> default_mcs_table() {
    // Modulation order and code rate per CQI index; efficiency is their
    // product rounded to the conventional 4 decimals.
    return {
        {2, 78.0 / 1024.0, 0.1523},  {2, 120.0 / 1024.0, 0.2344}, {2, 193.0 / 1024.0, 0.3770},
        {2, 308.0 / 1024.0, 0.6016}, {2, 449.0 / 1024.0, 0.8770}, {2, 602.0 / 1024.0, 1.1758},
        {4, 378.0 / 1024.0, 1.4766}, {4, 490.0 / 1024.0, 1.9141}, {4, 616.0 / 1024.0, 2.4063},
        {6, 466.0 / 1024.0, 2.7305}, {6, 567.0 / 1024.0, 3.3223}, {6, 666.0 / 1024.0, 3.9023},
        {6, 772.0 / 1024.0, 4.5234}, {6, 873.0 / 1024.0, 5.1152}, {6, 948.0 / 1024.0, 5.5547},
    };
}

std::vector<double> default_cqi_thresholds_db() {
    return {-6.7, -4.7, -2.3, 0.2, 2.4, 4.3, 5.9, 8.1, 10.3, 11.7, 14.1, 16.3, 18.7, 21.0, 22.7};
}

std::vector<Rect> default_walls() {
    return {
        {15.0, 25.0, 55.0, 27.0},
        {60.0, 10.0, 62.0, 50.0},
        {25.0, 60.0, 27.0, 95.0},
        {55.0, 70.0, 90.0, 72.0},
    };
}

void validate(const ScenarioConfig& config) {
    auto reject = [](const std::string& msg) { fail(Errc::invalid_config, msg); };

    if (!(config.width_m > 0.0) || !(config.height_m > 0.0)) {
        reject("width_m and height_m must be positive");
    }
    if (config.n_robots < 1) reject("n_robots must be at least 1");
    if (config.n_devices < 1) reject("n_devices must be at least 1");
    if (config.n_robots > 10000) reject("n_robots must be at most 10000");
    if (config.n_devices > 10000) reject("n_devices must be at most 10000");
    if (!(config.step_s > 0.0)) reject("step_s must be positive");
    if (!(config.sim_duration_s > 0.0)) reject("sim_duration_s must be positive");
    double steps = config.sim_duration_s / config.step_s;
    if (std::abs(steps - std::round(steps)) > 1e-9) {
        reject("sim_duration_s must be an integer multiple of step_s");
    }
    if (!(config.sense_radius_m > 0.0)) reject("sense_radius_m must be positive");
    if (config.robot_speed_mps < 0.0) reject("robot_speed_mps must be nonnegative");
    for (const auto& w : config.walls) {
        if (!(w.x_min < w.x_max) || !(w.y_min < w.y_max)) {
            reject("walls must have positive area");
        }
        if (w.x_min < 0.0 || w.y_min < 0.0 || w.x_max > config.width_m || w.y_max > config.height_m) {
            reject("walls must lie within the environment bounds");
        }
    }

    const auto& r = config.radio;
    if (!(r.bandwidth_hz > 0.0)) reject("radio.bandwidth_hz must be positive");
    if (!(r.carrier_ghz > 0.0)) reject("radio.carrier_ghz must be positive");
    if (r.cqi_thresholds_db.size() != 15) reject("radio.cqi_thresholds_db must have 15 entries");
    for (size_t i = 1; i < r.cqi_thresholds_db.size(); ++i) {
        if (!(r.cqi_thresholds_db[i - 1] < r.cqi_thresholds_db[i])) {
            reject("radio.cqi_thresholds_db must be strictly ascending");
        }
    }
    if (r.mcs_table.size() != 15) reject("radio.mcs_table must have 15 entries");
    for (size_t i = 0; i < r.mcs_table.size(); ++i) {
        const auto& e = r.mcs_table[i];
        if (e.modulation_order <= 0 || !(e.code_rate > 0.0) || !(e.spectral_efficiency > 0.0)) {
            reject("radio.mcs_table entries must be positive");
        }
        if (i > 0 && !(r.mcs_table[i - 1].spectral_efficiency < e.spectral_efficiency)) {
            reject("radio.mcs_table spectral efficiencies must be strictly ascending");
        }
    }
    if (r.server_pos.x < 0.0 || r.server_pos.x > config.width_m || r.server_pos.y < 0.0 ||
        r.server_pos.y > config.height_m) {
        reject("radio.server_pos must lie within the environment bounds");
    }
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.contains(key)) {
            fail(Errc::parse_error, "unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& value = obj.at(key);
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
        if (value.is_number_integer() && !value.is_number_unsigned()) {
            fail(Errc::parse_error, std::string("bad value for '") + key + "': must be non-negative");
        }
    }
    try {
        out = value.get<T>();
    } catch (const json::exception& e) {
        fail(Errc::parse_error, std::string("bad value for '") + key + "': " + e.what());
    }
}

Rect rect_from_json(const json& j) {
    if (!j.is_object()) fail(Errc::parse_error, "wall entries must be objects");
    reject_unknown_keys(j, {"x_min", "y_min", "x_max", "y_max"}, "wall");
    Rect r;
    read_field(j, "x_min", r.x_min);
    read_field(j, "y_min", r.y_min);
    read_field(j, "x_max", r.x_max);
    read_field(j, "y_max", r.y_max);
    return r;
}

json rect_to_json(const Rect& r) {
    return {{"x_min", r.x_min}, {"y_min", r.y_min}, {"x_max", r.x_max}, {"y_max", r.y_max}};
}

RadioParams radio_from_json(const json& j) {
    if (!j.is_object()) fail(Errc::parse_error, "'radio' must be an object");
    reject_unknown_keys(j,
                        {"carrier_ghz", "bandwidth_hz", "tx_power_dbm", "noise_figure_db",
                         "interference_dbm", "server_pos", "cqi_thresholds_db", "mcs_table",
                         "header_overhead_bits"},
                        "radio");
    RadioParams r;
    read_field(j, "carrier_ghz", r.carrier_ghz);
    read_field(j, "bandwidth_hz", r.bandwidth_hz);
    read_field(j, "tx_power_dbm", r.tx_power_dbm);
    read_field(j, "noise_figure_db", r.noise_figure_db);
    if (j.contains("interference_dbm")) {
        const auto& v = j.at("interference_dbm");
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "none")) {
            r.interference_dbm.reset();
        } else if (v.is_number()) {
            r.interference_dbm = v.get<double>();
        } else {
            fail(Errc::parse_error, "interference_dbm must be a number or \"none\"");
        }
    }
    if (j.contains("server_pos")) {
        const auto& v = j.at("server_pos");
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            fail(Errc::parse_error, "server_pos must be [x, y]");
        }
        r.server_pos = {v[0].get<double>(), v[1].get<double>()};
    }
    read_field(j, "cqi_thresholds_db", r.cqi_thresholds_db);
    if (j.contains("mcs_table")) {
        r.mcs_table.clear();
        for (const auto& e : j.at("mcs_table")) {
            if (!e.is_object()) fail(Errc::parse_error, "mcs_table entries must be objects");
            reject_unknown_keys(e, {"modulation_order", "code_rate", "spectral_efficiency"},
                                "mcs_table entry");
            McsEntry m;
            read_field(e, "modulation_order", m.modulation_order);
            read_field(e, "code_rate", m.code_rate);
            read_field(e, "spectral_efficiency", m.spectral_efficiency);
            r.mcs_table.push_back(m);
        }
    }
    read_field(j, "header_overhead_bits", r.header_overhead_bits);
    return r;
}

json radio_to_json(const RadioParams& r) {
    json j;
    j["carrier_ghz"] = r.carrier_ghz;
    j["bandwidth_hz"] = r.bandwidth_hz;
    j["tx_power_dbm"] = r.tx_power_dbm;
    j["noise_figure_db"] = r.noise_figure_db;
    if (r.interference_dbm) {
        j["interference_dbm"] = *r.interference_dbm;
    } else {
        j["interference_dbm"] = "none";
    }
    j["server_pos"] = {r.server_pos.x, r.server_pos.y};
    j["cqi_thresholds_db"] = r.cqi_thresholds_db;
    json table = json::array();
    for (const auto& e : r.mcs_table) {
        table.push_back({{"modulation_order", e.modulation_order},
                         {"code_rate", e.code_rate},
                         {"spectral_efficiency", e.spectral_efficiency}});
    }
    j["mcs_table"] = table;
    j["header_overhead_bits"] = r.header_overhead_bits;
    return j;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
    if (!j.is_object()) fail(Errc::parse_error, "scenario config must be a JSON object");
    reject_unknown_keys(j,
                        {"width_m", "height_m", "n_robots", "n_devices", "walls", "sense_radius_m",
                         "robot_speed_mps", "sim_duration_s", "step_s", "seed", "radio", "branch"},
                        "scenario config");
    ScenarioConfig c;
    read_field(j, "width_m", c.width_m);
    read_field(j, "height_m", c.height_m);
    read_field(j, "n_robots", c.n_robots);
    read_field(j, "n_devices", c.n_devices);
    if (j.contains("walls")) {
        if (!j.at("walls").is_array()) fail(Errc::parse_error, "'walls' must be an array");
        c.walls.clear();
        for (const auto& w : j.at("walls")) {
            c.walls.push_back(rect_from_json(w));
        }
    }
    read_field(j, "sense_radius_m", c.sense_radius_m);
    read_field(j, "robot_speed_mps", c.robot_speed_mps);
    read_field(j, "sim_duration_s", c.sim_duration_s);
    read_field(j, "step_s", c.step_s);
    read_field(j, "seed", c.seed);
    if (j.contains("radio")) c.radio = radio_from_json(j.at("radio"));
    if (j.contains("branch")) {
        if (!j.at("branch").is_string()) fail(Errc::parse_error, "'branch' must be a string");
        c.branch = branch_from_name(j.at("branch").get<std::string>());
    }
    validate(c);
    return c;
}

json scenario_to_json(const ScenarioConfig& c) {
    json j;
    j["width_m"] = c.width_m;
    j["height_m"] = c.height_m;
    j["n_robots"] = c.n_robots;
    j["n_devices"] = c.n_devices;
    json walls = json::array();
    for (const auto& w : c.walls) {
        walls.push_back(rect_to_json(w));
    }
    j["walls"] = walls;
    j["sense_radius_m"] = c.sense_radius_m;
    j["robot_speed_mps"] = c.robot_speed_mps;
    j["sim_duration_s"] = c.sim_duration_s;
    j["step_s"] = c.step_s;
    j["seed"] = c.seed;
    j["radio"] = radio_to_json(c.radio);
    j["branch"] = branch_name(c.branch);
    return j;
}

ScenarioConfig parse_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; convert it to line/column.
        size_t line = 1;
        size_t col = 1;
        size_t limit = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "JSON syntax error at line " << line << ", column " << col << ": " << e.what();
        fail(Errc::parse_error, msg.str());
    }
    return scenario_from_json(j);
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open scenario config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

}  // namespace semnet
