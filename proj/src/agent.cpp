#include "agent.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "error.hpp"

namespace semnet::agent {

namespace {

// Integral values print without a decimal point, others with enough digits
// to round-trip; keeps prompts and rationales deterministic.
std::string fmt_number(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

SplitUrl split_base_url(const std::string& base) {
    auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos ||
        (base.compare(0, scheme_end, "http") != 0 && base.compare(0, scheme_end, "https") != 0)) {
        fail(Errc::invalid_args, "endpoint base URL must start with http:// or https://");
    }
    auto path_start = base.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base, ""};
    SplitUrl split{base.substr(0, path_start), base.substr(path_start)};
    while (!split.prefix.empty() && split.prefix.back() == '/') split.prefix.pop_back();
    return split;
}

constexpr const char* kSystemPrompt =
    "You plan deployments for an autonomous inspection fleet. Reply with exactly one JSON "
    "object, no surrounding text, with keys num_robots (integer), search_strategy "
    "(\"NearestFirst\" or \"SectorSweep\"), transmission_scheme (\"SemCom\" or \"Raw\"), and "
    "rationale (short string).";

// Pulls the recommendation out of one chat response body. Throws
// Errc::malformed_response with a human-readable reason.
Recommendation parse_recommendation(const std::string& content, const ScenarioBrief& brief) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error&) {
        // Models often wrap JSON in prose or fences; take the outermost
        // brace pair before giving up.
        auto lo = content.find('{');
        auto hi = content.rfind('}');
        if (lo == std::string::npos || hi == std::string::npos || hi <= lo) {
            fail(Errc::malformed_response, "reply does not contain a JSON object");
        }
        try {
            j = nlohmann::json::parse(content.substr(lo, hi - lo + 1));
        } catch (const nlohmann::json::parse_error&) {
            fail(Errc::malformed_response, "reply does not contain parseable JSON");
        }
    }
    if (!j.is_object()) fail(Errc::malformed_response, "reply JSON is not an object");
    if (!j.contains("num_robots") || !j["num_robots"].is_number_integer()) {
        fail(Errc::malformed_response, "num_robots missing or not an integer");
    }
    if (!j.contains("search_strategy") || !j["search_strategy"].is_string()) {
        fail(Errc::malformed_response, "search_strategy missing or not a string");
    }
    if (!j.contains("transmission_scheme") || !j["transmission_scheme"].is_string()) {
        fail(Errc::malformed_response, "transmission_scheme missing or not a string");
    }
    long long robots = j["num_robots"].get<long long>();
    if (robots < 1) fail(Errc::malformed_response, "num_robots must be at least 1");

    Recommendation rec;
    rec.num_robots = static_cast<uint32_t>(robots);
    try {
        rec.search_strategy = search_strategy_from_name(j["search_strategy"].get<std::string>());
    } catch (const Error&) {
        fail(Errc::malformed_response, "search_strategy must be NearestFirst or SectorSweep");
    }
    std::string scheme = j["transmission_scheme"].get<std::string>();
    if (scheme == "SemCom") {
        rec.transmission_scheme = Branch::SemCom;
    } else if (scheme == "Raw") {
        rec.transmission_scheme = Branch::Raw;
    } else {
        fail(Errc::malformed_response, "transmission_scheme must be SemCom or Raw");
    }
    if (j.contains("rationale") && j["rationale"].is_string()) {
        rec.rationale = j["rationale"].get<std::string>();
    }
    validate_recommendation(rec, brief);
    return rec;
}

}  // namespace

ScenarioBrief brief(const ScenarioConfig& config) {
    validate(config);
    ScenarioBrief b;
    b.area_m2 = config.width_m * config.height_m;
    b.n_devices = config.n_devices;
    b.wall_count = static_cast<uint32_t>(config.walls.size());
    b.carrier_ghz = config.radio.carrier_ghz;
    b.bandwidth_mhz = config.radio.bandwidth_hz / 1e6;
    b.tx_power_dbm = config.radio.tx_power_dbm;
    b.objective =
        "classify every device as normal or abnormal by transmitting its sensed image, or a "
        "compressed representation of it, to the central server";
    b.max_robots = config.n_robots;
    b.duration_s = config.sim_duration_s;
    return b;
}

std::string render_prompt(const ScenarioBrief& brief) {
    std::ostringstream os;
    os << "Plan a robot deployment for this inspection scenario.\n"
       << "- area: " << fmt_number(brief.area_m2) << " m^2\n"
       << "- devices to inspect: " << brief.n_devices << "\n"
       << "- walls: " << brief.wall_count << "\n"
       << "- radio: carrier " << fmt_number(brief.carrier_ghz) << " GHz, bandwidth "
       << fmt_number(brief.bandwidth_mhz) << " MHz, tx power " << fmt_number(brief.tx_power_dbm)
       << " dBm\n"
       << "- objective: " << brief.objective << "\n"
       << "- constraints: at most " << brief.max_robots << " robots; finish within "
       << fmt_number(brief.duration_s) << " s\n"
       << "Answer with one JSON object: {\"num_robots\": <1.." << brief.max_robots
       << ">, \"search_strategy\": \"NearestFirst\"|\"SectorSweep\", "
          "\"transmission_scheme\": \"SemCom\"|\"Raw\", \"rationale\": \"...\"}";
    return os.str();
}

std::string search_strategy_name(SearchStrategy s) {
    return s == SearchStrategy::NearestFirst ? "NearestFirst" : "SectorSweep";
}

SearchStrategy search_strategy_from_name(const std::string& name) {
    if (name == "NearestFirst") return SearchStrategy::NearestFirst;
    if (name == "SectorSweep") return SearchStrategy::SectorSweep;
    fail(Errc::parse_error, "unknown search strategy '" + name + "'");
}

void validate_recommendation(const Recommendation& rec, const ScenarioBrief& brief) {
    if (rec.num_robots < 1 || rec.num_robots > brief.max_robots) {
        fail(Errc::malformed_response,
             "num_robots " + std::to_string(rec.num_robots) + " outside [1, " +
                 std::to_string(brief.max_robots) + "]");
    }
    if (rec.transmission_scheme == Branch::Both) {
        fail(Errc::malformed_response, "transmission_scheme must be SemCom or Raw");
    }
}

Recommendation plan_rule_based(const ScenarioBrief& brief) {
    uint32_t wanted = (brief.n_devices + 4) / 5;  // ceil(n/5)
    Recommendation rec;
    rec.num_robots = std::clamp<uint32_t>(wanted, 1, brief.max_robots);
    rec.search_strategy = SearchStrategy::NearestFirst;
    rec.transmission_scheme = Branch::SemCom;
    std::ostringstream os;
    os << "rule backend: ceil(" << brief.n_devices << " devices / 5) = " << wanted
       << " robots, clamped to " << rec.num_robots
       << "; nearest-first keeps travel short; SemCom latents minimize transmitted bits";
    rec.rationale = os.str();
    validate_recommendation(rec, brief);
    return rec;
}

std::optional<LlmEndpoint> endpoint_from_env() {
    const char* base = std::getenv("AGENT_LLM_BASE_URL");
    if (!base || *base == '\0') return std::nullopt;
    LlmEndpoint ep;
    ep.base_url = base;
    if (const char* key = std::getenv("AGENT_LLM_API_KEY")) ep.api_key = key;
    if (const char* model = std::getenv("AGENT_LLM_MODEL"); model && *model != '\0') {
        ep.model = model;
    }
    return ep;
}

PlanOutcome plan_llm(const ScenarioBrief& brief, const LlmEndpoint& endpoint) {
    PlanOutcome outcome;
    SplitUrl url = split_base_url(endpoint.base_url);
    std::string path = url.prefix + "/chat/completions";

    httplib::Client client(url.origin);
    auto seconds = static_cast<time_t>(endpoint.timeout_s);
    auto micros = static_cast<time_t>((endpoint.timeout_s - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers headers;
    if (!endpoint.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint.api_key);
        outcome.log.push_back("authorization: Bearer <redacted>");
    }

    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "system"}, {"content", kSystemPrompt}});
    messages.push_back({{"role", "user"}, {"content", render_prompt(brief)}});

    auto fallback = [&](const std::string& reason) {
        outcome.log.push_back("falling back to the rule backend: " + reason);
        outcome.rec = plan_rule_based(brief);
        outcome.used_fallback = true;
        return outcome;
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
        nlohmann::json request = {{"model", endpoint.model}, {"messages", messages}};
        std::string body = request.dump();
        outcome.log.push_back("POST " + url.origin + path + " body=" + body);

        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            return fallback("endpoint unreachable (" + httplib::to_string(res.error()) + ")");
        }
        if (res->status != 200) {
            return fallback("endpoint returned HTTP " + std::to_string(res->status));
        }
        outcome.log.push_back("response body=" + res->body);

        std::string content;
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            return fallback(std::string("response is not a chat completion: ") + e.what());
        }

        try {
            outcome.rec = parse_recommendation(content, brief);
            return outcome;
        } catch (const Error& e) {
            outcome.log.push_back(std::string("invalid recommendation: ") + e.what());
            if (attempt == 0) {
                messages.push_back({{"role", "assistant"}, {"content", content}});
                messages.push_back(
                    {{"role", "user"},
                     {"content", std::string("Your previous reply was invalid: ") + e.what() +
                                     ". Reply again with exactly one JSON object with keys "
                                     "num_robots, search_strategy, transmission_scheme, rationale "
                                     "and no other text."}});
            }
        }
    }
    return fallback("two invalid responses");
}

CommandSet emit_commands(const Recommendation& rec) {
    CommandSet cs;
    cs.task_commands.push_back("deploy " + std::to_string(rec.num_robots) + " robots");
    cs.task_commands.push_back("search strategy: " + search_strategy_name(rec.search_strategy));
    cs.task_commands.push_back("allocation policy: greedy minimum-path-cost pairing");
    cs.connectivity_commands.push_back("branch = " + branch_name(rec.transmission_scheme));
    cs.connectivity_commands.push_back("radio profile: default-indoor");
    return cs;
}

ScenarioConfig apply_commands(const Recommendation& rec, ScenarioConfig config) {
    config.n_robots = rec.num_robots;
    config.branch = rec.transmission_scheme;
    validate(config);
    return config;
}

}  // namespace semnet::agent
