#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace semnet::agent {

// Structured scenario summary handed to the planner backends. Derived from
// the config only; carries no free-form user input.
struct ScenarioBrief {
    double area_m2 = 0.0;
    uint32_t n_devices = 0;
    uint32_t wall_count = 0;
    double carrier_ghz = 0.0;
    double bandwidth_mhz = 0.0;
    double tx_power_dbm = 0.0;
    std::string objective;
    uint32_t max_robots = 0;  // fleet size available to deploy
    double duration_s = 0.0;

    bool operator==(const ScenarioBrief&) const = default;
};

ScenarioBrief brief(const ScenarioConfig& config);

// Deterministic prompt text for the chat backend; pure in the brief.
std::string render_prompt(const ScenarioBrief& brief);

enum class SearchStrategy : uint8_t { NearestFirst = 0, SectorSweep = 1 };

std::string search_strategy_name(SearchStrategy s);
SearchStrategy search_strategy_from_name(const std::string& name);

struct Recommendation {
    uint32_t num_robots = 1;
    SearchStrategy search_strategy = SearchStrategy::NearestFirst;
    Branch transmission_scheme = Branch::SemCom;  // SemCom or Raw only
    std::string rationale;

    bool operator==(const Recommendation&) const = default;
};

// Throws Errc::malformed_response when the recommendation violates its
// invariants against the brief.
void validate_recommendation(const Recommendation& rec, const ScenarioBrief& brief);

// ceil(n_devices / 5) robots clamped to [1, max_robots], nearest-first
// search, SemCom transmission.
Recommendation plan_rule_based(const ScenarioBrief& brief);

struct LlmEndpoint {
    std::string base_url;  // e.g. http://localhost:8080/v1
    std::string api_key;
    std::string model = "default";
    double timeout_s = 30.0;
};

// Reads AGENT_LLM_BASE_URL / AGENT_LLM_API_KEY (and optional
// AGENT_LLM_MODEL); nullopt when no base URL is configured.
std::optional<LlmEndpoint> endpoint_from_env();

struct PlanOutcome {
    Recommendation rec;
    bool used_fallback = false;
    std::vector<std::string> log;  // request/response trail, key redacted
};

// Chat-completion backend: sends the rendered brief, expects one JSON
// object {num_robots, search_strategy, transmission_scheme, rationale}.
// An invalid response earns one corrective retry; any remaining failure
// falls back to plan_rule_based.
PlanOutcome plan_llm(const ScenarioBrief& brief, const LlmEndpoint& endpoint);

struct CommandSet {
    std::vector<std::string> task_commands;
    std::vector<std::string> connectivity_commands;
};

CommandSet emit_commands(const Recommendation& rec);

// Applies the recommendation's commands to a config (robot count and
// branch) and validates the result.
ScenarioConfig apply_commands(const Recommendation& rec, ScenarioConfig config);

}  // namespace semnet::agent
