#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "grounder/chat.hpp"
#include "grounder/orchestrator.hpp"

namespace grounder {

// Full run configuration: exactly one general endpoint, at least one
// specialist.
struct RunConfig {
    std::vector<EndpointConfig> endpoints;
    EpisodeBudget budget;
    Mode mode = Mode::full();
    int parallelism = 4;
    std::string template_dir;
    std::string trace_path = "trace.jsonl";
    bool attach_screenshot_to_general = true;
    bool reflection_requeries_all = false;
    std::string single_specialist_id;  // default for single mode; empty = first specialist

    const EndpointConfig& general() const;
    std::vector<EndpointConfig> specialists() const;
    OrchestratorConfig orchestrator_config() const;

    // Resolves "single" with no id against the configured default.
    Mode resolve_mode(const Mode& m) const;

    void validate() const;  // throws ConfigParseError with a field path
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace grounder
