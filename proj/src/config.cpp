#include "grounder/config.hpp"

#include "grounder/errors.hpp"
#include "grounder/json_codec.hpp"
#include "grounder/util.hpp"

namespace grounder {

using nlohmann::json;

const EndpointConfig& RunConfig::general() const {
    for (const auto& e : endpoints) {
        if (e.role == EndpointRole::General) return e;
    }
    throw ConfigParseError("endpoints", "no general endpoint configured");
}

std::vector<EndpointConfig> RunConfig::specialists() const {
    std::vector<EndpointConfig> out;
    for (const auto& e : endpoints) {
        if (e.role == EndpointRole::Specialist) out.push_back(e);
    }
    return out;
}

OrchestratorConfig RunConfig::orchestrator_config() const {
    OrchestratorConfig cfg;
    cfg.specialists = specialists();
    cfg.general = general();
    cfg.budget = budget;
    cfg.parallelism = parallelism;
    cfg.attach_screenshot_to_general = attach_screenshot_to_general;
    cfg.reflection_requeries_all = reflection_requeries_all;
    return cfg;
}

Mode RunConfig::resolve_mode(const Mode& m) const {
    if (m.kind != Mode::Kind::Single || !m.specialist_id.empty()) return m;
    std::string id = single_specialist_id;
    if (id.empty()) id = specialists().front().id;
    return Mode::single(id);
}

void RunConfig::validate() const {
    int generals = 0;
    int specialist_count = 0;
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        const auto& e = endpoints[i];
        const std::string path = "endpoints[" + std::to_string(i) + "]";
        if (trim(e.id).empty()) throw ConfigParseError(path + ".id", "must be non-empty");
        for (std::size_t k = 0; k < i; ++k) {
            if (endpoints[k].id == e.id) {
                throw ConfigParseError(path + ".id", "duplicate endpoint id '" + e.id + "'");
            }
        }
        if (e.timeout_ms <= 0) throw ConfigParseError(path + ".timeout_ms", "must be > 0");
        if (e.max_retries < 0) throw ConfigParseError(path + ".max_retries", "must be >= 0");
        if (e.max_output_tokens <= 0) {
            throw ConfigParseError(path + ".max_output_tokens", "must be > 0");
        }
        if (e.role == EndpointRole::General) {
            ++generals;
        } else {
            ++specialist_count;
        }
    }
    if (generals != 1) throw ConfigParseError("endpoints", "exactly one general role");
    if (specialist_count < 1) throw ConfigParseError("endpoints", "at least one specialist role");
    if (parallelism < 1) throw ConfigParseError("parallelism", "must be >= 1");
    if (budget.max_reflection_rounds < 0) {
        throw ConfigParseError("budget.max_reflection_rounds", "must be >= 0");
    }
    if (!single_specialist_id.empty()) {
        bool found = false;
        for (const auto& s : specialists()) found = found || s.id == single_specialist_id;
        if (!found) {
            throw ConfigParseError("single_specialist_id",
                                   "names no configured specialist: " + single_specialist_id);
        }
    }
    if (mode.kind == Mode::Kind::Single && !mode.specialist_id.empty()) {
        bool found = false;
        for (const auto& s : specialists()) found = found || s.id == mode.specialist_id;
        if (!found) {
            throw ConfigParseError("mode", "single mode names no configured specialist: " +
                                               mode.specialist_id);
        }
    }
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    if (!j.contains("endpoints") || !j.at("endpoints").is_array()) {
        throw ConfigParseError("endpoints", "required array is missing");
    }
    std::size_t idx = 0;
    for (const auto& e : j.at("endpoints")) {
        try {
            cfg.endpoints.push_back(endpoint_from_json(e));
        } catch (const std::exception& ex) {
            throw ConfigParseError("endpoints[" + std::to_string(idx) + "]", ex.what());
        }
        ++idx;
    }
    if (j.contains("budget")) {
        const auto& b = j.at("budget");
        cfg.budget.max_reflection_rounds = b.value("max_reflection_rounds", 2);
        try {
            cfg.budget.fallback =
                fallback_policy_from_string(b.value("fallback", "general_best_guess"));
        } catch (const std::exception& ex) {
            throw ConfigParseError("budget.fallback", ex.what());
        }
    }
    if (j.contains("mode")) {
        try {
            cfg.mode = Mode::parse(j.at("mode").get<std::string>());
        } catch (const std::exception& ex) {
            throw ConfigParseError("mode", ex.what());
        }
    }
    cfg.parallelism = j.value("parallelism", 4);
    cfg.template_dir = j.value("template_dir", "");
    cfg.trace_path = j.value("trace_path", "trace.jsonl");
    cfg.attach_screenshot_to_general = j.value("attach_screenshot_to_general", true);
    cfg.reflection_requeries_all = j.value("reflection_requeries_all", false);
    cfg.single_specialist_id = j.value("single_specialist_id", "");
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    auto text = read_file(path);
    if (!text) throw FileNotFound("config file not found: " + path);
    json j;
    try {
        j = json::parse(*text);
    } catch (const json::exception& e) {
        throw ConfigParseError("<root>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace grounder
