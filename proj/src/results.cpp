#include "grounder/results.hpp"

#include "grounder/errors.hpp"
#include "grounder/json_codec.hpp"
#include "grounder/util.hpp"

namespace grounder {

using nlohmann::json;

json eval_result_to_json(const EvalResult& r) {
    json j;
    j["record_id"] = r.record_id;
    j["mode"] = r.mode.label();
    j["predicted"] = r.predicted ? point_to_json(*r.predicted) : json(nullptr);
    j["hit"] = r.hit;
    j["rounds_used"] = r.rounds_used;
    json hits = json::object();
    for (const auto& [id, hit] : r.specialist_hits) hits[id] = hit;
    j["specialist_hits"] = hits;
    j["latency_ms"] = r.latency_ms;
    j["platform"] = platform_name(r.platform);
    j["element_type"] = r.element_type ? json(element_type_name(*r.element_type)) : json(nullptr);
    j["failure"] = r.failure;
    return j;
}

EvalResult eval_result_from_json(const json& j) {
    EvalResult r;
    r.record_id = j.at("record_id").get<std::string>();
    r.mode = Mode::parse(j.at("mode").get<std::string>());
    if (!j.at("predicted").is_null()) r.predicted = point_from_json(j.at("predicted"));
    r.hit = j.at("hit").get<bool>();
    r.rounds_used = j.value("rounds_used", 0);
    for (auto it = j.at("specialist_hits").begin(); it != j.at("specialist_hits").end(); ++it) {
        r.specialist_hits[it.key()] = it.value().get<bool>();
    }
    r.latency_ms = j.value("latency_ms", std::int64_t{0});
    r.platform = platform_from_string(j.value("platform", "unknown"));
    if (j.contains("element_type") && !j.at("element_type").is_null()) {
        r.element_type = element_type_from_string(j.at("element_type").get<std::string>());
    }
    r.failure = j.value("failure", "");
    return r;
}

std::string render_results_jsonl(const std::vector<EvalResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += eval_result_to_json(r).dump();
        out += '\n';
    }
    return out;
}

void write_results_jsonl(const std::string& path, const std::vector<EvalResult>& results) {
    write_file(path, render_results_jsonl(results));
}

std::vector<EvalResult> read_results_jsonl(const std::string& path) {
    auto text = read_file(path);
    if (!text) throw FileNotFound("results file not found: " + path);
    std::vector<EvalResult> out;
    int line_no = 0;
    for (const auto& line : split_lines(*text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(eval_result_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw SchemaError(line_no, std::string("invalid results line: ") + e.what());
        }
    }
    return out;
}

}  // namespace grounder
