#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grounder/ensemble.hpp"
#include "grounder/orchestrator.hpp"

namespace grounder {

// Scored outcome of one benchmark episode. predicted is absent when the
// episode failed; such records count as misses. specialist_hits holds one
// entry per specialist that produced a round-0 candidate, hit-tested
// against the ground-truth box.
struct EvalResult {
    std::string record_id;
    Mode mode;
    std::optional<Point> predicted;
    bool hit = false;
    int rounds_used = 0;
    std::map<std::string, bool> specialist_hits;
    std::int64_t latency_ms = 0;
    Platform platform = Platform::Unknown;
    std::optional<ElementType> element_type;
    std::string failure;  // "" when the episode produced an action
};

nlohmann::json eval_result_to_json(const EvalResult& r);
EvalResult eval_result_from_json(const nlohmann::json& j);

// results.jsonl: one EvalResult per line, dataset order. Deterministic
// byte-for-byte for a fixed result list.
std::string render_results_jsonl(const std::vector<EvalResult>& results);
void write_results_jsonl(const std::string& path, const std::vector<EvalResult>& results);
std::vector<EvalResult> read_results_jsonl(const std::string& path);

}  // namespace grounder
