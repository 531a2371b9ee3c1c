#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "grounder/config.hpp"
#include "grounder/orchestrator.hpp"
#include "grounder/scripted_gateway.hpp"

namespace testsupport {

using namespace grounder;

inline EndpointConfig specialist(const std::string& id,
                                 CoordMode mode = CoordMode::AbsolutePixels) {
    EndpointConfig cfg;
    cfg.id = id;
    cfg.base_url = "http://localhost:9";
    cfg.model_name = id + "-model";
    cfg.role = EndpointRole::Specialist;
    cfg.coord.mode = mode;
    return cfg;
}

inline EndpointConfig general(const std::string& id = "general") {
    EndpointConfig cfg = specialist(id);
    cfg.role = EndpointRole::General;
    return cfg;
}

inline TaskSpec make_task(int width = 1000, int height = 1000,
                          const std::string& instruction = "find the widget") {
    TaskSpec task;
    task.instruction = instruction;
    task.screenshot = ScreenshotMeta{width, height, "", ImageFormat::Png};
    return task;
}

inline OrchestratorConfig three_specialist_config(
    EpisodeBudget budget = EpisodeBudget{}, int parallelism = 1) {
    OrchestratorConfig cfg;
    cfg.specialists = {specialist("alpha"), specialist("bravo"), specialist("charlie")};
    cfg.general = general();
    cfg.budget = budget;
    cfg.parallelism = parallelism;
    return cfg;
}

inline RunConfig three_specialist_run_config(EpisodeBudget budget = EpisodeBudget{},
                                             int parallelism = 1) {
    RunConfig cfg;
    cfg.endpoints = {specialist("alpha"), specialist("bravo"), specialist("charlie"), general()};
    cfg.budget = budget;
    cfg.parallelism = parallelism;
    return cfg;
}

// Fresh scratch directory under the system temp root.
inline std::string fresh_dir(const std::string& prefix) {
    static std::mt19937 rng(std::random_device{}());
    auto path = std::filesystem::temp_directory_path() /
                ("grounder_" + prefix + "_" + std::to_string(rng()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
    return path.string();
}

// Just enough of a PNG for the header reader: signature + IHDR dimensions.
inline void write_stub_png(const std::string& path, int width, int height) {
    static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(sig), 8);
    unsigned char len[4] = {0, 0, 0, 13};
    out.write(reinterpret_cast<const char*>(len), 4);
    out.write("IHDR", 4);
    auto be = [&](int v) {
        unsigned char b[4] = {static_cast<unsigned char>((v >> 24) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>(v & 0xff)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    be(width);
    be(height);
    const unsigned char rest[5] = {8, 2, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(rest), 5);
    const unsigned char crc[4] = {0, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(crc), 4);
}

inline Script make_script(const nlohmann::json& entries_by_endpoint) {
    return script_from_json(entries_by_endpoint);
}

struct ScriptedEpisode {
    EpisodeResult result;
    std::vector<TraceEvent> events;
    std::shared_ptr<ScriptedGateway> gateway;
};

// Runs one scripted episode with an in-memory trace (fixed clock) so tests
// can inspect events and call counts.
inline ScriptedEpisode run_scripted(const nlohmann::json& script, const Mode& mode,
                                    OrchestratorConfig cfg = three_specialist_config(),
                                    TaskSpec task = make_task(),
                                    const std::string& episode_id = "ep") {
    ScriptedEpisode out;
    out.gateway = std::make_shared<ScriptedGateway>(make_script(script));
    auto trace = TraceWriter::in_memory([] { return std::int64_t{0}; });
    EpisodeRunner runner(std::move(cfg), TemplateSet::defaults(), *out.gateway, trace);
    out.result = runner.try_run(task, mode, episode_id);
    out.events = trace->events();
    return out;
}

inline std::size_t count_events(const std::vector<TraceEvent>& events, TraceKind kind) {
    std::size_t n = 0;
    for (const auto& e : events) {
        if (e.kind == kind) ++n;
    }
    return n;
}

}  // namespace testsupport
