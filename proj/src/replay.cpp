#include "grounder/replay.hpp"

#include "grounder/errors.hpp"
#include "grounder/json_codec.hpp"
#include "grounder/scripted_gateway.hpp"

namespace grounder {

using nlohmann::json;

namespace {

EpisodeOutcome replay_events(const std::vector<TraceEvent>& events,
                             const std::string& episode_id) {
    if (events.empty()) throw TraceIncomplete("episode '" + episode_id + "' has no events");

    const TraceEvent& start = events.front();
    if (start.kind != TraceKind::StateTransition || !start.payload.contains("episode")) {
        throw TraceIncomplete("episode '" + episode_id + "' is missing its start event");
    }
    const json& episode = start.payload.at("episode");

    TaskSpec task = task_from_json(episode.at("task"));
    Mode mode = Mode::parse(episode.at("mode").get<std::string>());

    OrchestratorConfig cfg;
    cfg.budget.max_reflection_rounds =
        episode.at("budget").at("max_reflection_rounds").get<int>();
    cfg.budget.fallback =
        fallback_policy_from_string(episode.at("budget").at("fallback").get<std::string>());
    cfg.attach_screenshot_to_general = episode.value("attach_screenshot_to_general", true);
    cfg.reflection_requeries_all = episode.value("reflection_requeries_all", false);
    cfg.parallelism = 1;
    bool have_general = false;
    for (const auto& e : episode.at("endpoints")) {
        EndpointConfig ep = endpoint_from_json(e);
        if (ep.role == EndpointRole::General) {
            cfg.general = ep;
            have_general = true;
        } else {
            cfg.specialists.push_back(ep);
        }
    }
    if (!have_general || cfg.specialists.empty()) {
        throw TraceIncomplete("episode '" + episode_id + "' records an unusable endpoint set");
    }

    Script script;
    const json* final_action = nullptr;
    for (const auto& event : events) {
        if (event.kind == TraceKind::ModelCall) {
            const json& p = event.payload;
            std::string endpoint = p.at("endpoint_id").get<std::string>();
            if (p.contains("reply") && !p.at("reply").is_null()) {
                script[endpoint].push_back(
                    ScriptEntry::reply(p.at("reply").at("text").get<std::string>(),
                                       p.at("reply").value("latency_ms", std::int64_t{0})));
            } else {
                const json& err = p.at("error");
                script[endpoint].push_back(ScriptEntry::error(
                    err.value("kind", "transport"), err.value("status", 0), err.value("body", ""),
                    err.value("detail", "")));
            }
        } else if (event.kind == TraceKind::FinalAction) {
            final_action = &event.payload;
        }
    }
    if (final_action == nullptr) {
        throw TraceIncomplete("episode '" + episode_id + "' never reached a final action");
    }
    Point recorded_point = point_from_json(final_action->at("action").at("point"));
    int recorded_rounds = final_action->at("rounds_used").get<int>();

    ScriptedGateway gw{std::move(script)};
    EpisodeRunner runner(cfg, TemplateSet::defaults(), gw, TraceWriter::null());
    EpisodeResult rerun;
    try {
        rerun = runner.try_run(task, mode, episode_id);
    } catch (const Error& e) {
        throw ReplayDivergence("episode '" + episode_id +
                               "' failed during replay: " + e.what());
    }
    if (!rerun.ok()) {
        throw ReplayDivergence("episode '" + episode_id + "' replayed into failure '" +
                               rerun.failure + "' but the trace records a final action");
    }
    if (rerun.outcome->final_action.point != recorded_point ||
        rerun.outcome->rounds_used != recorded_rounds) {
        throw ReplayDivergence(
            "episode '" + episode_id + "' diverged: recorded " + format_point(recorded_point) +
            " in " + std::to_string(recorded_rounds) + " rounds, replayed " +
            format_point(rerun.outcome->final_action.point) + " in " +
            std::to_string(rerun.outcome->rounds_used) + " rounds");
    }
    return *rerun.outcome;
}

}  // namespace

EpisodeOutcome replay_episode(const std::string& trace_path, const std::string& episode_id) {
    auto all = read_trace(trace_path);
    std::string id = episode_id;
    if (id.empty()) {
        auto ids = episode_ids(all);
        if (ids.empty()) throw TraceIncomplete("trace file has no events: " + trace_path);
        if (ids.size() > 1) {
            throw Error("trace holds " + std::to_string(ids.size()) +
                        " episodes; pass an episode id");
        }
        id = ids.front();
    }
    return replay_events(episode_events(all, id), id);
}

std::vector<EpisodeOutcome> replay_all(const std::string& trace_path) {
    auto all = read_trace(trace_path);
    std::vector<EpisodeOutcome> outcomes;
    for (const auto& id : episode_ids(all)) {
        outcomes.push_back(replay_events(episode_events(all, id), id));
    }
    return outcomes;
}

}  // namespace grounder
