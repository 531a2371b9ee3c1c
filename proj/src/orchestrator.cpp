#include "grounder/orchestrator.hpp"

#include <cmath>
#include <cstring>
#include <regex>

#include "grounder/errors.hpp"
#include "grounder/json_codec.hpp"
#include "grounder/parse.hpp"
#include "grounder/util.hpp"

namespace grounder {

using nlohmann::json;

const char* fallback_policy_name(FallbackPolicy p) {
    return p == FallbackPolicy::GeneralBestGuess ? "general_best_guess"
                                                 : "first_specialist_candidate";
}

FallbackPolicy fallback_policy_from_string(const std::string& s) {
    if (s == "general_best_guess") return FallbackPolicy::GeneralBestGuess;
    if (s == "first_specialist_candidate") return FallbackPolicy::FirstSpecialistCandidate;
    throw Error("unknown fallback policy: " + s);
}

Mode Mode::single(std::string id) { return Mode{Kind::Single, std::move(id)}; }
Mode Mode::joint() { return Mode{Kind::Joint, ""}; }
Mode Mode::full() { return Mode{Kind::Full, ""}; }

std::string Mode::label() const {
    switch (kind) {
        case Kind::Single:
            return "single:" + specialist_id;
        case Kind::Joint:
            return "joint";
        case Kind::Full:
            return "full";
    }
    return "full";
}

Mode Mode::parse(const std::string& label) {
    if (label == "joint") return joint();
    if (label == "full") return full();
    if (label == "single") return single("");
    if (label.rfind("single:", 0) == 0) return single(label.substr(7));
    throw Error("unknown mode: " + label + " (expected single[:<id>], joint, or full)");
}

Decision parse_decision(const std::string& text, const ScreenshotMeta& meta,
                        const std::vector<std::string>& specialist_ids,
                        std::vector<std::string>* warnings) {
    static const char* kDecision = "DECISION:";
    static const char* kReflect = "REFLECT:";
    auto dpos = text.find(kDecision);
    auto rpos = text.find(kReflect);
    if (dpos == std::string::npos && rpos == std::string::npos) {
        throw DecisionParseError("reply contains neither DECISION: nor REFLECT:");
    }

    bool is_act = dpos != std::string::npos && (rpos == std::string::npos || dpos < rpos);
    if (is_act) {
        Decision d;
        d.kind = Decision::Kind::Act;
        d.rationale = trim(text.substr(0, dpos));
        std::string rest = text.substr(dpos + std::strlen(kDecision));
        static const std::regex click_re(
            R"(^\s*CLICK\s*\(\s*([-+]?\d+(?:\.\d+)?)\s*,\s*([-+]?\d+(?:\.\d+)?)\s*\))");
        std::smatch m;
        if (!std::regex_search(rest, m, click_re)) {
            throw DecisionParseError("DECISION must be followed by CLICK(x, y)");
        }
        Point p{static_cast<int>(std::llround(std::stod(m[1]))),
                static_cast<int>(std::llround(std::stod(m[2])))};
        d.action = GuiAction{GuiAction::Kind::Click, clamp_to_screen(p, meta)};
        return d;
    }

    Decision d;
    d.kind = Decision::Kind::Reflect;
    d.rationale = trim(text.substr(0, rpos));
    std::string rest = text.substr(rpos + std::strlen(kReflect));
    static const std::regex hint_re(R"(^\s*([A-Za-z0-9_.\-]+)\s*:\s*(\S.*)$)");
    for (const std::string& line : split_lines(rest)) {
        if (trim(line).empty()) continue;
        std::smatch m;
        if (!std::regex_match(line, m, hint_re)) break;  // end of the hint block
        std::string id = m[1];
        bool known = false;
        for (const auto& s : specialist_ids) {
            if (s == id) {
                known = true;
                break;
            }
        }
        if (known) {
            d.hints.push_back(ReflectionHint{id, trim(m[2])});
        } else if (warnings != nullptr) {
            warnings->push_back("unknown specialist id '" + id + "' in REFLECT dropped");
        }
    }
    if (d.hints.empty()) {
        throw DecisionParseError("REFLECT names no known specialist");
    }
    return d;
}

std::string format_decision(const Decision& d) {
    std::string out;
    if (!d.rationale.empty()) out = d.rationale + "\n";
    if (d.kind == Decision::Kind::Act) {
        const Point p = d.action->point;
        out += "DECISION: CLICK(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
    } else {
        out += "REFLECT:";
        for (const auto& h : d.hints) out += "\n" + h.specialist_id + ": " + h.instruction;
    }
    return out;
}

std::string render_observation_line(const Observation& obs) {
    if (obs.errored()) return "SPECIALIST " + obs.specialist_id + ": UNAVAILABLE";
    std::string desc = obs.description.empty() ? "(no description)" : obs.description;
    std::string cand = obs.candidate ? format_point(*obs.candidate) : "none";
    return "SPECIALIST " + obs.specialist_id + ": " + desc + " candidate=" + cand;
}

std::vector<ChatMessage> build_reasoning_dialogue(const TaskSpec& task,
                                                  const std::vector<Observation>& observations,
                                                  const std::vector<ChatMessage>& prior_turns,
                                                  const TemplateSet& templates,
                                                  bool attach_screenshot, int round) {
    bool any_usable = false;
    for (const auto& o : observations) any_usable = any_usable || !o.errored();
    if (!any_usable) throw Error("reasoning requires at least one non-errored observation");

    std::vector<ChatMessage> out = prior_turns;
    bool opening = out.empty();
    if (opening) out.push_back(system_msg(templates.render("reasoner_system", {})));

    std::string reports;
    for (const auto& o : observations) {
        if (!reports.empty()) reports += "\n";
        reports += render_observation_line(o);
    }
    std::string text = templates.render("analysis_request", {{"instruction", task.instruction},
                                                             {"round", std::to_string(round)},
                                                             {"reports", reports}});
    std::vector<ScreenshotMeta> images;
    if (opening && attach_screenshot) images.push_back(task.screenshot);
    out.push_back(user_msg(std::move(text), std::move(images)));
    return out;
}

ChatMessage build_decision_turn(const std::vector<std::string>& specialist_ids,
                                const TemplateSet& templates) {
    std::string ids;
    for (const auto& id : specialist_ids) {
        if (!ids.empty()) ids += ", ";
        ids += id;
    }
    return user_msg(templates.render("decision_request", {{"specialist_ids", ids}}));
}

namespace {

struct EpisodeState {
    const OrchestratorConfig& cfg;
    const TemplateSet& templates;
    Gateway& gw;
    EpisodeTracer tracer;
    const TaskSpec& task;
    Mode mode;
    EpisodeResult result;

    std::vector<SpecialistSession> sessions;
    std::vector<std::string> specialist_ids;
    std::vector<ChatMessage> general_transcript;
    std::vector<std::vector<Observation>> history;  // observations per observation round
    std::vector<Observation> current;
    int reflections = 0;
};

void emit_transition(EpisodeState& st, const std::string& from, const std::string& to, int round,
                     json extra = json::object()) {
    extra["from"] = from;
    extra["to"] = to;
    extra["round"] = round;
    st.tracer.emit(TraceKind::StateTransition, std::move(extra));
}

json model_call_payload(const std::string& endpoint_id, int round,
                        const std::vector<ChatMessage>& request) {
    json payload;
    payload["endpoint_id"] = endpoint_id;
    payload["round"] = round;
    payload["request"] = messages_to_json(request);
    return payload;
}

json gateway_error_json(const std::exception& e) {
    json err;
    err["kind"] = gateway_error_tag(e);
    err["detail"] = e.what();
    if (const auto* ep = dynamic_cast<const EndpointError*>(&e)) {
        err["status"] = ep->status();
        err["body"] = ep->body();
    }
    return err;
}

void emit_observation_round(EpisodeState& st, const ObserveOutcome& outcome) {
    for (const auto& call : outcome.calls) {
        json payload = model_call_payload(call.endpoint_id, call.round, call.request);
        if (call.reply) {
            payload["reply"] = {{"text", call.reply->text}, {"latency_ms", call.reply->latency_ms}};
            payload["error"] = nullptr;
            st.result.reply_latency_ms += call.reply->latency_ms;
        } else {
            payload["reply"] = nullptr;
            payload["error"] = {{"kind", call.error.value_or("error")}};
        }
        st.tracer.emit(TraceKind::ModelCall, std::move(payload));
    }
    for (const auto& obs : outcome.observations) {
        json payload;
        payload["stage"] = "observation";
        payload["endpoint_id"] = obs.specialist_id;
        payload["round"] = obs.round;
        payload["candidate"] = obs.candidate ? point_to_json(*obs.candidate) : json(nullptr);
        payload["error"] = obs.error ? json(*obs.error) : json(nullptr);
        st.tracer.emit(TraceKind::ParseResult, std::move(payload));
    }
}

// One traced general-model call over the current transcript. Gateway errors
// are recorded and folded into nullopt so the caller can degrade.
std::optional<ModelReply> general_call(EpisodeState& st, int round) {
    json payload = model_call_payload(st.cfg.general.id, round, st.general_transcript);
    try {
        ModelReply reply = st.gw.send_chat(st.cfg.general, st.general_transcript);
        payload["reply"] = {{"text", reply.text}, {"latency_ms", reply.latency_ms}};
        payload["error"] = nullptr;
        st.tracer.emit(TraceKind::ModelCall, std::move(payload));
        st.result.reply_latency_ms += reply.latency_ms;
        st.general_transcript.push_back(assistant_msg(reply.text));
        return reply;
    } catch (const ScriptExhausted&) {
        throw;
    } catch (const GatewayError& e) {
        payload["reply"] = nullptr;
        payload["error"] = gateway_error_json(e);
        st.tracer.emit(TraceKind::ModelCall, std::move(payload));
        return std::nullopt;
    }
}

void emit_decision_parse(EpisodeState& st, int round, const Decision* d,
                         const std::string& error, const std::vector<std::string>& warnings) {
    json payload;
    payload["stage"] = "decision";
    payload["round"] = round;
    payload["ok"] = d != nullptr;
    payload["warnings"] = warnings;
    if (d != nullptr) {
        payload["kind"] = d->kind == Decision::Kind::Act ? "act" : "reflect";
        payload["point"] = d->action ? point_to_json(d->action->point) : json(nullptr);
        json hints = json::array();
        for (const auto& h : d->hints) {
            hints.push_back({{"specialist_id", h.specialist_id}, {"instruction", h.instruction}});
        }
        payload["hints"] = hints;
        payload["error"] = nullptr;
    } else {
        payload["kind"] = nullptr;
        payload["point"] = nullptr;
        payload["hints"] = nullptr;
        payload["error"] = error;
    }
    st.tracer.emit(TraceKind::ParseResult, std::move(payload));
}

void finalize(EpisodeState& st, const GuiAction& action, int rounds_used) {
    st.tracer.emit(TraceKind::FinalAction,
                   json{{"action", {{"kind", "click"}, {"point", point_to_json(action.point)}}},
                        {"rounds_used", rounds_used}});
    st.result.outcome =
        EpisodeOutcome{action, rounds_used, st.mode, st.tracer.episode_id()};
}

void fail(EpisodeState& st, const std::string& from, int round, const std::string& tag,
          const std::string& detail) {
    emit_transition(st, from, "failed", round, json{{"reason", detail}});
    st.result.failure = tag;
    st.result.failure_detail = detail;
}

// Earliest non-errored candidate: observation rounds in ascending order,
// configuration order within a round.
std::optional<Point> first_specialist_candidate(const EpisodeState& st) {
    for (const auto& round_obs : st.history) {
        for (const auto& obs : round_obs) {
            if (!obs.errored() && obs.candidate) return obs.candidate;
        }
    }
    return std::nullopt;
}

void run_fallback(EpisodeState& st, int round, const std::string& reason) {
    emit_transition(st, "reason", "fallback", round,
                    json{{"policy", fallback_policy_name(st.cfg.budget.fallback)},
                         {"reason", reason}});
    if (st.cfg.budget.fallback == FallbackPolicy::GeneralBestGuess) {
        st.general_transcript.push_back(
            user_msg(st.templates.render("best_guess_request", {})));
        auto reply = general_call(st, round);
        if (!reply) {
            fail(st, "fallback", round, "episode_failed", "general endpoint unavailable");
            return;
        }
        std::vector<std::string> warnings;
        try {
            Decision d =
                parse_decision(reply->text, st.task.screenshot, st.specialist_ids, &warnings);
            emit_decision_parse(st, round, &d, "", warnings);
            if (d.kind != Decision::Kind::Act) {
                fail(st, "fallback", round, "episode_failed",
                     "best-guess reply was REFLECT, not CLICK");
                return;
            }
            emit_transition(st, "fallback", "act", round);
            finalize(st, *d.action, round);
        } catch (const DecisionParseError& e) {
            emit_decision_parse(st, round, nullptr, e.what(), warnings);
            fail(st, "fallback", round, "episode_failed",
                 std::string("best-guess reply unparseable: ") + e.what());
        }
        return;
    }

    if (auto p = first_specialist_candidate(st)) {
        emit_transition(st, "fallback", "act", round);
        finalize(st, GuiAction{GuiAction::Kind::Click, *p}, round);
        return;
    }
    fail(st, "fallback", round, "episode_failed", "no specialist candidate available");
}

void run_single(EpisodeState& st) {
    auto outcome = observe_round(st.task, st.sessions, {}, st.gw, st.templates, 0, 1);
    emit_observation_round(st, outcome);
    st.history.push_back(outcome.observations);
    st.result.round0 = outcome.observations;
    Observation obs = outcome.observations[0];

    if (!obs.candidate) {
        // One retry: nudge the specialist for an explicit coordinate.
        auto& session = st.sessions[0];
        session.transcript.push_back(user_msg(st.templates.render(
            "observer_nudge", {{"coord_frame", coord_frame_text(session.cfg.coord)}})));
        json payload = model_call_payload(session.cfg.id, 0, session.transcript);
        try {
            ModelReply reply = st.gw.send_chat(session.cfg, session.transcript);
            payload["reply"] = {{"text", reply.text}, {"latency_ms", reply.latency_ms}};
            payload["error"] = nullptr;
            st.tracer.emit(TraceKind::ModelCall, std::move(payload));
            st.result.reply_latency_ms += reply.latency_ms;
            session.transcript.push_back(assistant_msg(reply.text));
            obs = parse_observation(reply, session.cfg, st.task.screenshot, 0);
        } catch (const ScriptExhausted&) {
            throw;
        } catch (const GatewayError& e) {
            payload["reply"] = nullptr;
            payload["error"] = gateway_error_json(e);
            st.tracer.emit(TraceKind::ModelCall, std::move(payload));
            obs = Observation{};
            obs.specialist_id = session.cfg.id;
            obs.error = gateway_error_tag(e);
        }
        json parse_payload;
        parse_payload["stage"] = "observation";
        parse_payload["endpoint_id"] = obs.specialist_id;
        parse_payload["round"] = 0;
        parse_payload["candidate"] = obs.candidate ? point_to_json(*obs.candidate) : json(nullptr);
        parse_payload["error"] = obs.error ? json(*obs.error) : json(nullptr);
        st.tracer.emit(TraceKind::ParseResult, std::move(parse_payload));
        st.result.round0 = {obs};
    }

    if (obs.candidate) {
        emit_transition(st, "observe", "act", 0);
        finalize(st, GuiAction{GuiAction::Kind::Click, *obs.candidate}, 1);
        return;
    }
    fail(st, "observe", 0, "episode_failed", "specialist produced no candidate after retry");
}

void run_joint_or_full(EpisodeState& st) {
    auto round0 = observe_round(st.task, st.sessions, {}, st.gw, st.templates, 0,
                                st.cfg.parallelism);
    emit_observation_round(st, round0);
    st.history.push_back(round0.observations);
    st.result.round0 = round0.observations;
    if (round0.all_errored) {
        fail(st, "observe", 0, "all_specialists_failed", "every specialist errored in round 0");
        return;
    }
    st.current = round0.observations;

    for (int round = 1;; ++round) {
        emit_transition(st, "observe", "reason", round);

        st.general_transcript = build_reasoning_dialogue(
            st.task, st.current, st.general_transcript, st.templates,
            st.cfg.attach_screenshot_to_general, round);
        if (!general_call(st, round)) {
            run_fallback(st, round, "general_unavailable");
            return;
        }

        st.general_transcript.push_back(build_decision_turn(st.specialist_ids, st.templates));
        auto decision_reply = general_call(st, round);
        if (!decision_reply) {
            run_fallback(st, round, "general_unavailable");
            return;
        }

        std::optional<Decision> decision;
        std::vector<std::string> warnings;
        try {
            decision = parse_decision(decision_reply->text, st.task.screenshot,
                                      st.specialist_ids, &warnings);
            emit_decision_parse(st, round, &*decision, "", warnings);
        } catch (const DecisionParseError& e) {
            emit_decision_parse(st, round, nullptr, e.what(), warnings);
            // One re-ask with the parse error quoted back.
            st.general_transcript.push_back(user_msg(
                st.templates.render("decision_retry", {{"error", e.what()}})));
            auto retry_reply = general_call(st, round);
            if (!retry_reply) {
                run_fallback(st, round, "general_unavailable");
                return;
            }
            warnings.clear();
            try {
                decision = parse_decision(retry_reply->text, st.task.screenshot,
                                          st.specialist_ids, &warnings);
                emit_decision_parse(st, round, &*decision, "", warnings);
            } catch (const DecisionParseError& e2) {
                emit_decision_parse(st, round, nullptr, e2.what(), warnings);
            }
        }
        if (!decision) {
            run_fallback(st, round, "decision_parse_failed");
            return;
        }

        if (decision->kind == Decision::Kind::Act) {
            emit_transition(st, "reason", "act", round);
            finalize(st, *decision->action, round);
            return;
        }

        if (st.mode.kind == Mode::Kind::Joint) {
            run_fallback(st, round, "reflection_disabled");
            return;
        }
        if (st.reflections >= st.cfg.budget.max_reflection_rounds) {
            run_fallback(st, round, "budget_exhausted");
            return;
        }
        st.reflections++;

        json hints_json = json::array();
        for (const auto& h : decision->hints) {
            hints_json.push_back(
                {{"specialist_id", h.specialist_id}, {"instruction", h.instruction}});
        }
        emit_transition(st, "reason", "reflect", round, json{{"hints", hints_json}});

        auto reflected = observe_round(st.task, st.sessions, decision->hints, st.gw,
                                       st.templates, round, st.cfg.parallelism,
                                       st.cfg.reflection_requeries_all);
        emit_observation_round(st, reflected);
        st.history.push_back(reflected.observations);
        emit_transition(st, "reflect", "observe", round);
        if (reflected.all_errored) {
            fail(st, "observe", round, "all_specialists_failed",
                 "every specialist errored after reflection");
            return;
        }
        st.current = reflected.observations;
    }
}

}  // namespace

EpisodeRunner::EpisodeRunner(OrchestratorConfig cfg, TemplateSet templates, Gateway& gw,
                             std::shared_ptr<TraceWriter> trace)
    : cfg_(std::move(cfg)), templates_(std::move(templates)), gw_(gw), trace_(std::move(trace)) {
    if (cfg_.specialists.empty()) throw ConfigError("at least one specialist is required");
    if (cfg_.general.role != EndpointRole::General) {
        throw ConfigError("general endpoint must have role=general");
    }
}

EpisodeResult EpisodeRunner::try_run(const TaskSpec& task, const Mode& mode,
                                     const std::string& episode_id) {
    task.validate();

    EpisodeState st{cfg_, templates_, gw_, EpisodeTracer(trace_, episode_id), task, mode, {},
                    {},   {},         {},  {},                                {},   0};

    if (mode.kind == Mode::Kind::Single) {
        const EndpointConfig* chosen = nullptr;
        for (const auto& s : cfg_.specialists) {
            if (s.id == mode.specialist_id) chosen = &s;
        }
        if (chosen == nullptr) {
            throw ConfigError("single mode names unknown specialist '" + mode.specialist_id +
                              "'");
        }
        st.sessions.push_back(SpecialistSession{*chosen, {}, {}});
        st.specialist_ids.push_back(chosen->id);
    } else {
        for (const auto& s : cfg_.specialists) {
            st.sessions.push_back(SpecialistSession{s, {}, {}});
            st.specialist_ids.push_back(s.id);
        }
    }

    json episode;
    episode["task"] = task_to_json(task);
    episode["mode"] = mode.label();
    episode["budget"] = {{"max_reflection_rounds", cfg_.budget.max_reflection_rounds},
                         {"fallback", fallback_policy_name(cfg_.budget.fallback)}};
    json endpoints = json::array();
    for (const auto& s : cfg_.specialists) endpoints.push_back(endpoint_to_json(s));
    endpoints.push_back(endpoint_to_json(cfg_.general));
    episode["endpoints"] = endpoints;
    episode["attach_screenshot_to_general"] = cfg_.attach_screenshot_to_general;
    episode["reflection_requeries_all"] = cfg_.reflection_requeries_all;
    emit_transition(st, "init", "observe", 0, json{{"episode", episode}});

    if (mode.kind == Mode::Kind::Single) {
        run_single(st);
    } else {
        run_joint_or_full(st);
    }
    return std::move(st.result);
}

EpisodeOutcome EpisodeRunner::run(const TaskSpec& task, const Mode& mode,
                                  const std::string& episode_id) {
    EpisodeResult result = try_run(task, mode, episode_id);
    if (result.ok()) return *result.outcome;
    if (result.failure == "all_specialists_failed") {
        throw AllSpecialistsFailed(result.failure_detail);
    }
    throw EpisodeFailed(result.failure_detail);
}

}  // namespace grounder
