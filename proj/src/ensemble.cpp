#include "grounder/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <thread>

#include "grounder/errors.hpp"
#include "grounder/parse.hpp"
#include "grounder/util.hpp"

namespace grounder {

const char* platform_name(Platform p) {
    switch (p) {
        case Platform::Web:
            return "web";
        case Platform::Desktop:
            return "desktop";
        case Platform::Mobile:
            return "mobile";
        case Platform::Unknown:
            return "unknown";
    }
    return "unknown";
}

Platform platform_from_string(const std::string& s) {
    std::string v;
    for (char c : s) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (v == "web") return Platform::Web;
    if (v == "desktop" || v == "windows" || v == "macos" || v == "linux") return Platform::Desktop;
    if (v == "mobile" || v == "android" || v == "ios") return Platform::Mobile;
    // ScreenSpot web splits label records by site kind rather than platform.
    if (v == "gitlab" || v == "shop" || v == "forum" || v == "tool") return Platform::Web;
    return Platform::Unknown;
}

const char* element_type_name(ElementType e) {
    switch (e) {
        case ElementType::Button:
            return "button";
        case ElementType::Icon:
            return "icon";
        case ElementType::Dropdown:
            return "dropdown";
        case ElementType::Input:
            return "input";
        case ElementType::Toggle:
            return "toggle";
        case ElementType::Text:
            return "text";
        case ElementType::Other:
            return "other";
    }
    return "other";
}

std::optional<ElementType> element_type_from_string(const std::string& s) {
    std::string v;
    for (char c : s) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (v.empty()) return std::nullopt;
    if (v == "button") return ElementType::Button;
    if (v == "icon") return ElementType::Icon;
    if (v == "dropdown") return ElementType::Dropdown;
    if (v == "input") return ElementType::Input;
    if (v == "toggle") return ElementType::Toggle;
    if (v == "text") return ElementType::Text;
    return ElementType::Other;
}

void TaskSpec::validate() const {
    if (trim(instruction).empty()) throw Error("task instruction must be non-empty");
    if (!screenshot.valid()) throw Error("screenshot dimensions must be positive");
    if (gt_box) {
        if (!gt_box->valid()) throw Error("gt_box is not a valid box");
        if (gt_box->x2 > screenshot.width || gt_box->y2 > screenshot.height) {
            throw Error("gt_box exceeds screenshot bounds");
        }
    }
}

std::string coord_frame_text(const CoordConvention& conv) {
    return conv.mode == CoordMode::AbsolutePixels
               ? "(x, y) in absolute pixels"
               : "(x, y) on a 0-1000 grid normalized to the screenshot";
}

std::vector<ChatMessage> build_observation_prompt(const TaskSpec& task, const EndpointConfig& cfg,
                                                  const TemplateSet& templates,
                                                  const std::optional<ReflectionHint>& hint) {
    std::string user_text = templates.render("observer_user", {{"instruction", task.instruction}});
    if (hint) {
        user_text += "\n" + templates.render("observer_hint", {{"hint", hint->instruction}});
    }
    return {
        system_msg(templates.render("observer_system",
                                    {{"coord_frame", coord_frame_text(cfg.coord)}})),
        user_msg(std::move(user_text), {task.screenshot}),
    };
}

ChatMessage build_hint_turn(const ReflectionHint& hint, const TemplateSet& templates) {
    return user_msg(templates.render("observer_hint", {{"hint", hint.instruction}}));
}

Observation parse_observation(const ModelReply& reply, const EndpointConfig& cfg,
                              const ScreenshotMeta& meta, int round) {
    Observation obs;
    obs.specialist_id = cfg.id;
    obs.raw_text = reply.text;
    obs.round = round;
    obs.candidate = try_parse_point(reply.text, cfg.coord, meta);
    obs.description = elide_coordinates(reply.text);
    return obs;
}

std::string gateway_error_tag(const std::exception& e) {
    if (dynamic_cast<const Timeout*>(&e)) return "timeout";
    if (dynamic_cast<const EndpointError*>(&e)) return "endpoint";
    if (dynamic_cast<const ImageEncodingError*>(&e)) return "image_encoding";
    if (dynamic_cast<const TransportError*>(&e)) return "transport";
    return "error";
}

namespace {

// The single specialist query: extends the session transcript and replaces
// its latest observation. ScriptExhausted propagates; a script hole is a
// harness defect, not a simulated wire failure.
ObservationCall query_session(SpecialistSession& session, const TaskSpec& task,
                              const std::optional<ReflectionHint>& hint, Gateway& gw,
                              const TemplateSet& templates, int round) {
    if (round == 0) {
        session.transcript = build_observation_prompt(task, session.cfg, templates, std::nullopt);
    } else if (hint) {
        session.transcript.push_back(build_hint_turn(*hint, templates));
    } else {
        session.transcript.push_back(user_msg(templates.render("observer_requery", {})));
    }

    ObservationCall call;
    call.endpoint_id = session.cfg.id;
    call.round = round;
    call.request = session.transcript;
    try {
        ModelReply reply = gw.send_chat(session.cfg, session.transcript);
        session.transcript.push_back(assistant_msg(reply.text));
        session.latest = parse_observation(reply, session.cfg, task.screenshot, round);
        call.reply = std::move(reply);
    } catch (const ScriptExhausted&) {
        throw;
    } catch (const GatewayError& e) {
        Observation obs;
        obs.specialist_id = session.cfg.id;
        obs.round = round;
        obs.error = gateway_error_tag(e);
        session.latest = std::move(obs);
        call.error = gateway_error_tag(e);
    }
    return call;
}

}  // namespace

ObserveOutcome observe_round(const TaskSpec& task, std::vector<SpecialistSession>& sessions,
                             const std::vector<ReflectionHint>& hints, Gateway& gw,
                             const TemplateSet& templates, int round, int parallelism,
                             bool requery_all) {
    std::vector<std::optional<ReflectionHint>> hint_for(sessions.size());
    std::vector<std::size_t> targets;
    if (round == 0) {
        for (std::size_t i = 0; i < sessions.size(); ++i) targets.push_back(i);
    } else {
        for (std::size_t i = 0; i < sessions.size(); ++i) {
            for (const auto& h : hints) {
                if (h.specialist_id == sessions[i].cfg.id) {
                    hint_for[i] = h;
                    break;
                }
            }
            if (hint_for[i] || requery_all) targets.push_back(i);
        }
    }

    std::vector<ObservationCall> calls(targets.size());
    if (parallelism <= 1 || targets.size() <= 1) {
        for (std::size_t t = 0; t < targets.size(); ++t) {
            calls[t] = query_session(sessions[targets[t]], task, hint_for[targets[t]], gw,
                                     templates, round);
        }
    } else {
        // Bounded fan-out; results land at fixed slots so assembly is a
        // deterministic join regardless of completion order.
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mu;
        auto worker = [&]() {
            while (true) {
                std::size_t t = next.fetch_add(1);
                if (t >= targets.size()) return;
                try {
                    calls[t] = query_session(sessions[targets[t]], task, hint_for[targets[t]], gw,
                                             templates, round);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        };
        std::size_t n_workers = std::min<std::size_t>(targets.size(),
                                                      static_cast<std::size_t>(parallelism));
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) workers.emplace_back(worker);
        for (auto& w : workers) w.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    ObserveOutcome out;
    out.calls = std::move(calls);
    out.observations.reserve(sessions.size());
    bool any_ok = false;
    for (auto& session : sessions) {
        if (!session.latest) {
            // Only possible if a session was never queried in round 0,
            // which the target selection above rules out.
            throw Error("session has no observation: " + session.cfg.id);
        }
        if (!session.latest->errored()) any_ok = true;
        out.observations.push_back(*session.latest);
    }
    out.all_errored = !any_ok;
    return out;
}

std::vector<Observation> observe_all(const TaskSpec& task,
                                     std::vector<SpecialistSession>& sessions,
                                     const std::vector<ReflectionHint>& hints, Gateway& gw,
                                     const TemplateSet& templates, int round, int parallelism) {
    if (sessions.empty()) throw Error("observe_all requires at least one specialist");
    auto outcome = observe_round(task, sessions, hints, gw, templates, round, parallelism);
    if (outcome.all_errored) {
        throw AllSpecialistsFailed("every specialist errored in round " + std::to_string(round));
    }
    return std::move(outcome.observations);
}

}  // namespace grounder
