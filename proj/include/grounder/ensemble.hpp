#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grounder/chat.hpp"
#include "grounder/geometry.hpp"
#include "grounder/templates.hpp"

namespace grounder {

enum class Platform { Web, Desktop, Mobile, Unknown };

enum class ElementType { Button, Icon, Dropdown, Input, Toggle, Text, Other };

const char* platform_name(Platform p);
Platform platform_from_string(const std::string& s);
const char* element_type_name(ElementType e);
std::optional<ElementType> element_type_from_string(const std::string& s);

// One grounding episode's input: an instruction against a screenshot, plus
// evaluation metadata when the task comes from a benchmark.
struct TaskSpec {
    std::string instruction;
    ScreenshotMeta screenshot;
    Platform platform = Platform::Unknown;
    std::optional<ElementType> element_type;
    std::optional<BBox> gt_box;

    void validate() const;  // throws Error on an invariant breach
};

// One specialist's structured report. Exactly one of {candidate present,
// error present, description-only} characterizes an observation.
struct Observation {
    std::string specialist_id;
    std::optional<Point> candidate;
    std::string description;
    std::string raw_text;  // byte-identical to the gateway reply
    int round = 0;
    std::optional<std::string> error;

    bool errored() const { return error.has_value(); }
};

struct ReflectionHint {
    std::string specialist_id;
    std::string instruction;
    bool operator==(const ReflectionHint&) const = default;
};

// Per-episode conversation state for one specialist. Reflection rounds
// extend the transcript rather than restarting it.
struct SpecialistSession {
    EndpointConfig cfg;
    std::vector<ChatMessage> transcript;
    std::optional<Observation> latest;
};

/// System + user message pair opening a specialist conversation. The system
/// message fixes the output contract; the user message carries the
/// screenshot and instruction, and the hint text as a directive when a hint
/// is given.
std::vector<ChatMessage> build_observation_prompt(const TaskSpec& task, const EndpointConfig& cfg,
                                                  const TemplateSet& templates,
                                                  const std::optional<ReflectionHint>& hint = {});

/// Reflection-round user turn appended to an existing specialist
/// conversation; the hint instruction is included verbatim.
ChatMessage build_hint_turn(const ReflectionHint& hint, const TemplateSet& templates);

/// Human-readable name of the coordinate frame, for prompt text.
std::string coord_frame_text(const CoordConvention& conv);

/// Parses one specialist reply into an Observation: candidate when the
/// coordinate grammar matches, description with coordinate expressions
/// elided, raw text preserved verbatim. Parse failure is encoded in the
/// Observation, never raised.
Observation parse_observation(const ModelReply& reply, const EndpointConfig& cfg,
                              const ScreenshotMeta& meta, int round);

// Record of one fan-out gateway call, kept so the caller can emit trace
// events in deterministic session order after the concurrent join.
struct ObservationCall {
    std::string endpoint_id;
    int round = 0;
    std::vector<ChatMessage> request;
    std::optional<ModelReply> reply;
    std::optional<std::string> error;  // gateway error tag
};

struct ObserveOutcome {
    std::vector<Observation> observations;  // one per session, session order
    std::vector<ObservationCall> calls;     // queried sessions only, session order
    bool all_errored = false;
};

/// Fans the task out across sessions. Round 0 (empty hints) queries every
/// session; later rounds query only hinted sessions and carry the other
/// sessions' latest observations forward, unless requery_all re-queries
/// unhinted sessions with a generic re-examine turn. Per-session transport
/// failures degrade into error observations; all_errored is set when no
/// resulting observation is usable.
ObserveOutcome observe_round(const TaskSpec& task, std::vector<SpecialistSession>& sessions,
                             const std::vector<ReflectionHint>& hints, Gateway& gw,
                             const TemplateSet& templates, int round, int parallelism,
                             bool requery_all = false);

/// Contract-shaped wrapper over observe_round: throws AllSpecialistsFailed
/// when every specialist errors.
std::vector<Observation> observe_all(const TaskSpec& task,
                                     std::vector<SpecialistSession>& sessions,
                                     const std::vector<ReflectionHint>& hints, Gateway& gw,
                                     const TemplateSet& templates, int round = 0,
                                     int parallelism = 4);

/// Maps a gateway exception to the short tag stored in observations and
/// traces ("timeout", "transport", "endpoint", "image_encoding").
std::string gateway_error_tag(const std::exception& e);

}  // namespace grounder
