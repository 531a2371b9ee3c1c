#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "grounder/chat.hpp"
#include "grounder/ensemble.hpp"
#include "grounder/templates.hpp"
#include "grounder/trace.hpp"

namespace grounder {

// What to do when reflection is unavailable or exhausted.
enum class FallbackPolicy { GeneralBestGuess, FirstSpecialistCandidate };

const char* fallback_policy_name(FallbackPolicy p);
FallbackPolicy fallback_policy_from_string(const std::string& s);

struct EpisodeBudget {
    int max_reflection_rounds = 2;
    FallbackPolicy fallback = FallbackPolicy::GeneralBestGuess;
};

// Execution mode: a single specialist, joint reasoning without reflection,
// or the full pipeline with reflection.
struct Mode {
    enum class Kind { Single, Joint, Full };
    Kind kind = Kind::Full;
    std::string specialist_id;  // Single only

    static Mode single(std::string id);
    static Mode joint();
    static Mode full();

    std::string label() const;  // "single:<id>" | "joint" | "full"
    static Mode parse(const std::string& label);

    bool operator==(const Mode&) const = default;
};

// Outcome of one reasoning turn: either a concrete action or a reflection
// request with per-specialist instructions.
struct Decision {
    enum class Kind { Act, Reflect };
    Kind kind = Kind::Act;
    std::optional<GuiAction> action;        // Act only
    std::vector<ReflectionHint> hints;      // Reflect only, non-empty
    std::string rationale;
};

/// Parses a general-model reply in the closed decision grammar:
///   DECISION: CLICK(x, y)
///   REFLECT:\n<specialist_id>: <instruction>   (one line per specialist)
/// Whichever keyword appears first wins; rationale is the text preceding
/// it. Unknown specialist ids in REFLECT are dropped with a warning; a
/// REFLECT that drops to empty is a parse failure.
Decision parse_decision(const std::string& text, const ScreenshotMeta& meta,
                        const std::vector<std::string>& specialist_ids,
                        std::vector<std::string>* warnings = nullptr);

/// Canonical renderer: parse_decision(format_decision(d)) == d for every
/// valid decision.
std::string format_decision(const Decision& d);

/// "SPECIALIST <id>: <description> candidate=<(x, y)|none>", or
/// "SPECIALIST <id>: UNAVAILABLE" for an errored observation.
std::string render_observation_line(const Observation& obs);

/// Extends the general model's conversation with this round's analysis
/// request. An empty prior transcript starts the conversation (system
/// message; screenshot attached when enabled). Prior rounds' turns are
/// preserved in order.
std::vector<ChatMessage> build_reasoning_dialogue(const TaskSpec& task,
                                                  const std::vector<Observation>& observations,
                                                  const std::vector<ChatMessage>& prior_turns,
                                                  const TemplateSet& templates,
                                                  bool attach_screenshot, int round);

/// The decision-request turn that follows the model's analysis reply.
ChatMessage build_decision_turn(const std::vector<std::string>& specialist_ids,
                                const TemplateSet& templates);

struct EpisodeOutcome {
    GuiAction final_action;
    int rounds_used = 0;
    Mode mode;
    std::string trace_ref;
};

// Non-throwing episode result; failure carries a stable tag instead of an
// exception so benchmark runs can score failed episodes as misses.
struct EpisodeResult {
    std::optional<EpisodeOutcome> outcome;
    std::string failure;         // "" | "episode_failed" | "all_specialists_failed"
    std::string failure_detail;
    std::vector<Observation> round0;
    std::int64_t reply_latency_ms = 0;

    bool ok() const { return outcome.has_value(); }
};

struct OrchestratorConfig {
    std::vector<EndpointConfig> specialists;  // configuration order
    EndpointConfig general;
    EpisodeBudget budget;
    int parallelism = 4;
    bool attach_screenshot_to_general = true;
    // When set, reflection rounds re-query every specialist (unhinted ones
    // get a generic re-examine turn) instead of only the hinted ones.
    bool reflection_requeries_all = false;
};

// Drives one episode through the Observe -> Reason -> {Act | Reflect strand}
// state machine, bounded by the budget. Every model call and transition is
// appended to the trace before the episode returns; with a scripted gateway
// the whole episode is a pure function of its script.
class EpisodeRunner {
public:
    EpisodeRunner(OrchestratorConfig cfg, TemplateSet templates, Gateway& gw,
                  std::shared_ptr<TraceWriter> trace);

    EpisodeResult try_run(const TaskSpec& task, const Mode& mode, const std::string& episode_id);

    /// Contract-shaped wrapper: throws EpisodeFailed / AllSpecialistsFailed.
    EpisodeOutcome run(const TaskSpec& task, const Mode& mode, const std::string& episode_id);

private:
    OrchestratorConfig cfg_;
    TemplateSet templates_;
    Gateway& gw_;
    std::shared_ptr<TraceWriter> trace_;
};

}  // namespace grounder
