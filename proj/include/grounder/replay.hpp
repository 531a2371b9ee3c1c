#pragma once

#include <string>
#include <vector>

#include "grounder/orchestrator.hpp"

namespace grounder {

/// Reconstructs a ScriptedGateway from the replies recorded in a trace and
/// re-runs the episode; the re-run outcome must equal the recorded final
/// action. Throws TraceIncomplete when the episode never reached a final
/// action, ReplayDivergence when the re-run disagrees (which signals either
/// a tampered trace or a nondeterminism bug).
EpisodeOutcome replay_episode(const std::string& trace_path, const std::string& episode_id = "");

/// Replays every complete episode in a (possibly multiplexed) trace file.
std::vector<EpisodeOutcome> replay_all(const std::string& trace_path);

}  // namespace grounder
