#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace grounder {

enum class TraceKind { ModelCall, ParseResult, StateTransition, FinalAction };

const char* trace_kind_name(TraceKind k);
TraceKind trace_kind_from_string(const std::string& s);

struct TraceEvent {
    std::string episode_id;
    int seq = 0;
    TraceKind kind = TraceKind::StateTransition;
    nlohmann::json payload;
    std::int64_t ts_ms = 0;

    nlohmann::json to_json() const;
    static TraceEvent from_json(const nlohmann::json& j);
};

// Append-only JSONL sink shared by concurrent episodes. Appends are
// serialized and flushed per line, so a crashed run leaves a prefix that is
// itself a readable (incomplete) trace. Per-episode event order is carried
// by the seq field; cross-episode interleaving is unspecified.
class TraceWriter {
public:
    using Clock = std::function<std::int64_t()>;

    static std::shared_ptr<TraceWriter> to_file(const std::string& path, Clock clock = {});
    static std::shared_ptr<TraceWriter> in_memory(Clock clock = {});
    static std::shared_ptr<TraceWriter> null();

    void append(const std::string& episode_id, int seq, TraceKind kind, nlohmann::json payload);

    // In-memory sink only.
    std::vector<TraceEvent> events() const;

    const std::string& path() const { return path_; }

private:
    TraceWriter() = default;
    mutable std::mutex mu_;
    std::unique_ptr<std::ofstream> out_;
    std::vector<TraceEvent> memory_;
    bool keep_in_memory_ = false;
    bool discard_ = false;
    Clock clock_;
    std::string path_;
};

// Per-episode event emitter: hands out strictly increasing sequence numbers
// and forwards to the shared writer.
class EpisodeTracer {
public:
    EpisodeTracer(std::shared_ptr<TraceWriter> writer, std::string episode_id)
        : writer_(std::move(writer)), episode_id_(std::move(episode_id)) {}

    void emit(TraceKind kind, nlohmann::json payload);
    const std::string& episode_id() const { return episode_id_; }

private:
    std::shared_ptr<TraceWriter> writer_;
    std::string episode_id_;
    std::mutex mu_;
    int next_seq_ = 0;
};

// Reads a JSONL trace file; lines that do not parse raise Error with their
// line number.
std::vector<TraceEvent> read_trace(const std::string& path);

// Events of one episode, in seq order.
std::vector<TraceEvent> episode_events(const std::vector<TraceEvent>& all,
                                       const std::string& episode_id);

std::vector<std::string> episode_ids(const std::vector<TraceEvent>& all);

}  // namespace grounder
