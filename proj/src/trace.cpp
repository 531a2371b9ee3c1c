#include "grounder/trace.hpp"

#include <algorithm>

#include "grounder/errors.hpp"
#include "grounder/util.hpp"

namespace grounder {

const char* trace_kind_name(TraceKind k) {
    switch (k) {
        case TraceKind::ModelCall:
            return "model_call";
        case TraceKind::ParseResult:
            return "parse_result";
        case TraceKind::StateTransition:
            return "state_transition";
        case TraceKind::FinalAction:
            return "final_action";
    }
    return "state_transition";
}

TraceKind trace_kind_from_string(const std::string& s) {
    if (s == "model_call") return TraceKind::ModelCall;
    if (s == "parse_result") return TraceKind::ParseResult;
    if (s == "state_transition") return TraceKind::StateTransition;
    if (s == "final_action") return TraceKind::FinalAction;
    throw Error("unknown trace event kind: " + s);
}

nlohmann::json TraceEvent::to_json() const {
    return nlohmann::json{{"episode_id", episode_id},
                          {"seq", seq},
                          {"kind", trace_kind_name(kind)},
                          {"payload", payload},
                          {"ts_ms", ts_ms}};
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
    TraceEvent e;
    e.episode_id = j.at("episode_id").get<std::string>();
    e.seq = j.at("seq").get<int>();
    e.kind = trace_kind_from_string(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    e.ts_ms = j.value("ts_ms", 0);
    return e;
}

std::shared_ptr<TraceWriter> TraceWriter::to_file(const std::string& path, Clock clock) {
    auto w = std::shared_ptr<TraceWriter>(new TraceWriter());
    w->out_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
    if (!*w->out_) throw Error("cannot open trace file for writing: " + path);
    w->clock_ = clock ? std::move(clock) : Clock(now_ms);
    w->path_ = path;
    return w;
}

std::shared_ptr<TraceWriter> TraceWriter::in_memory(Clock clock) {
    auto w = std::shared_ptr<TraceWriter>(new TraceWriter());
    w->keep_in_memory_ = true;
    w->clock_ = clock ? std::move(clock) : Clock(now_ms);
    return w;
}

std::shared_ptr<TraceWriter> TraceWriter::null() {
    auto w = std::shared_ptr<TraceWriter>(new TraceWriter());
    w->discard_ = true;
    w->clock_ = [] { return std::int64_t{0}; };
    return w;
}

void TraceWriter::append(const std::string& episode_id, int seq, TraceKind kind,
                         nlohmann::json payload) {
    if (discard_) return;
    TraceEvent e;
    e.episode_id = episode_id;
    e.seq = seq;
    e.kind = kind;
    e.payload = std::move(payload);

    std::lock_guard<std::mutex> lock(mu_);
    e.ts_ms = clock_();
    if (out_) {
        *out_ << e.to_json().dump() << '\n';
        out_->flush();
    }
    if (keep_in_memory_) memory_.push_back(std::move(e));
}

std::vector<TraceEvent> TraceWriter::events() const {
    std::lock_guard<std::mutex> lock(mu_);
    return memory_;
}

void EpisodeTracer::emit(TraceKind kind, nlohmann::json payload) {
    int seq;
    {
        std::lock_guard<std::mutex> lock(mu_);
        seq = next_seq_++;
    }
    writer_->append(episode_id_, seq, kind, std::move(payload));
}

std::vector<TraceEvent> read_trace(const std::string& path) {
    auto text = read_file(path);
    if (!text) throw FileNotFound("trace file not found: " + path);
    std::vector<TraceEvent> events;
    int line_no = 0;
    for (const auto& line : split_lines(*text)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            events.push_back(TraceEvent::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error("trace line " + std::to_string(line_no) + " is not valid: " + e.what());
        }
    }
    return events;
}

std::vector<TraceEvent> episode_events(const std::vector<TraceEvent>& all,
                                       const std::string& episode_id) {
    std::vector<TraceEvent> out;
    for (const auto& e : all) {
        if (e.episode_id == episode_id) out.push_back(e);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.seq < b.seq; });
    return out;
}

std::vector<std::string> episode_ids(const std::vector<TraceEvent>& all) {
    std::vector<std::string> ids;
    for (const auto& e : all) {
        if (std::find(ids.begin(), ids.end(), e.episode_id) == ids.end()) {
            ids.push_back(e.episode_id);
        }
    }
    return ids;
}

}  // namespace grounder
