#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "grounder/chat.hpp"

namespace grounder {

// One scripted outcome for a (endpoint, call-index) slot: either a reply or
// an injected wire error.
struct ScriptEntry {
    enum class Kind { Reply, Timeout, Transport, Endpoint, ImageEncoding };
    Kind kind = Kind::Reply;
    std::string text;
    std::int64_t latency_ms = 0;
    int status = 0;        // Endpoint only
    std::string body;      // Endpoint only
    std::string detail;    // Timeout / Transport / ImageEncoding

    static ScriptEntry reply(std::string text, std::int64_t latency_ms = 0);
    static ScriptEntry error(const std::string& kind_name, int status = 0, std::string body = "",
                             std::string detail = "");
    static ScriptEntry from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

using Script = std::map<std::string, std::vector<ScriptEntry>>;

Script script_from_json(const nlohmann::json& entries_by_endpoint);

// Deterministic test double for the live gateway. Replies are looked up by
// (endpoint_id, per-endpoint call index); a lookup outside the script fails
// loudly with ScriptExhausted. Counter updates are serialized so replays
// are deterministic regardless of caller interleaving.
class ScriptedGateway : public Gateway {
public:
    ScriptedGateway() = default;
    explicit ScriptedGateway(Script script) : script_(std::move(script)) {}

    ModelReply send_chat(const EndpointConfig& cfg,
                         const std::vector<ChatMessage>& messages) override;

    std::size_t calls(const std::string& endpoint_id) const;
    std::size_t total_calls() const;

private:
    Script script_;
    mutable std::mutex mu_;
    std::map<std::string, std::size_t> cursor_;
};

// A script file for whole benchmark runs: an optional "default" section
// applied to any episode without its own entry, plus per-episode sections
// keyed by record id. Each episode gets a fresh ScriptedGateway, so
// record-level parallelism cannot skew per-endpoint call indices.
class ScriptLibrary {
public:
    ScriptLibrary() = default;
    static ScriptLibrary from_json(const nlohmann::json& j);
    static ScriptLibrary from_file(const std::string& path);

    Script script_for(const std::string& episode_id) const;
    bool has_episode(const std::string& episode_id) const;

private:
    Script default_;
    bool has_default_ = false;
    std::map<std::string, Script> episodes_;
};

}  // namespace grounder
