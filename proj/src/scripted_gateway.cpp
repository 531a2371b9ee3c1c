#include "grounder/scripted_gateway.hpp"

#include "grounder/errors.hpp"
#include "grounder/util.hpp"

namespace grounder {

ScriptEntry ScriptEntry::reply(std::string text, std::int64_t latency_ms) {
    ScriptEntry e;
    e.kind = Kind::Reply;
    e.text = std::move(text);
    e.latency_ms = latency_ms;
    return e;
}

ScriptEntry ScriptEntry::error(const std::string& kind_name, int status, std::string body,
                               std::string detail) {
    ScriptEntry e;
    if (kind_name == "timeout") {
        e.kind = Kind::Timeout;
    } else if (kind_name == "transport") {
        e.kind = Kind::Transport;
    } else if (kind_name == "endpoint") {
        e.kind = Kind::Endpoint;
    } else if (kind_name == "image_encoding") {
        e.kind = Kind::ImageEncoding;
    } else {
        throw Error("unknown scripted error kind: " + kind_name);
    }
    e.status = status;
    e.body = std::move(body);
    e.detail = std::move(detail);
    return e;
}

ScriptEntry ScriptEntry::from_json(const nlohmann::json& j) {
    if (j.is_string()) return reply(j.get<std::string>());
    if (!j.is_object()) throw Error("script entry must be a string or object");
    if (j.contains("error")) {
        return error(j.at("error").get<std::string>(), j.value("status", 0), j.value("body", ""),
                     j.value("detail", ""));
    }
    return reply(j.at("reply").get<std::string>(), j.value("latency_ms", 0));
}

nlohmann::json ScriptEntry::to_json() const {
    switch (kind) {
        case Kind::Reply:
            if (latency_ms == 0) return text;
            return nlohmann::json{{"reply", text}, {"latency_ms", latency_ms}};
        case Kind::Timeout:
            return nlohmann::json{{"error", "timeout"}, {"detail", detail}};
        case Kind::Transport:
            return nlohmann::json{{"error", "transport"}, {"detail", detail}};
        case Kind::Endpoint:
            return nlohmann::json{{"error", "endpoint"}, {"status", status}, {"body", body}};
        case Kind::ImageEncoding:
            return nlohmann::json{{"error", "image_encoding"}, {"detail", detail}};
    }
    return nullptr;
}

Script script_from_json(const nlohmann::json& entries_by_endpoint) {
    if (!entries_by_endpoint.is_object()) {
        throw Error("script section must map endpoint ids to entry arrays");
    }
    Script script;
    for (auto it = entries_by_endpoint.begin(); it != entries_by_endpoint.end(); ++it) {
        std::vector<ScriptEntry> entries;
        for (const auto& entry : it.value()) entries.push_back(ScriptEntry::from_json(entry));
        script[it.key()] = std::move(entries);
    }
    return script;
}

ModelReply ScriptedGateway::send_chat(const EndpointConfig& cfg,
                                      const std::vector<ChatMessage>& messages) {
    if (messages.empty()) throw Error("send_chat requires at least one message");
    const ScriptEntry* entry = nullptr;
    std::size_t index = 0;
    {
        std::lock_guard<std::mutex> lock(mu_);
        index = cursor_[cfg.id]++;
        auto it = script_.find(cfg.id);
        if (it != script_.end() && index < it->second.size()) entry = &it->second[index];
    }
    if (entry == nullptr) {
        throw ScriptExhausted("no scripted entry for endpoint '" + cfg.id + "' call " +
                              std::to_string(index));
    }
    switch (entry->kind) {
        case ScriptEntry::Kind::Reply:
            return ModelReply{entry->text, entry->latency_ms, cfg.id};
        case ScriptEntry::Kind::Timeout:
            throw Timeout("scripted timeout: " + entry->detail);
        case ScriptEntry::Kind::Transport:
            throw TransportError("scripted transport error: " + entry->detail);
        case ScriptEntry::Kind::Endpoint:
            throw EndpointError(entry->status, entry->body);
        case ScriptEntry::Kind::ImageEncoding:
            throw ImageEncodingError("scripted image encoding error: " + entry->detail);
    }
    throw Error("unreachable");
}

std::size_t ScriptedGateway::calls(const std::string& endpoint_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cursor_.find(endpoint_id);
    return it == cursor_.end() ? 0 : it->second;
}

std::size_t ScriptedGateway::total_calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t total = 0;
    for (const auto& [_, n] : cursor_) total += n;
    return total;
}

ScriptLibrary ScriptLibrary::from_json(const nlohmann::json& j) {
    ScriptLibrary lib;
    if (j.contains("default")) {
        lib.default_ = script_from_json(j.at("default"));
        lib.has_default_ = true;
    }
    if (j.contains("episodes")) {
        const auto& eps = j.at("episodes");
        if (!eps.is_object()) throw Error("script 'episodes' must be an object");
        for (auto it = eps.begin(); it != eps.end(); ++it) {
            lib.episodes_[it.key()] = script_from_json(it.value());
        }
    }
    if (!lib.has_default_ && lib.episodes_.empty()) {
        throw Error("script file has neither 'default' nor 'episodes' sections");
    }
    return lib;
}

ScriptLibrary ScriptLibrary::from_file(const std::string& path) {
    auto text = read_file(path);
    if (!text) throw FileNotFound("script file not found: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(*text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("script file is not valid JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

Script ScriptLibrary::script_for(const std::string& episode_id) const {
    auto it = episodes_.find(episode_id);
    if (it != episodes_.end()) return it->second;
    if (has_default_) return default_;
    return {};  // the gateway will fail loudly on first use
}

bool ScriptLibrary::has_episode(const std::string& episode_id) const {
    return episodes_.count(episode_id) > 0 || has_default_;
}

}  // namespace grounder
