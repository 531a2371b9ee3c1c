#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grounder/geometry.hpp"

namespace grounder {

enum class MsgRole { System, User, Assistant };

// One turn of a chat-completions conversation. Images attach only to User
// messages.
struct ChatMessage {
    MsgRole role = MsgRole::User;
    std::string text;
    std::vector<ScreenshotMeta> images;
};

inline ChatMessage system_msg(std::string text) {
    return ChatMessage{MsgRole::System, std::move(text), {}};
}

inline ChatMessage user_msg(std::string text, std::vector<ScreenshotMeta> images = {}) {
    return ChatMessage{MsgRole::User, std::move(text), std::move(images)};
}

inline ChatMessage assistant_msg(std::string text) {
    return ChatMessage{MsgRole::Assistant, std::move(text), {}};
}

struct ModelReply {
    std::string text;
    std::int64_t latency_ms = 0;
    std::string endpoint_id;
};

enum class EndpointRole { Specialist, General };

// Where and how to call one model.
struct EndpointConfig {
    std::string id;
    std::string base_url;
    std::string model_name;
    EndpointRole role = EndpointRole::Specialist;
    CoordConvention coord;
    std::int64_t timeout_ms = 60000;
    int max_retries = 2;
    int max_output_tokens = 512;
    double temperature = 0.0;
};

// Uniform client surface. The live HTTP gateway and the scripted gateway
// are interchangeable behind this interface; a gateway value may be shared
// across concurrent callers.
class Gateway {
public:
    virtual ~Gateway() = default;
    virtual ModelReply send_chat(const EndpointConfig& cfg,
                                 const std::vector<ChatMessage>& messages) = 0;
};

const char* msg_role_name(MsgRole r);

}  // namespace grounder
