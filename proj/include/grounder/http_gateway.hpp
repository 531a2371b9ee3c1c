#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "grounder/chat.hpp"

namespace grounder {

// Outcome of one wire attempt, before retry policy is applied.
struct WireResult {
    bool timeout = false;
    bool transport_error = false;
    int status = 0;
    std::string body;
    std::string detail;
};

// Low-level transport, injectable for tests. The default implementation
// POSTs to {base_url}/chat/completions over cpp-httplib.
using WireFn = std::function<WireResult(const EndpointConfig&, const std::string& json_body)>;

// OpenAI-compatible chat-completions client with base64 data-URL image
// attachments. Transport failures (timeouts included) are retried with
// exponential backoff up to max_retries; a well-formed error response from
// the endpoint is never retried.
class HttpGateway : public Gateway {
public:
    explicit HttpGateway(WireFn wire = {},
                         std::chrono::milliseconds backoff_base = std::chrono::milliseconds(250));

    ModelReply send_chat(const EndpointConfig& cfg,
                         const std::vector<ChatMessage>& messages) override;

    // Request construction is exposed so tests can pin the JSON shape.
    static std::string build_request_body(const EndpointConfig& cfg,
                                          const std::vector<ChatMessage>& messages);

    // GROUNDER_API_KEY_<ID> (id uppercased, non-alphanumerics mapped to _),
    // falling back to GROUNDER_API_KEY.
    static std::string bearer_env_var(const std::string& endpoint_id);
    static std::string bearer_token(const std::string& endpoint_id);

private:
    WireFn wire_;
    std::chrono::milliseconds backoff_base_;
};

}  // namespace grounder
