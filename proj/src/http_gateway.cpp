#include "grounder/http_gateway.hpp"

#include <cctype>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "grounder/errors.hpp"
#include "grounder/util.hpp"

namespace grounder {

namespace {

using nlohmann::json;

// Splits "http://host:port/v1" into client base and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

WireResult default_wire(const EndpointConfig& cfg, const std::string& body) {
    auto [base, prefix] = split_base_url(cfg.base_url);
    httplib::Client client(base);
    client.set_connection_timeout(std::chrono::milliseconds(cfg.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(cfg.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(cfg.timeout_ms));

    httplib::Headers headers;
    std::string token = HttpGateway::bearer_token(cfg.id);
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto res = client.Post(prefix + "/chat/completions", headers, body, "application/json");
    WireResult out;
    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout) {
            out.timeout = true;
            out.detail = "connection timed out";
        } else {
            out.transport_error = true;
            out.detail = httplib::to_string(res.error());
        }
        return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
}

json encode_image_part(const ScreenshotMeta& image) {
    auto bytes = read_file(image.image_ref);
    if (!bytes) {
        throw ImageEncodingError("cannot read image: " +
                                 (image.image_ref.empty() ? "<empty ref>" : image.image_ref));
    }
    std::string mime = image.format == ImageFormat::Png ? "image/png" : "image/jpeg";
    json part;
    part["type"] = "image_url";
    part["image_url"] = {{"url", "data:" + mime + ";base64," + base64_encode(*bytes)}};
    return part;
}

}  // namespace

HttpGateway::HttpGateway(WireFn wire, std::chrono::milliseconds backoff_base)
    : wire_(wire ? std::move(wire) : default_wire), backoff_base_(backoff_base) {}

std::string HttpGateway::build_request_body(const EndpointConfig& cfg,
                                            const std::vector<ChatMessage>& messages) {
    json body;
    body["model"] = cfg.model_name;
    body["temperature"] = cfg.temperature;
    body["max_tokens"] = cfg.max_output_tokens;
    json msgs = json::array();
    for (const auto& m : messages) {
        json jm;
        jm["role"] = msg_role_name(m.role);
        if (m.images.empty()) {
            jm["content"] = m.text;
        } else {
            json parts = json::array();
            parts.push_back({{"type", "text"}, {"text", m.text}});
            for (const auto& img : m.images) parts.push_back(encode_image_part(img));
            jm["content"] = parts;
        }
        msgs.push_back(jm);
    }
    body["messages"] = msgs;
    return body.dump();
}

std::string HttpGateway::bearer_env_var(const std::string& endpoint_id) {
    std::string suffix;
    for (char c : endpoint_id) {
        suffix.push_back(std::isalnum(static_cast<unsigned char>(c))
                             ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                             : '_');
    }
    return "GROUNDER_API_KEY_" + suffix;
}

std::string HttpGateway::bearer_token(const std::string& endpoint_id) {
    if (auto v = env_var(bearer_env_var(endpoint_id))) return *v;
    if (auto v = env_var("GROUNDER_API_KEY")) return *v;
    return "";
}

ModelReply HttpGateway::send_chat(const EndpointConfig& cfg,
                                  const std::vector<ChatMessage>& messages) {
    if (messages.empty()) throw Error("send_chat requires at least one message");
    // Encoding happens once, before any wire attempt; an unencodable image
    // is a caller error, not a transport condition.
    const std::string body = build_request_body(cfg, messages);

    const int attempts = cfg.max_retries + 1;
    WireResult last;
    auto started = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff_base_ * (1 << (attempt - 1)));
        }
        last = wire_(cfg, body);
        if (last.timeout || last.transport_error) continue;

        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
        if (last.status < 200 || last.status >= 300) {
            throw EndpointError(last.status, last.body);
        }
        json parsed;
        try {
            parsed = json::parse(last.body);
        } catch (const json::exception&) {
            throw EndpointError(last.status, last.body);
        }
        if (!parsed.contains("choices") || parsed["choices"].empty()) {
            throw EndpointError(last.status, last.body);
        }
        const auto& message = parsed["choices"][0]["message"];
        std::string text = message.value("content", "");
        return ModelReply{text, elapsed, cfg.id};
    }
    if (last.timeout) {
        throw Timeout("endpoint '" + cfg.id + "' timed out after " + std::to_string(attempts) +
                      " attempts");
    }
    throw TransportError("endpoint '" + cfg.id + "' unreachable after " +
                         std::to_string(attempts) + " attempts: " + last.detail);
}

}  // namespace grounder
