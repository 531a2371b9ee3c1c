#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "grounder/http_gateway.hpp"
#include "grounder/scripted_gateway.hpp"
#include "grounder/util.hpp"
#include "test_support.hpp"

using namespace grounder;
using nlohmann::json;

namespace {

std::vector<ChatMessage> one_user_message(const std::string& text = "hello") {
    return {user_msg(text)};
}

}  // namespace

TEST_CASE("scripted gateway replays entries in order and fails loudly after") {
    ScriptedGateway gw(testsupport::make_script({{"uground", {"(5,5)", "(6,6)"}}}));
    auto cfg = testsupport::specialist("uground");
    CHECK(gw.send_chat(cfg, one_user_message()).text == "(5,5)");
    CHECK(gw.send_chat(cfg, one_user_message()).text == "(6,6)");
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), ScriptExhausted);
    CHECK(gw.calls("uground") == 3);  // the failed lookup still consumed a slot
}

TEST_CASE("scripted gateway raises injected errors as if from the wire") {
    json script = {{"a", json::array({json{{"error", "timeout"}}, json{{"error", "transport"}},
                                      json{{"error", "endpoint"}, {"status", 500}, {"body", "x"}}})}};
    ScriptedGateway gw(testsupport::make_script(script));
    auto cfg = testsupport::specialist("a");
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), Timeout);
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), TransportError);
    try {
        gw.send_chat(cfg, one_user_message());
        FAIL("expected EndpointError");
    } catch (const EndpointError& e) {
        CHECK(e.status() == 500);
        CHECK(e.body() == "x");
    }
}

TEST_CASE("replaying the same script twice yields identical reply sequences") {
    json script = {{"a", {"one", "two", "three"}}, {"b", {"1", "2"}}};
    auto run = [&]() {
        ScriptedGateway gw(testsupport::make_script(script));
        std::vector<std::string> replies;
        auto a = testsupport::specialist("a");
        auto b = testsupport::specialist("b");
        replies.push_back(gw.send_chat(a, one_user_message()).text);
        replies.push_back(gw.send_chat(b, one_user_message()).text);
        replies.push_back(gw.send_chat(a, one_user_message()).text);
        replies.push_back(gw.send_chat(b, one_user_message()).text);
        replies.push_back(gw.send_chat(a, one_user_message()).text);
        return replies;
    };
    CHECK(run() == run());
}

TEST_CASE("scripted gateway counters are consistent under concurrent callers") {
    json entries = json::array();
    for (int i = 0; i < 64; ++i) entries.push_back("r" + std::to_string(i));
    ScriptedGateway gw(testsupport::make_script({{"a", entries}}));
    auto cfg = testsupport::specialist("a");
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&]() {
            for (int i = 0; i < 8; ++i) {
                gw.send_chat(cfg, one_user_message());
                ok++;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 64);
    CHECK(gw.calls("a") == 64);
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), ScriptExhausted);
}

TEST_CASE("http gateway retries transport failures max_retries+1 times") {
    int attempts = 0;
    HttpGateway gw(
        [&](const EndpointConfig&, const std::string&) {
            ++attempts;
            WireResult r;
            r.transport_error = true;
            r.detail = "connection refused";
            return r;
        },
        std::chrono::milliseconds(0));
    auto cfg = testsupport::specialist("a");
    cfg.max_retries = 2;
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), TransportError);
    CHECK(attempts == 3);
}

TEST_CASE("http gateway preserves timeouts distinctly") {
    int attempts = 0;
    HttpGateway gw(
        [&](const EndpointConfig&, const std::string&) {
            ++attempts;
            WireResult r;
            r.timeout = true;
            return r;
        },
        std::chrono::milliseconds(0));
    auto cfg = testsupport::specialist("a");
    cfg.max_retries = 1;
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), Timeout);
    CHECK(attempts == 2);
}

TEST_CASE("http gateway never retries a well-formed endpoint error") {
    int attempts = 0;
    HttpGateway gw(
        [&](const EndpointConfig&, const std::string&) {
            ++attempts;
            WireResult r;
            r.status = 429;
            r.body = "slow down";
            return r;
        },
        std::chrono::milliseconds(0));
    auto cfg = testsupport::specialist("a");
    cfg.max_retries = 5;
    CHECK_THROWS_AS(gw.send_chat(cfg, one_user_message()), EndpointError);
    CHECK(attempts == 1);
}

TEST_CASE("http gateway recovers after transient transport failures") {
    int attempts = 0;
    HttpGateway gw(
        [&](const EndpointConfig&, const std::string&) {
            ++attempts;
            WireResult r;
            if (attempts < 3) {
                r.transport_error = true;
                return r;
            }
            r.status = 200;
            r.body = json{{"choices", json::array({json{{"message", {{"content", "pong"}}}}})}}
                         .dump();
            return r;
        },
        std::chrono::milliseconds(0));
    auto cfg = testsupport::specialist("a");
    cfg.max_retries = 3;
    CHECK(gw.send_chat(cfg, one_user_message("ping")).text == "pong");
    CHECK(attempts == 3);
}

TEST_CASE("request body carries model, sampling settings, and data-URL images") {
    std::string dir = testsupport::fresh_dir("tmp_gateway");
    std::string img = dir + "/shot.png";
    write_file(img, "fakebytes");

    auto cfg = testsupport::specialist("a");
    cfg.model_name = "test-model";
    cfg.max_output_tokens = 77;
    cfg.temperature = 0.5;

    ScreenshotMeta shot{640, 480, img, ImageFormat::Png};
    std::vector<ChatMessage> messages = {system_msg("contract"),
                                         user_msg("look here", {shot})};
    json body = json::parse(HttpGateway::build_request_body(cfg, messages));
    CHECK(body["model"] == "test-model");
    CHECK(body["max_tokens"] == 77);
    CHECK(body["temperature"] == 0.5);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == "contract");
    const auto& parts = body["messages"][1]["content"];
    REQUIRE(parts.is_array());
    CHECK(parts[0]["type"] == "text");
    CHECK(parts[1]["type"] == "image_url");
    std::string url = parts[1]["image_url"]["url"];
    CHECK(url.rfind("data:image/png;base64,", 0) == 0);
    CHECK(url.substr(url.find(',') + 1) == base64_encode("fakebytes"));
}

TEST_CASE("missing image raises ImageEncodingError before any wire attempt") {
    int attempts = 0;
    HttpGateway gw(
        [&](const EndpointConfig&, const std::string&) {
            ++attempts;
            return WireResult{};
        },
        std::chrono::milliseconds(0));
    auto cfg = testsupport::specialist("a");
    ScreenshotMeta shot{640, 480, "/nonexistent/image.png", ImageFormat::Png};
    CHECK_THROWS_AS(gw.send_chat(cfg, {user_msg("x", {shot})}), ImageEncodingError);
    CHECK(attempts == 0);
}

TEST_CASE("bearer token env var derives from the endpoint id") {
    CHECK(HttpGateway::bearer_env_var("uground") == "GROUNDER_API_KEY_UGROUND");
    CHECK(HttpGateway::bearer_env_var("ui-tars.7b") == "GROUNDER_API_KEY_UI_TARS_7B");
}

TEST_CASE("live loopback server round-trip") {
    httplib::Server server;
    std::string seen_body;
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = req.body;
        seen_auth = req.get_header_value("Authorization");
        json reply = {{"choices", json::array({json{{"message", {{"content", "(12, 34)"}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    if (port <= 0) {
        MESSAGE("skipping: cannot bind a loopback port in this environment");
        return;
    }
    std::thread server_thread([&]() { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("GROUNDER_API_KEY_LOOP", "sekrit", 1);
    auto cfg = testsupport::specialist("loop");
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    cfg.model_name = "loop-model";
    HttpGateway gw;
    ModelReply reply = gw.send_chat(cfg, one_user_message("where is it?"));
    CHECK(reply.text == "(12, 34)");
    CHECK(reply.endpoint_id == "loop");
    CHECK(json::parse(seen_body)["model"] == "loop-model");
    CHECK(seen_auth == "Bearer sekrit");
    unsetenv("GROUNDER_API_KEY_LOOP");

    server.stop();
    server_thread.join();
}
