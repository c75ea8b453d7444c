// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "test_support.hpp"
#include "thinkbudget/backend.hpp"
#include "thinkbudget/gateway.hpp"

using namespace thinkbudget;
using nlohmann::json;

namespace {

std::string completion_body(const std::string& content, int prompt_tokens = 12, int completion_tokens = 7) {
    return json{{"id", "cmpl-1"},
                {"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}})},
                {"usage", {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}}}}
        .dump();
}

ChatRequest user_request(const std::string& prompt) {
    ChatRequest r;
    r.model = "qwen3-8b";
    r.messages.push_back({Role::User, prompt});
    return r;
}

EndpointConfig fast_endpoint() {
    EndpointConfig e;
    e.id = "local";
    e.base_url = "http://127.0.0.1:9/";
    e.max_attempts = 3;
    e.backoff_base = std::chrono::milliseconds(10);
    return e;
}

struct RecordingSleeper {
    std::vector<std::chrono::milliseconds> delays;
    Sleeper sleeper() {
        return [this](std::chrono::milliseconds d) { delays.push_back(d); };
    }
};

// Holds every request open briefly and records how many overlap.
class SlowTransport final : public Transport {
public:
    HttpReply post(const std::string&, const std::vector<HttpHeader>&, const std::string&,
                   std::chrono::milliseconds) override {
        const int now = ++active_;
        int seen = peak_.load();
        while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(15));
        --active_;
        return HttpReply{200, completion_body("ok")};
    }
    int peak() const { return peak_.load(); }

private:
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
};

} // namespace

TEST_CASE("fixture reply comes back parsed") {
    FixtureTransport transport;
    transport.push_reply(200, completion_body("<think>x</think>Answer: B", 30, 9));
    const auto result = chat_complete(fast_endpoint(), user_request("hello"), transport);
    CHECK(result.attempts == 1);
    CHECK(result.response.content == "<think>x</think>Answer: B");
    CHECK(result.response.prompt_tokens == 30);
    CHECK(result.response.completion_tokens == 9);
}

TEST_CASE("a 500 followed by a 200 succeeds on the second attempt") {
    FixtureTransport transport;
    transport.push_reply(500, "upstream exploded");
    transport.push_reply(200, completion_body("Answer: A"));
    RecordingSleeper sleeper;
    const auto result = chat_complete(fast_endpoint(), user_request("hi"), transport, std::nullopt, sleeper.sleeper());
    CHECK(result.attempts == 2);
    CHECK(result.response.content == "Answer: A");
    REQUIRE(sleeper.delays.size() == 1);
    CHECK(sleeper.delays[0] == std::chrono::milliseconds(10));
}

TEST_CASE("429 is retried with doubling backoff") {
    FixtureTransport transport;
    transport.push_reply(429, "slow down");
    transport.push_failure("connection reset");
    transport.push_reply(200, completion_body("Answer: C"));
    RecordingSleeper sleeper;
    const auto result = chat_complete(fast_endpoint(), user_request("hi"), transport, std::nullopt, sleeper.sleeper());
    CHECK(result.attempts == 3);
    CHECK(sleeper.delays == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(10),
                                                                   std::chrono::milliseconds(20)});
}

TEST_CASE("malformed JSON raises a protocol error carrying the body") {
    FixtureTransport transport;
    transport.push_reply(200, "{\"choices\": [");
    try {
        chat_complete(fast_endpoint(), user_request("hi"), transport);
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(e.status() == 200);
        CHECK(e.body_excerpt() == "{\"choices\": [");
    }

    FixtureTransport missing_content;
    missing_content.push_reply(200, R"({"choices":[{"message":{"role":"assistant"}}]})");
    CHECK_THROWS_AS(chat_complete(fast_endpoint(), user_request("hi"), missing_content), ProtocolError);
}

TEST_CASE("client errors are not retried") {
    FixtureTransport transport;
    transport.push_reply(400, "bad request");
    transport.push_reply(200, completion_body("unused"));
    try {
        chat_complete(fast_endpoint(), user_request("hi"), transport);
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(e.status() == 400);
    }
    CHECK(transport.captures().size() == 1);
}

TEST_CASE("exhausted transport failures raise a gateway error with the attempt count") {
    FixtureTransport transport;
    for (int i = 0; i < 3; ++i) transport.push_failure("connection refused");
    RecordingSleeper sleeper;
    try {
        chat_complete(fast_endpoint(), user_request("hi"), transport, std::nullopt, sleeper.sleeper());
        FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
        CHECK(e.attempts() == 3);
    }
    CHECK(sleeper.delays.size() == 2);
}

TEST_CASE("the wire body is the serialized request") {
    FixtureTransport transport;
    transport.push_reply(200, completion_body("Answer: A"));
    auto request = user_request("The question text");
    request.thinking_budget = 256;
    request.temperature = 0.6;
    auto endpoint = fast_endpoint();
    endpoint.budget_field = "max_thinking_tokens";
    chat_complete(endpoint, request, transport, std::string("secret-token"));

    const auto captures = transport.captures();
    REQUIRE(captures.size() == 1);
    CHECK(captures[0].url == "http://127.0.0.1:9/v1/chat/completions");
    CHECK(captures[0].body == serialize_request(request, "max_thinking_tokens"));
    const auto body = json::parse(captures[0].body);
    CHECK(body["model"] == "qwen3-8b");
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "The question text");
    CHECK(body["max_thinking_tokens"] == 256);
    CHECK(body["temperature"] == 0.6);
    REQUIRE(captures[0].headers.size() == 1);
    CHECK(captures[0].headers[0].name == "Authorization");
    CHECK(captures[0].headers[0].value == "Bearer secret-token");
}

TEST_CASE("native budget parameters") {
    CHECK(native_budget_parameter(BudgetSpec::none()) == std::optional<std::uint64_t>(0));
    CHECK(native_budget_parameter(BudgetSpec::tokens(512)) == std::optional<std::uint64_t>(512));
    CHECK_FALSE(native_budget_parameter(BudgetSpec::unlimited()).has_value());

    auto request = user_request("q");
    request.thinking_budget = 0;
    CHECK(json::parse(serialize_request(request))["thinking_budget"] == 0);
    request.thinking_budget.reset();
    CHECK_FALSE(json::parse(serialize_request(request)).contains("thinking_budget"));
}

TEST_CASE("gateway backend forwards the budget only for native calls") {
    auto transport = std::make_shared<FixtureTransport>();
    transport->push_reply(200, completion_body("Answer: A"));
    transport->push_reply(200, completion_body("Answer: A"));
    auto gateway = std::make_shared<Gateway>(fast_endpoint(), transport);
    GatewayBackend backend(gateway);
    ModelSpec model{"qwen3-8b", "qwen", 8.0, true, std::nullopt, "local"};
    const auto q = testing::make_question("q1", 4, "A");

    backend.complete(InferenceCall{model, q, "prompt", BudgetSpec::tokens(128), true});
    backend.complete(InferenceCall{model, q, "prompt", BudgetSpec::tokens(128), false});
    const auto captures = transport->captures();
    CHECK(json::parse(captures[0].body)["thinking_budget"] == 128);
    CHECK_FALSE(json::parse(captures[1].body).contains("thinking_budget"));
}

TEST_CASE("a missing auth variable is a config error") {
    auto endpoint = fast_endpoint();
    endpoint.auth_env_var = "THINKBUDGET_TEST_TOKEN_THAT_IS_NOT_SET";
    ::unsetenv(endpoint.auth_env_var.c_str());
    CHECK_THROWS_AS(Gateway(endpoint, std::make_shared<FixtureTransport>()), ConfigError);
}

TEST_CASE("request validation") {
    ChatRequest empty;
    empty.model = "m";
    CHECK_THROWS_AS(empty.validate(), ValidationError);
    auto assistant_last = user_request("x");
    assistant_last.messages.push_back({Role::Assistant, "y"});
    CHECK_THROWS_AS(assistant_last.validate(), ValidationError);
    auto negative = user_request("x");
    negative.temperature = -1.0;
    CHECK_THROWS_AS(negative.validate(), ValidationError);
}

TEST_CASE("in-flight requests stay within the endpoint bound") {
    auto transport = std::make_shared<SlowTransport>();
    auto endpoint = fast_endpoint();
    endpoint.max_in_flight = 2;
    Gateway gateway(endpoint, transport);
    {
        std::vector<std::jthread> workers;
        for (int i = 0; i < 8; ++i) workers.emplace_back([&] { gateway.complete(user_request("x")); });
    }
    CHECK(transport->peak() <= 2);
    CHECK(gateway.peak_in_flight() <= 2);
    CHECK(gateway.peak_in_flight() >= 1);
}

TEST_CASE("HttpTransport talks to a loopback server") {
    httplib::Server server;
    std::string seen_auth;
    std::string seen_body;
    int calls = 0;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        if (calls == 1) {
            res.status = 503;
            res.set_content("warming up", "text/plain");
            return;
        }
        const auto body = json::parse(req.body);
        res.set_content(completion_body("echo " + body["messages"][0]["content"].get<std::string>()),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto endpoint = fast_endpoint();
    endpoint.base_url = "http://127.0.0.1:" + std::to_string(port);
    endpoint.auth_env_var = "THINKBUDGET_TEST_LOOPBACK_TOKEN";
    endpoint.timeout = std::chrono::milliseconds(5000);
    ::setenv(endpoint.auth_env_var.c_str(), "loopback", 1);
    Gateway gateway(endpoint, std::make_shared<HttpTransport>(), [](std::chrono::milliseconds) {});
    const auto result = gateway.complete(user_request("ping"));
    server.stop();
    listener.join();

    CHECK(result.attempts == 2);
    CHECK(result.response.content == "echo ping");
    CHECK(seen_auth == "Bearer loopback");
    CHECK(seen_body == serialize_request(user_request("ping")));
}

TEST_CASE("HttpTransport reports refused connections as transport failures") {
    httplib::Server probe;
    const int port = probe.bind_to_any_port("127.0.0.1");
    probe.stop();
    HttpTransport transport;
    CHECK_THROWS_AS(transport.post("http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions", {}, "{}",
                                   std::chrono::milliseconds(500)),
                    TransportFailure);
}
