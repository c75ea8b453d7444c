// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thinkbudget/errors.hpp"

namespace thinkbudget {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    std::optional<std::uint64_t> max_tokens;
    /// Vendor extension; 0 disables thinking, absent means no cap.
    std::optional<std::uint64_t> thinking_budget;
    double temperature = 0.0;

    /// Messages nonempty, last one from the user, temperature >= 0.
    void validate() const;
};

struct ChatResponse {
    std::string content;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;

    bool operator==(const ChatResponse&) const = default;
};

struct EndpointConfig {
    std::string id;
    std::string base_url;
    /// Name of the environment variable holding the bearer token; empty for none.
    std::string auth_env_var;
    /// Request body key carrying the native thinking budget.
    std::string budget_field = "thinking_budget";
    std::chrono::milliseconds timeout{120'000};
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{1'000};
    int max_in_flight = 4;
    double temperature = 0.0;
};

/// JSON body sent to <base>/v1/chat/completions.
std::string serialize_request(const ChatRequest& request, std::string_view budget_field = "thinking_budget");

/// Reads choices[0].message.content and usage.{prompt_tokens,completion_tokens}.
/// Throws ProtocolError on anything else.
ChatResponse parse_response(std::string_view body, int status = 200);

std::string chat_completions_url(std::string_view base_url);

struct HttpReply {
    int status = 0;
    std::string body;
};

struct HttpHeader {
    std::string name;
    std::string value;
};

/// Connection never produced an HTTP reply (refused, reset, timed out).
class TransportFailure : public Error {
public:
    using Error::Error;
};

class Transport {
public:
    virtual ~Transport() = default;
    /// Throws TransportFailure when no reply was received.
    virtual HttpReply post(const std::string& url, const std::vector<HttpHeader>& headers, const std::string& body,
                           std::chrono::milliseconds timeout) = 0;
};

/// Real HTTP(S) transport.
class HttpTransport final : public Transport {
public:
    HttpReply post(const std::string& url, const std::vector<HttpHeader>& headers, const std::string& body,
                   std::chrono::milliseconds timeout) override;
};

/// Replays scripted replies in order and captures every request it sees.
class FixtureTransport final : public Transport {
public:
    struct Capture {
        std::string url;
        std::vector<HttpHeader> headers;
        std::string body;
    };

    void push_reply(int status, std::string body);
    void push_failure(std::string message);

    HttpReply post(const std::string& url, const std::vector<HttpHeader>& headers, const std::string& body,
                   std::chrono::milliseconds timeout) override;

    std::vector<Capture> captures() const;

private:
    struct Step {
        bool failure = false;
        HttpReply reply;
        std::string message;
    };

    mutable std::mutex mutex_;
    std::deque<Step> script_;
    std::vector<Capture> captures_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Sleeps the calling thread.
void real_sleep(std::chrono::milliseconds duration);

struct ChatResult {
    ChatResponse response;
    int attempts = 0;
};

/// One chat completion with retry. Transport failures and 429/5xx replies
/// are retried with exponential backoff (base, 2*base, ...). Exhausted
/// transport failures raise GatewayError; non-2xx replies and unparseable
/// bodies raise ProtocolError.
ChatResult chat_complete(const EndpointConfig& endpoint, const ChatRequest& request, Transport& transport,
                         const std::optional<std::string>& bearer_token = std::nullopt,
                         const Sleeper& sleep = real_sleep);

/// Endpoint client bounding the number of concurrent requests.
class Gateway {
public:
    /// Resolves the bearer token from the environment; throws ConfigError if
    /// auth_env_var names a variable that is unset.
    Gateway(EndpointConfig endpoint, std::shared_ptr<Transport> transport, Sleeper sleep = real_sleep);

    ChatResult complete(const ChatRequest& request);

    const EndpointConfig& endpoint() const noexcept { return endpoint_; }
    int peak_in_flight() const noexcept { return peak_in_flight_.load(); }

private:
    static constexpr std::ptrdiff_t kMaxInFlight = 1024;

    EndpointConfig endpoint_;
    std::shared_ptr<Transport> transport_;
    Sleeper sleep_;
    std::optional<std::string> bearer_token_;
    std::counting_semaphore<kMaxInFlight> slots_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_in_flight_{0};
};

} // namespace thinkbudget
