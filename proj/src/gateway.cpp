// SPDX-License-Identifier: Apache-2.0
#include "thinkbudget/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace thinkbudget {
namespace {

using json = nlohmann::json;

constexpr std::size_t kExcerptBytes = 200;

std::string excerpt(std::string_view body) {
    if (body.size() <= kExcerptBytes) return std::string(body);
    return std::string(body.substr(0, kExcerptBytes)) + "...";
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

struct SplitUrl {
    std::string origin;
    std::string path;
};

SplitUrl split_url(std::string_view url) {
    const auto scheme = url.find("://");
    const auto host_begin = scheme == std::string_view::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', host_begin);
    if (slash == std::string_view::npos) return {std::string(url), "/"};
    return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

} // namespace

std::string_view to_string(Role role) {
    switch (role) {
    case Role::System: return "system";
    case Role::Assistant: return "assistant";
    case Role::User: break;
    }
    return "user";
}

void ChatRequest::validate() const {
    if (model.empty()) throw ValidationError("chat request: model is empty");
    if (messages.empty()) throw ValidationError("chat request: no messages");
    if (messages.back().role != Role::User) throw ValidationError("chat request: last message must come from the user");
    if (!(temperature >= 0.0)) throw ValidationError("chat request: temperature must be >= 0");
    if (max_tokens && *max_tokens == 0) throw ValidationError("chat request: max_tokens must be positive");
}

std::string serialize_request(const ChatRequest& request, std::string_view budget_field) {
    json body;
    body["model"] = request.model;
    json messages = json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    body["messages"] = std::move(messages);
    if (request.max_tokens) body["max_tokens"] = *request.max_tokens;
    body["temperature"] = request.temperature;
    if (request.thinking_budget) body[std::string(budget_field)] = *request.thinking_budget;
    return body.dump();
}

ChatResponse parse_response(std::string_view body, int status) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("malformed JSON response: ") + e.what(), status, excerpt(body));
    }
    try {
        ChatResponse out;
        out.content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
            out.prompt_tokens = usage->value("prompt_tokens", std::uint64_t{0});
            out.completion_tokens = usage->value("completion_tokens", std::uint64_t{0});
        }
        return out;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("unexpected response shape: ") + e.what(), status, excerpt(body));
    }
}

std::string chat_completions_url(std::string_view base_url) {
    std::string base(base_url);
    while (!base.empty() && base.back() == '/') base.pop_back();
    return base + "/v1/chat/completions";
}

HttpReply HttpTransport::post(const std::string& url, const std::vector<HttpHeader>& headers, const std::string& body,
                              std::chrono::milliseconds timeout) {
    const auto parts = split_url(url);
    httplib::Client client(parts.origin);
    if (!client.is_valid()) throw TransportFailure("invalid endpoint URL " + url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers hdrs;
    for (const auto& h : headers) hdrs.emplace(h.name, h.value);
    auto result = client.Post(parts.path, hdrs, body, "application/json");
    if (!result) throw TransportFailure("POST " + url + " failed: " + httplib::to_string(result.error()));
    return HttpReply{result->status, result->body};
}

void FixtureTransport::push_reply(int status, std::string body) {
    std::lock_guard lock(mutex_);
    script_.push_back(Step{false, HttpReply{status, std::move(body)}, {}});
}

void FixtureTransport::push_failure(std::string message) {
    std::lock_guard lock(mutex_);
    script_.push_back(Step{true, {}, std::move(message)});
}

HttpReply FixtureTransport::post(const std::string& url, const std::vector<HttpHeader>& headers,
                                 const std::string& body, std::chrono::milliseconds) {
    std::lock_guard lock(mutex_);
    captures_.push_back(Capture{url, headers, body});
    if (script_.empty()) throw TransportFailure("fixture transport: script exhausted");
    Step step = std::move(script_.front());
    script_.pop_front();
    if (step.failure) throw TransportFailure(step.message);
    return step.reply;
}

std::vector<FixtureTransport::Capture> FixtureTransport::captures() const {
    std::lock_guard lock(mutex_);
    return captures_;
}

void real_sleep(std::chrono::milliseconds duration) { std::this_thread::sleep_for(duration); }

ChatResult chat_complete(const EndpointConfig& endpoint, const ChatRequest& request, Transport& transport,
                         const std::optional<std::string>& bearer_token, const Sleeper& sleep) {
    request.validate();
    const std::string url = chat_completions_url(endpoint.base_url);
    const std::string body = serialize_request(request, endpoint.budget_field);
    std::vector<HttpHeader> headers;
    if (bearer_token) headers.push_back({"Authorization", "Bearer " + *bearer_token});

    const int max_attempts = std::max(1, endpoint.max_attempts);
    auto delay = endpoint.backoff_base;
    for (int attempt = 1;; ++attempt) {
        const bool last = attempt == max_attempts;
        try {
            HttpReply reply = transport.post(url, headers, body, endpoint.timeout);
            if (reply.status >= 200 && reply.status < 300) {
                return ChatResult{parse_response(reply.body, reply.status), attempt};
            }
            if (!retryable_status(reply.status) || last) {
                throw ProtocolError("endpoint '" + endpoint.id + "' returned HTTP " + std::to_string(reply.status) +
                                        " after " + std::to_string(attempt) + " attempt(s)",
                                    reply.status, excerpt(reply.body));
            }
        } catch (const TransportFailure& failure) {
            if (last) {
                throw GatewayError("endpoint '" + endpoint.id + "' unreachable after " + std::to_string(attempt) +
                                       " attempt(s): " + failure.what(),
                                   attempt);
            }
        }
        sleep(delay);
        delay *= 2;
    }
}

Gateway::Gateway(EndpointConfig endpoint, std::shared_ptr<Transport> transport, Sleeper sleep)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      sleep_(std::move(sleep)),
      slots_(std::clamp<std::ptrdiff_t>(endpoint_.max_in_flight, 1, kMaxInFlight)) {
    if (!endpoint_.auth_env_var.empty()) {
        const char* token = std::getenv(endpoint_.auth_env_var.c_str());
        if (token == nullptr) {
            throw ConfigError("endpoint '" + endpoint_.id + "': environment variable " + endpoint_.auth_env_var +
                              " is not set");
        }
        bearer_token_ = token;
    }
}

ChatResult Gateway::complete(const ChatRequest& request) {
    slots_.acquire();
    struct Release {
        Gateway& self;
        ~Release() {
            self.in_flight_.fetch_sub(1);
            self.slots_.release();
        }
    } release{*this};
    const int now = in_flight_.fetch_add(1) + 1;
    int peak = peak_in_flight_.load();
    while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
    }
    return chat_complete(endpoint_, request, *transport_, bearer_token_, sleep_);
}

} // namespace thinkbudget
