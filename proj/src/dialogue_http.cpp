#include "sear/dialogue.hpp"
#include "sear/errors.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace sear::dialogue {

namespace {

void split_url(const std::string& url, std::string& origin, std::string& path) {
    const auto scheme = url.find("://");
    const auto slash = scheme == std::string::npos ? std::string::npos : url.find('/', scheme + 3);
    origin = url.substr(0, slash);
    path = slash == std::string::npos ? std::string() : url.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
}

}  // namespace

HttpChatBackend::HttpChatBackend(EndpointConfig config, HttpHooks hooks)
    : config_(std::move(config)), hooks_(std::move(hooks)), rng_(config_.seed) {
    if (const auto r = validate(config_); !r.ok()) throw ArgumentError("endpoint: " + r.summary());
    if (!hooks_.sleep) hooks_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!hooks_.getenv) {
        hooks_.getenv = [](const std::string& name) -> std::optional<std::string> {
            if (const char* v = std::getenv(name.c_str())) return std::string(v);
            return std::nullopt;
        };
    }
    split_url(config_.baseUrl, origin_, path_);
}

int HttpChatBackend::attempts_made() const {
    std::lock_guard lock(mutex_);
    return attempts_;
}

std::string HttpChatBackend::complete(const ChatRequest& request) {
    if (const auto r = validate(request); !r.ok()) throw ArgumentError("chat request: " + r.summary());

    httplib::Headers headers;
    if (!config_.apiKeyRef.empty()) {
        const auto key = hooks_.getenv(config_.apiKeyRef);
        if (!key || key->empty()) throw ArgumentError("environment variable " + config_.apiKeyRef + " is not set");
        headers.emplace("Authorization", "Bearer " + *key);
    }
    const auto body = chat_request_body(config_, request).dump();

    httplib::Client client(origin_);
    const auto timeout = std::chrono::milliseconds(config_.timeoutMs);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    std::string lastFailure;
    for (int attempt = 1; attempt <= config_.maxAttempts; ++attempt) {
        if (attempt > 1) {
            std::chrono::milliseconds delay;
            {
                std::lock_guard lock(mutex_);
                delay = backoff_delay(config_, attempt - 1, rng_);
            }
            hooks_.sleep(delay);
        }
        {
            std::lock_guard lock(mutex_);
            ++attempts_;
        }
        auto res = client.Post(path_ + "/chat/completions", headers, body, "application/json");
        if (!res) {
            lastFailure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 200) return parse_chat_response(res->body);
        if (res->status >= 500) {
            lastFailure = "status " + std::to_string(res->status);
            continue;
        }
        throw RequestError("chat endpoint returned status " + std::to_string(res->status), res->status);
    }
    throw UnavailableError("chat endpoint unavailable after " + std::to_string(config_.maxAttempts) +
                           " attempts (" + lastFailure + ")");
}

std::string http_chat_complete(const EndpointConfig& config, const ChatRequest& request, HttpHooks hooks) {
    HttpChatBackend backend(config, std::move(hooks));
    return backend.complete(request);
}

}  // namespace sear::dialogue
