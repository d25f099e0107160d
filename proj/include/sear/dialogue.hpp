#pragma once

// Text generation backends and simulated conversation targets.

#include "sear/codec.hpp"
#include "sear/model.hpp"
#include "sear/validate.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sear::dialogue {

enum class ChatRole { System, User, Assistant };

std::string_view to_string(ChatRole r);  // "system" | "user" | "assistant"

struct ChatTurn {
    ChatRole role = ChatRole::User;
    std::string content;

    bool operator==(const ChatTurn&) const = default;
};

struct ChatRequest {
    std::vector<ChatTurn> turns;
    double temperature = 0.0;
    int maxTokens = 256;

    bool operator==(const ChatRequest&) const = default;
};

ValidationReport validate(const ChatRequest& r);

/// Content of the last user turn, or empty.
std::string last_user_turn(const ChatRequest& r);

class DialogueBackend {
public:
    virtual ~DialogueBackend() = default;
    /// Blocking, thread-safe. Throws a sear::Error subclass on failure.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Prompt hash → reply. Keys are hex64(hash64(prompt)).
using Script = std::map<std::string, std::string>;

std::string prompt_hash(std::string_view prompt);

/// Scripted reply for the last user turn, else "ACK:" + its first 40 characters.
std::string scripted_respond(const ChatRequest& request, const Script& script);

class ScriptedBackend final : public DialogueBackend {
public:
    explicit ScriptedBackend(Script script = {}) : script_(std::move(script)) {}
    std::string complete(const ChatRequest& request) override { return scripted_respond(request, script_); }

private:
    Script script_;
};

Script load_script(const std::filesystem::path& path);

struct EndpointConfig {
    std::string baseUrl;    // e.g. http://127.0.0.1:8080/v1
    std::string apiKeyRef;  // name of the environment variable holding the bearer token; empty = no auth
    std::string model = "gemma-3-12b-it";
    int timeoutMs = 30000;
    int maxAttempts = 3;
    int backoffBaseMs = 250;
    double backoffFactor = 2.0;
    double jitter = 0.2;
    std::uint64_t seed = 0;

    bool operator==(const EndpointConfig&) const = default;
};

ValidationReport validate(const EndpointConfig& c);

/// chat-completions request body: {model, messages:[{role,content}], temperature, max_tokens}.
Json chat_request_body(const EndpointConfig& config, const ChatRequest& request);

/// choices[0].message.content; ProtocolError if absent or malformed.
std::string parse_chat_response(std::string_view body);

/// Delay before retry number `retry` (1-based): base × factor^(retry−1) × (1 ± jitter).
std::chrono::milliseconds backoff_delay(const EndpointConfig& config, int retry, std::mt19937_64& rng);

struct HttpHooks {
    std::function<void(std::chrono::milliseconds)> sleep;
    std::function<std::optional<std::string>(const std::string&)> getenv;
};

/// Remote chat model behind the chat-completions contract. Retries transport
/// failures and 5xx with exponential backoff; other non-200 statuses raise
/// RequestError immediately; exhausted retries raise UnavailableError.
class HttpChatBackend final : public DialogueBackend {
public:
    explicit HttpChatBackend(EndpointConfig config, HttpHooks hooks = {});
    std::string complete(const ChatRequest& request) override;

    /// Requests sent so far (all attempts).
    int attempts_made() const;

private:
    EndpointConfig config_;
    HttpHooks hooks_;
    std::string origin_;
    std::string path_;
    mutable std::mutex mutex_;
    std::mt19937_64 rng_;
    int attempts_ = 0;
};

std::string http_chat_complete(const EndpointConfig& config, const ChatRequest& request, HttpHooks hooks = {});

enum class Bias { Friendly, Neutral, Hostile };

struct PersonaRule {
    std::vector<std::string> triggerKeywords;
    std::string replyTemplate;  // may reference {UTTERANCE}

    bool operator==(const PersonaRule&) const = default;
};

struct Persona {
    std::string personaId;
    std::vector<PersonaRule> rules;  // ordered, first match wins
    std::string defaultReply = "Okay.";
    Bias receptivenessBias = Bias::Neutral;
    std::vector<std::string> terminationTriggers;

    bool operator==(const Persona&) const = default;
};

inline constexpr std::string_view kAbortPhrase = "stop";

ValidationReport validate(const Persona& p);

/// Termination triggers win; then the first rule with a trigger phrase in
/// the utterance (case-insensitive, on token boundaries); then the default
/// reply with a bias prefix. Pure.
std::string persona_respond(const Persona& persona, std::string_view utterance,
                            const std::vector<Utterance>& conversationSoFar);

void to_json(Json& j, const PersonaRule& v);
void from_json(const Json& j, PersonaRule& v);
void to_json(Json& j, const Persona& v);
void from_json(const Json& j, Persona& v);

std::vector<Persona> load_personas(const std::filesystem::path& path);

/// The other side of the conversation.
class TargetInterface {
public:
    virtual ~TargetInterface() = default;
    /// Throws InteractionError when the channel is closed.
    virtual std::string respond(std::string_view utterance, const std::vector<Utterance>& history) = 0;
};

class PersonaTarget final : public TargetInterface {
public:
    explicit PersonaTarget(Persona persona) : persona_(std::move(persona)) {}
    std::string respond(std::string_view utterance, const std::vector<Utterance>& history) override;
    const Persona& persona() const { return persona_; }

private:
    Persona persona_;
};

/// Interactive target: prints the agent line, reads one reply line.
class StreamTarget final : public TargetInterface {
public:
    StreamTarget(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
    std::string respond(std::string_view utterance, const std::vector<Utterance>& history) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

}  // namespace sear::dialogue
