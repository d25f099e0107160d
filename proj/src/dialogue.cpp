#include "sear/dialogue.hpp"

#include "sear/errors.hpp"
#include "sear/text.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sear::dialogue {

std::string_view to_string(ChatRole r) {
    switch (r) {
        case ChatRole::System: return "system";
        case ChatRole::User: return "user";
        case ChatRole::Assistant: return "assistant";
    }
    return "user";
}

ValidationReport validate(const ChatRequest& r) {
    ValidationReport report;
    if (r.turns.empty()) report.add("turns", "at least one turn");
    if (!(r.temperature >= 0.0)) report.add("temperature", "temperature ≥ 0");
    if (r.maxTokens <= 0) report.add("maxTokens", "maxTokens > 0");
    return report;
}

std::string last_user_turn(const ChatRequest& r) {
    for (auto it = r.turns.rbegin(); it != r.turns.rend(); ++it) {
        if (it->role == ChatRole::User) return it->content;
    }
    return {};
}

std::string prompt_hash(std::string_view prompt) { return text::hex64(text::hash64(prompt)); }

std::string scripted_respond(const ChatRequest& request, const Script& script) {
    const auto prompt = last_user_turn(request);
    if (auto it = script.find(prompt_hash(prompt)); it != script.end()) return it->second;
    return "ACK:" + text::utf8_prefix(prompt, 40);
}

Script load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read script " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto j = parse_json(buf.str());
    Script script;
    try {
        if (j.is_object()) {
            for (const auto& [key, reply] : j.items()) script[key] = reply.get<std::string>();
        } else if (j.is_array()) {
            for (const auto& item : j) script[prompt_hash(item.at("prompt").get<std::string>())] = item.at("reply").get<std::string>();
        } else {
            throw FormatError("script must be an object or an array");
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("script: ") + e.what());
    }
    return script;
}

ValidationReport validate(const EndpointConfig& c) {
    ValidationReport r;
    if (!(c.baseUrl.starts_with("http://") || c.baseUrl.starts_with("https://")))
        r.add("baseUrl", "baseUrl must start with http:// or https://");
    if (c.model.empty()) r.add("model", "model non-empty");
    if (c.timeoutMs <= 0) r.add("timeoutMs", "timeoutMs > 0");
    if (c.maxAttempts < 1) r.add("maxAttempts", "maxAttempts ≥ 1");
    if (c.backoffBaseMs < 0) r.add("backoffBaseMs", "backoffBaseMs ≥ 0");
    if (!(c.backoffFactor >= 1.0)) r.add("backoffFactor", "backoffFactor ≥ 1");
    if (!(c.jitter >= 0.0 && c.jitter < 1.0)) r.add("jitter", "jitter ∈ [0,1)");
    return r;
}

Json chat_request_body(const EndpointConfig& config, const ChatRequest& request) {
    Json messages = Json::array();
    for (const auto& t : request.turns) messages.push_back({{"role", to_string(t.role)}, {"content", t.content}});
    return Json{{"model", config.model},
                {"messages", messages},
                {"temperature", request.temperature},
                {"max_tokens", request.maxTokens}};
}

std::string parse_chat_response(std::string_view body) {
    Json j;
    try {
        j = Json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("chat response is not JSON: ") + e.what());
    }
    const auto choices = j.find("choices");
    if (choices == j.end() || !choices->is_array() || choices->empty())
        throw ProtocolError("chat response has no choices");
    const auto& first = (*choices)[0];
    const auto message = first.find("message");
    if (message == first.end() || !message->is_object()) throw ProtocolError("chat response choice has no message");
    const auto content = message->find("content");
    if (content == message->end() || !content->is_string()) throw ProtocolError("chat response message has no content");
    return content->get<std::string>();
}

std::chrono::milliseconds backoff_delay(const EndpointConfig& config, int retry, std::mt19937_64& rng) {
    double delay = config.backoffBaseMs;
    for (int i = 1; i < retry; ++i) delay *= config.backoffFactor;
    if (config.jitter > 0.0) delay *= std::uniform_real_distribution<double>(1.0 - config.jitter, 1.0 + config.jitter)(rng);
    return std::chrono::milliseconds(static_cast<std::int64_t>(delay + 0.5));
}

ValidationReport validate(const Persona& p) {
    ValidationReport r;
    if (p.personaId.empty()) r.add("personaId", "personaId non-empty");
    if (text::normalize_whitespace(p.defaultReply).empty()) r.add("defaultReply", "defaultReply non-empty");
    return r;
}

std::string persona_respond(const Persona& persona, std::string_view utterance, const std::vector<Utterance>&) {
    const auto tokens = text::tokenize(utterance);
    for (const auto& trigger : persona.terminationTriggers) {
        if (text::contains_phrase(tokens, trigger)) return std::string(kAbortPhrase);
    }
    for (const auto& rule : persona.rules) {
        for (const auto& keyword : rule.triggerKeywords) {
            if (!text::contains_phrase(tokens, keyword)) continue;
            std::string reply = rule.replyTemplate;
            const std::string marker = "{UTTERANCE}";
            for (auto pos = reply.find(marker); pos != std::string::npos; pos = reply.find(marker, pos + utterance.size()))
                reply.replace(pos, marker.size(), utterance);
            return reply;
        }
    }
    switch (persona.receptivenessBias) {
        case Bias::Friendly: return "Sure \xe2\x80\x94 " + persona.defaultReply;
        case Bias::Hostile: return "Hmm. " + persona.defaultReply;
        case Bias::Neutral: break;
    }
    return persona.defaultReply;
}

namespace {

std::string_view bias_name(Bias b) {
    switch (b) {
        case Bias::Friendly: return "Friendly";
        case Bias::Hostile: return "Hostile";
        case Bias::Neutral: break;
    }
    return "Neutral";
}

}  // namespace

void to_json(Json& j, const PersonaRule& v) {
    j = Json{{"triggerKeywords", v.triggerKeywords}, {"replyTemplate", v.replyTemplate}};
}

void from_json(const Json& j, PersonaRule& v) {
    v.triggerKeywords = j.at("triggerKeywords").get<std::vector<std::string>>();
    v.replyTemplate = j.at("replyTemplate").get<std::string>();
}

void to_json(Json& j, const Persona& v) {
    j = Json{{"personaId", v.personaId},
             {"rules", v.rules},
             {"defaultReply", v.defaultReply},
             {"receptivenessBias", bias_name(v.receptivenessBias)},
             {"terminationTriggers", v.terminationTriggers}};
}

void from_json(const Json& j, Persona& v) {
    v.personaId = j.at("personaId").get<std::string>();
    v.rules = j.value("rules", std::vector<PersonaRule>{});
    v.defaultReply = j.at("defaultReply").get<std::string>();
    const auto bias = j.value("receptivenessBias", std::string("Neutral"));
    if (bias == "Friendly") v.receptivenessBias = Bias::Friendly;
    else if (bias == "Hostile") v.receptivenessBias = Bias::Hostile;
    else if (bias == "Neutral") v.receptivenessBias = Bias::Neutral;
    else throw FormatError("unknown receptivenessBias '" + bias + "'");
    v.terminationTriggers = j.value("terminationTriggers", std::vector<std::string>{});
}

std::vector<Persona> load_personas(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read personas " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto personas = decode<std::vector<Persona>>(parse_json(buf.str()));
    for (std::size_t i = 0; i < personas.size(); ++i) {
        const auto r = validate(personas[i]);
        if (!r.ok()) throw FormatError("persona " + std::to_string(i) + ": " + r.summary());
    }
    return personas;
}

std::string PersonaTarget::respond(std::string_view utterance, const std::vector<Utterance>& history) {
    return persona_respond(persona_, utterance, history);
}

std::string StreamTarget::respond(std::string_view utterance, const std::vector<Utterance>&) {
    out_ << "agent> " << utterance << "\ntarget> " << std::flush;
    std::string line;
    if (!std::getline(in_, line)) throw InteractionError("target channel closed");
    return line;
}

}  // namespace sear::dialogue
