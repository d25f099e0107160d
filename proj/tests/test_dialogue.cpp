#include <doctest.h>
#include <httplib.h>

#include "sear/dialogue.hpp"
#include "sear/errors.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using namespace sear;
using namespace sear::dialogue;

namespace {

// Local chat-completions stand-in. The handler decides per request count.
class StubServer {
public:
    using Handler = std::function<void(int call, const httplib::Request&, httplib::Response&)>;

    explicit StubServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const int call = ++calls_;
            {
                std::lock_guard lock(mutex_);
                lastBody_ = req.body;
                lastAuth_ = req.get_header_value("Authorization");
            }
            handler_(call, req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    int calls() const { return calls_; }
    std::string last_body() {
        std::lock_guard lock(mutex_);
        return lastBody_;
    }
    std::string last_auth() {
        std::lock_guard lock(mutex_);
        return lastAuth_;
    }

private:
    httplib::Server server_;
    Handler handler_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> calls_{0};
    std::mutex mutex_;
    std::string lastBody_;
    std::string lastAuth_;
};

std::string reply_json(const std::string& content) {
    return Json{{"choices", Json::array({Json{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

ChatRequest user_request(const std::string& text) {
    ChatRequest r;
    r.turns = {{ChatRole::System, "sys"}, {ChatRole::User, text}};
    return r;
}

EndpointConfig config_for(const StubServer& s) {
    EndpointConfig c;
    c.baseUrl = s.url();
    c.timeoutMs = 2000;
    c.seed = 7;
    return c;
}

struct SleepLog {
    std::vector<std::chrono::milliseconds> delays;
    HttpHooks hooks() {
        HttpHooks h;
        h.sleep = [this](std::chrono::milliseconds d) { delays.push_back(d); };
        h.getenv = [](const std::string& name) -> std::optional<std::string> {
            if (name == "TEST_CHAT_KEY") return std::string("abc123");
            return std::nullopt;
        };
        return h;
    }
};

}  // namespace

TEST_CASE("scripted backend echoes unknown prompts and serves scripted ones") {
    ScriptedBackend plain;
    CHECK(plain.complete(user_request("hello there")) == "ACK:hello there");
    const std::string longPrompt(100, 'x');
    CHECK(plain.complete(user_request(longPrompt)) == "ACK:" + std::string(40, 'x'));

    Script script{{prompt_hash("hello there"), "Hi!"}};
    ScriptedBackend scripted(script);
    CHECK(scripted.complete(user_request("hello there")) == "Hi!");
    CHECK(scripted.complete(user_request("other")) == "ACK:other");
}

TEST_CASE("scripted echo counts characters, not bytes") {
    std::string prompt;
    for (int i = 0; i < 45; ++i) prompt += "\xc3\xa9";  // é
    const auto reply = scripted_respond(user_request(prompt), {});
    std::string expected = "ACK:";
    for (int i = 0; i < 40; ++i) expected += "\xc3\xa9";
    CHECK(reply == expected);
}

TEST_CASE("script files load from object or prompt list") {
    const auto dir = std::filesystem::temp_directory_path() / "sear_dialogue_script";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "a.json") << R"([{"prompt": "hi", "reply": "yo"}])";
        std::ofstream(dir / "b.json") << Json{{prompt_hash("hi"), "yo"}}.dump();
        std::ofstream(dir / "bad.json") << "42";
    }
    CHECK(load_script(dir / "a.json") == load_script(dir / "b.json"));
    CHECK_THROWS_AS(load_script(dir / "bad.json"), FormatError);
    CHECK_THROWS_AS(load_script(dir / "missing.json"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("request body follows the chat-completions shape") {
    EndpointConfig c;
    c.baseUrl = "http://x/v1";
    const auto body = chat_request_body(c, user_request("q"));
    CHECK(body["model"] == "gemma-3-12b-it");
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["role"] == "user");
    CHECK(body["messages"][1]["content"] == "q");
    CHECK(body["max_tokens"] == 256);
}

TEST_CASE("response parsing") {
    CHECK(parse_chat_response(reply_json("ok")) == "ok");
    CHECK_THROWS_AS(parse_chat_response("not json"), ProtocolError);
    CHECK_THROWS_AS(parse_chat_response(R"({"choices": []})"), ProtocolError);
    CHECK_THROWS_AS(parse_chat_response(R"({"choices": [{"message": {"role": "assistant"}}]})"), ProtocolError);
}

TEST_CASE("backoff grows geometrically within the jitter band") {
    EndpointConfig c;
    c.jitter = 0.2;
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        for (int retry = 1; retry <= 4; ++retry) {
            const double nominal = 250.0 * std::pow(2.0, retry - 1);
            const auto d = backoff_delay(c, retry, rng).count();
            CHECK(d >= std::floor(nominal * 0.8));
            CHECK(d <= std::ceil(nominal * 1.2));
        }
    }
    c.jitter = 0.0;
    CHECK(backoff_delay(c, 3, rng).count() == 1000);
}

TEST_CASE("http backend success with bearer auth") {
    StubServer server([](int, const httplib::Request&, httplib::Response& res) {
        res.set_content(reply_json("hello back"), "application/json");
    });
    auto cfg = config_for(server);
    cfg.apiKeyRef = "TEST_CHAT_KEY";
    SleepLog log;
    HttpChatBackend backend(cfg, log.hooks());
    CHECK(backend.complete(user_request("hello")) == "hello back");
    CHECK(backend.attempts_made() == 1);
    CHECK(log.delays.empty());
    CHECK(server.last_auth() == "Bearer abc123");
    CHECK(Json::parse(server.last_body())["messages"][1]["content"] == "hello");
}

TEST_CASE("http backend retries 5xx then succeeds") {
    StubServer server([](int call, const httplib::Request&, httplib::Response& res) {
        if (call <= 2) {
            res.status = 503;
            return;
        }
        res.set_content(reply_json("third time"), "application/json");
    });
    SleepLog log;
    HttpChatBackend backend(config_for(server), log.hooks());
    CHECK(backend.complete(user_request("x")) == "third time");
    CHECK(server.calls() == 3);
    REQUIRE(log.delays.size() == 2);
    CHECK(log.delays[0].count() >= 200);
    CHECK(log.delays[0].count() <= 300);
    CHECK(log.delays[1].count() >= 400);
    CHECK(log.delays[1].count() <= 600);
}

TEST_CASE("http backend gives up after maxAttempts") {
    StubServer server([](int, const httplib::Request&, httplib::Response& res) { res.status = 500; });
    SleepLog log;
    HttpChatBackend backend(config_for(server), log.hooks());
    CHECK_THROWS_AS(backend.complete(user_request("x")), UnavailableError);
    CHECK(server.calls() == 3);
    CHECK(log.delays.size() == 2);
}

TEST_CASE("http backend does not retry client errors") {
    StubServer server([](int, const httplib::Request&, httplib::Response& res) { res.status = 401; });
    SleepLog log;
    HttpChatBackend backend(config_for(server), log.hooks());
    try {
        backend.complete(user_request("x"));
        FAIL("expected RequestError");
    } catch (const RequestError& e) {
        CHECK(e.status() == 401);
    }
    CHECK(server.calls() == 1);
    CHECK(log.delays.empty());
}

TEST_CASE("http backend rejects malformed success bodies") {
    StubServer server([](int, const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices": [{"message": {}}]})", "application/json");
    });
    SleepLog log;
    HttpChatBackend backend(config_for(server), log.hooks());
    CHECK_THROWS_AS(backend.complete(user_request("x")), ProtocolError);
    CHECK(server.calls() == 1);
}

TEST_CASE("http backend transport failure is retried then unavailable") {
    EndpointConfig cfg;
    {
        // Grab a free port, then release it so nothing listens there.
        httplib::Server probe;
        const int port = probe.bind_to_any_port("127.0.0.1");
        cfg.baseUrl = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    }
    cfg.timeoutMs = 500;
    SleepLog log;
    HttpChatBackend backend(cfg, log.hooks());
    CHECK_THROWS_AS(backend.complete(user_request("x")), UnavailableError);
    CHECK(backend.attempts_made() == 3);
}

TEST_CASE("missing credential variable is an argument error") {
    EndpointConfig cfg;
    cfg.baseUrl = "http://127.0.0.1:1/v1";
    cfg.apiKeyRef = "NOT_DEFINED_ANYWHERE";
    SleepLog log;
    HttpChatBackend backend(cfg, log.hooks());
    CHECK_THROWS_AS(backend.complete(user_request("x")), ArgumentError);
    CHECK(backend.attempts_made() == 0);
}

TEST_CASE("endpoint validation") {
    EndpointConfig c;
    CHECK_FALSE(validate(c).ok());
    c.baseUrl = "ftp://x";
    CHECK(validate(c).mentions("baseUrl"));
    c.baseUrl = "https://x/v1";
    CHECK(validate(c).ok());
    c.maxAttempts = 0;
    CHECK_FALSE(validate(c).ok());
    CHECK_THROWS_AS(HttpChatBackend{c}, ArgumentError);
}

TEST_CASE("persona responses") {
    Persona p;
    p.personaId = "jonny";
    p.rules = {{{"hiking"}, "Oh I love hiking! You said: {UTTERANCE}"}, {{"bank account", "password"}, "I'd rather not."}};
    p.terminationTriggers = {"go away"};
    p.receptivenessBias = Bias::Friendly;

    CHECK(persona_respond(p, "Do you go Hiking often?", {}) == "Oh I love hiking! You said: Do you go Hiking often?");
    CHECK(persona_respond(p, "What's your bank account?", {}) == "I'd rather not.");
    CHECK(persona_respond(p, "bank accounts", {}) == "Sure \xe2\x80\x94 Okay.");  // token boundary
    CHECK(persona_respond(p, "please GO AWAY now, hiking", {}) == "stop");
    CHECK(persona_respond(p, "weather?", {}) == "Sure \xe2\x80\x94 Okay.");
    p.receptivenessBias = Bias::Hostile;
    CHECK(persona_respond(p, "weather?", {}) == "Hmm. Okay.");
    p.receptivenessBias = Bias::Neutral;
    CHECK(persona_respond(p, "weather?", {}) == "Okay.");
}

TEST_CASE("persona json round trip and loader") {
    Persona p;
    p.personaId = "x";
    p.rules = {{{"a", "b c"}, "r {UTTERANCE}"}};
    p.receptivenessBias = Bias::Hostile;
    p.terminationTriggers = {"stop it"};
    Json j = p;
    CHECK(j.get<Persona>() == p);

    const auto dir = std::filesystem::temp_directory_path() / "sear_dialogue_personas";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "p.json") << Json::array({j}).dump();
    std::ofstream(dir / "bad.json") << R"([{"personaId": "y", "defaultReply": "ok", "receptivenessBias": "Angry"}])";
    std::ofstream(dir / "empty.json") << R"([{"personaId": "", "defaultReply": "ok"}])";
    CHECK(load_personas(dir / "p.json") == std::vector<Persona>{p});
    CHECK_THROWS_AS(load_personas(dir / "bad.json"), FormatError);
    CHECK_THROWS_AS(load_personas(dir / "empty.json"), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("stream target reads one line per turn and fails on EOF") {
    std::istringstream in("first reply\nsecond reply\n");
    std::ostringstream out;
    StreamTarget t(in, out);
    CHECK(t.respond("hello", {}) == "first reply");
    CHECK(t.respond("again", {}) == "second reply");
    CHECK_THROWS_AS(t.respond("more", {}), InteractionError);
    CHECK(out.str().find("agent> hello") != std::string::npos);
}
