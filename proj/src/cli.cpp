#include "sear/cli.hpp"

#include "sear/agent.hpp"
#include "sear/config.hpp"
#include "sear/context.hpp"
#include "sear/dataset.hpp"
#include "sear/dialogue.hpp"
#include "sear/errors.hpp"
#include "sear/rag.hpp"
#include "sear/survey.hpp"
#include "sear/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace sear::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::optional<fs::path> config;
    std::vector<std::string> overrides;
    std::optional<fs::path> out;
    std::string format;
};

void write_file(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f << bytes;
    if (!f) throw IoError("write failed: " + path.string());
}

fs::path require_out(const Globals& g, const char* what) {
    if (!g.out) throw ArgumentError(std::string("--out is required for ") + what);
    return *g.out;
}

std::unique_ptr<dialogue::DialogueBackend> make_backend(const config::Config& cfg) {
    if (cfg.backend.kind == config::BackendKind::Http) {
        // Fail before the conversation starts rather than as an exhausted run.
        const auto& ref = cfg.backend.endpoint.apiKeyRef;
        if (!ref.empty() && !std::getenv(ref.c_str()))
            throw ArgumentError("chat credential: environment variable " + ref + " is not set");
        return std::make_unique<dialogue::HttpChatBackend>(cfg.backend.endpoint);
    }
    dialogue::Script script;
    if (cfg.backend.script) script = dialogue::load_script(*cfg.backend.script);
    return std::make_unique<dialogue::ScriptedBackend>(std::move(script));
}

Millis clock_for(const config::Config& cfg, const RoleRecord& role) {
    if (cfg.nowMs) return *cfg.nowMs;
    Millis now = 0;
    for (const auto& f : role.facts) now = std::max(now, f.observedAtMs);
    return now;
}

std::vector<StrategyTemplate> templates_from(const std::optional<fs::path>& path) {
    if (path) return agent::load_templates(*path);
    return {agent::default_template()};
}

Json outcome_json(const ConversationState& s) {
    return s.outcome ? Json(std::string(to_string(*s.outcome))) : Json(nullptr);
}

// ---------------------------------------------------------------- build-roles

struct BuildRolesArgs {
    fs::path corpus;
};

int cmd_build_roles(const Globals& g, const BuildRolesArgs& a, Streams io) {
    const auto cfg = config::load_config(g.config, g.overrides);
    const auto out = require_out(g, "build-roles");
    const auto docs = dataset::load_corpus(a.corpus);
    const rag::MockEmbedder embedder(cfg.dimension);
    const auto db = rag::build_role_database(docs, embedder, cfg.build);
    rag::save_role_database(db, out);
    std::size_t facts = 0;
    for (const auto& r : db.roles) facts += r.facts.size();
    io.out << "roles=" << db.roles.size() << " facts=" << facts << " embeddings=" << db.store.size() << '\n';
    return kOk;
}

// ------------------------------------------------------------------- simulate

struct SimulateArgs {
    fs::path roles;
    std::optional<fs::path> templates;
    std::optional<fs::path> personas;
    std::string persona;
    std::string preset = "full";
    std::optional<std::string> role;
    std::optional<fs::path> session;
    std::string target = "persona";
    std::optional<fs::path> script;
};

struct ResolvedRole {
    const RoleRecord* role = nullptr;
    std::string source;
    std::optional<double> similarity;
    std::optional<SocialContextFrame> frame;
};

SocialContextFrame frame_from_session(const fs::path& path, const config::Config& cfg, Streams io) {
    const auto load = dataset::load_session(path);
    for (const auto& e : load.errors) io.err << "warning: " << path.string() << ": " << e.message << '\n';
    const auto& s = load.session;
    const auto frames = dataset::load_audio(s, path.parent_path());
    Millis start = 0;
    Millis end = 1;
    bool any = false;
    auto widen = [&](Millis lo, Millis hi) {
        if (!any) start = lo, end = hi;
        start = std::min(start, lo);
        end = std::max(end, hi);
        any = true;
    };
    for (const auto& c : s.cues) widen(c.timestampMs, c.timestampMs + 1);
    for (const auto& f : frames) widen(f.startMs, f.startMs + static_cast<Millis>(std::ceil(f.duration_ms())));
    for (const auto& t : s.tokens) widen(t.startMs, t.endMs + 1);
    return context::synthesize_context_frame(s.cues, frames, s.tokens, {start, end}, cfg.synthesis);
}

ResolvedRole resolve_role(const rag::RoleDatabase& db, const SimulateArgs& a, const config::Config& cfg, Streams io) {
    ResolvedRole r;
    if (a.session) r.frame = frame_from_session(*a.session, cfg, io);
    if (a.role) {
        r.role = db.find(*a.role);
        if (!r.role) throw ArgumentError("unknown role '" + *a.role + "'");
        r.source = "declared";
        return r;
    }
    if (r.frame) {
        const rag::MockEmbedder embedder(cfg.dimension);
        const auto matches = rag::identify_roles(db, *r.frame, embedder, cfg.tau);
        const std::pair<const std::string, rag::RoleMatch>* best = nullptr;
        double closest = 0.0;
        for (const auto& m : matches) {
            closest = std::max(closest, m.second.similarity);
            if (m.second.roleId && (!best || m.second.similarity > best->second.similarity)) best = &m;
        }
        if (!best) {
            std::ostringstream msg;
            msg << "no role identified in the session frame (" << matches.size() << " tracks, best similarity "
                << closest << ", tau " << cfg.tau << ")";
            throw StateError(msg.str());
        }
        r.role = db.find(*best->second.roleId);
        r.source = "identified";
        r.similarity = best->second.similarity;
        return r;
    }
    if (db.roles.size() != 1)
        throw ArgumentError("role database holds " + std::to_string(db.roles.size()) +
                            " roles; pass --role or --session");
    r.role = &db.roles.front();
    r.source = "single";
    return r;
}

std::unique_ptr<dialogue::TargetInterface> make_target(const SimulateArgs& a, Streams io, std::string& personaId) {
    if (a.target == "repl") {
        personaId = "repl";
        return std::make_unique<dialogue::StreamTarget>(io.in, io.out);
    }
    if (!a.personas) throw ArgumentError("--personas is required with --target persona");
    const auto personas = dialogue::load_personas(*a.personas);
    if (personas.empty()) throw FormatError("no personas in " + a.personas->string());
    const dialogue::Persona* chosen = &personas.front();
    if (!a.persona.empty()) {
        auto it = std::find_if(personas.begin(), personas.end(),
                               [&](const dialogue::Persona& p) { return p.personaId == a.persona; });
        if (it == personas.end()) throw ArgumentError("unknown persona '" + a.persona + "'");
        chosen = &*it;
    }
    personaId = chosen->personaId;
    return std::make_unique<dialogue::PersonaTarget>(*chosen);
}

int cmd_simulate(const Globals& g, const SimulateArgs& a, Streams io) {
    auto overrides = g.overrides;
    if (a.script) overrides.push_back("backend.script=" + Json(a.script->string()).dump());
    const auto cfg = config::load_config(g.config, overrides);
    const auto out = require_out(g, "simulate");
    if (a.preset != "bare" && a.preset != "ar-llm" && a.preset != "full")
        throw ArgumentError("--preset must be bare, ar-llm or full");

    const auto db = rag::load_role_database(a.roles, cfg.dimension);
    const auto resolved = resolve_role(db, a, cfg, io);
    const auto& role = *resolved.role;
    const Millis now = clock_for(cfg, role);
    const EnvironmentContext env = resolved.frame ? resolved.frame->environment : EnvironmentContext{};
    auto profile = rag::generate_profile(role, env, now, cfg.ranking);
    if (resolved.frame) {
        const rag::MockEmbedder embedder(cfg.dimension);
        profile = rag::adapt_profile(profile, *resolved.frame, db, embedder, now, cfg.adapt);
    }

    Json metrics{{"preset", a.preset}, {"roleId", role.roleId}, {"roleSource", resolved.source}};
    metrics["similarity"] = resolved.similarity ? Json(text::round9(*resolved.similarity)) : Json(nullptr);

    if (a.preset == "ar-llm") {
        // Pipeline without the agent: the profile is the product.
        write_file(out / "profile.json", dump_pretty(Json(profile)));
        write_file(out / "transcript.ndjson", "");
        metrics["selectedTemplate"] = nullptr;
        metrics["confidence"] = nullptr;
        metrics["utteranceCount"] = 0;
        metrics["outcome"] = nullptr;
        metrics["factCount"] = profile.rankedFacts.size();
        write_file(out / "metrics.json", dump_pretty(metrics));
        io.out << "role=" << role.roleId << " facts=" << profile.rankedFacts.size() << '\n';
        return kOk;
    }

    const auto templates = templates_from(a.templates);
    StrategyTemplate chosen;
    if (a.preset == "bare") {
        // No social context reaches the agent.
        SocialProfile bare;
        bare.roleId = profile.roleId;
        bare.lastUpdatedMs = profile.lastUpdatedMs;
        profile = std::move(bare);
        chosen = templates.front();
        metrics["confidence"] = nullptr;
        metrics["scores"] = Json::array();
    } else {
        const auto sel = agent::check_se_strategies(templates, profile);
        chosen = *sel.selected;
        Json scores = Json::array();
        double conf = 0.0;
        for (const auto& s : sel.scores) {
            scores.push_back({{"templateId", s.templateId}, {"confidence", text::round9(s.confidence)}});
            if (s.templateId == chosen.templateId) conf = s.confidence;
        }
        metrics["confidence"] = text::round9(conf);
        metrics["scores"] = scores;
    }
    metrics["selectedTemplate"] = chosen.templateId;

    std::string personaId;
    auto target = make_target(a, io, personaId);
    metrics["target"] = personaId;
    auto backend = make_backend(cfg);
    const auto result = agent::run_conversation(chosen, profile, *target, *backend, cfg.loop);

    std::ostringstream transcript;
    agent::write_transcript(transcript, result.state.history);
    write_file(out / "transcript.ndjson", transcript.str());

    Json stages = Json::array();
    for (const auto& s : result.stages)
        stages.push_back({{"stageName", s.stageName}, {"attempts", s.attempts}, {"last", agent::to_string(s.last)}});
    Json prompts = Json::array();
    for (const auto& p : result.prompts)
        prompts.push_back({{"stageName", p.stageName}, {"prompt", p.prompt}, {"reply", p.reply}});
    metrics["stages"] = stages;
    metrics["prompts"] = prompts;
    metrics["utteranceCount"] = result.state.history.size();
    metrics["outcome"] = outcome_json(result.state);
    metrics["error"] = result.error.empty() ? Json(nullptr) : Json(result.error);
    write_file(out / "metrics.json", dump_pretty(metrics));

    io.out << "template=" << chosen.templateId << " utterances=" << result.state.history.size()
           << " outcome=" << metrics["outcome"].get<std::string>() << '\n';
    if (!result.error.empty()) {
        io.err << "error: " << result.error << '\n';
        return kRuntimeError;
    }
    return kOk;
}

// ------------------------------------------------------------- analyze-survey

struct SurveyArgs {
    fs::path responses;
    std::optional<fs::path> schema;
};

survey::ExportFormat survey_format(const Globals& g) {
    std::string f = g.format;
    if (f.empty() && g.out) f = g.out->extension() == ".json" ? "json" : "csv";
    if (f.empty() || f == "csv") return survey::ExportFormat::Csv;
    if (f == "json") return survey::ExportFormat::Json;
    throw ArgumentError("--format must be csv or json");
}

void print_headline(const survey::AggregateReport& r, std::ostream& out) {
    out << "respondents=" << r.respondents << '\n';
    for (const auto& q : r.questions) {
        if (q.topTwo)
            out << q.questionId << " top-two " << survey::format_percent(*q.topTwo) << " (" << q.topTwo->str() << ")";
        else if (q.yes)
            out << q.questionId << " yes " << survey::format_percent(*q.yes) << " (" << q.yes->str() << ")";
        else
            continue;
        if (q.mean) out << " mean " << survey::format_decimal(*q.mean, 2);
        out << '\n';
    }
    if (r.trust) {
        if (r.trust->atLeast4After)
            out << "TrustAfter>=4 " << survey::format_percent(*r.trust->atLeast4After) << '\n';
        if (r.trust->strongBefore)
            out << "TrustBefore=5 " << survey::format_percent(*r.trust->strongBefore) << '\n';
    }
}

int cmd_analyze_survey(const Globals& g, const SurveyArgs& a, Streams io) {
    const auto format = survey_format(g);
    const auto schema = a.schema ? survey::load_schema(*a.schema) : survey::default_schema();
    if (auto r = survey::validate(schema); !r.ok()) throw FormatError("schema: " + r.summary());
    const auto loaded = survey::load_responses(a.responses, schema);
    for (const auto& rej : loaded.rejects) io.err << "rejected line " << rej.line << ": " << rej.reason << '\n';
    const auto total = loaded.records.size() + loaded.rejects.size();
    if (total == 0) io.err << "warning: no responses in " << a.responses.string() << '\n';
    else if (loaded.rejects.size() * 2 > total)
        io.err << "warning: " << loaded.rejects.size() << " of " << total << " lines rejected\n";

    const auto report = survey::aggregate(loaded.records, schema);
    if (g.out) survey::export_summary(report, format, *g.out);
    else if (format == survey::ExportFormat::Json) io.out << dump_pretty(survey::report_to_json(report));
    else io.out << survey::report_to_csv(report);
    print_headline(report, g.out ? io.out : io.err);
    return kOk;
}

// ---------------------------------------------------------------------- serve

struct ServeArgs {
    fs::path roles;
    std::optional<fs::path> templates;
};

class Server {
public:
    Server(const config::Config& cfg, rag::RoleDatabase db, std::vector<StrategyTemplate> templates, Streams io)
        : cfg_(cfg), db_(std::move(db)), templates_(std::move(templates)), embedder_(cfg.dimension),
          backend_(make_backend(cfg)), io_(io) {}

    void handle(const std::string& line, std::size_t lineNo) {
        try {
            const auto msg = dataset::wire_decode(line);
            if (auto* f = std::get_if<SocialContextFrame>(&msg)) on_frame(*f);
            else if (auto* c = std::get_if<dataset::ControlMessage>(&msg)) on_control(*c);
            else throw ProtocolError("unexpected message type " + std::string(dataset::wire_type(msg)));
        } catch (const Error& e) {
            send(dataset::ErrorMessage{e.what(), lineNo});
        } catch (const std::exception& e) {
            send(dataset::ErrorMessage{e.what(), lineNo});
        }
    }

    /// Closes any live conversation and returns every transcript seen.
    std::vector<std::vector<Utterance>> shutdown() {
        if (engine_) finish();
        return std::move(finished_);
    }

private:
    void send(const dataset::WireMessage& m) { io_.out << dataset::wire_encode(m) << '\n' << std::flush; }

    Millis clock(const RoleRecord& role) const { return clock_for(cfg_, role); }

    void on_frame(const SocialContextFrame& frame) {
        const auto matches = rag::identify_roles(db_, frame, embedder_, cfg_.tau);
        bool any = false;
        for (const auto& [trackId, m] : matches) {
            if (!m.roleId) continue;
            const auto* role = db_.find(*m.roleId);
            const auto now = std::max(clock(*role), frame.windowEndMs);
            auto it = profiles_.find(trackId);
            if (it == profiles_.end() || it->second.roleId != role->roleId) {
                auto p = rag::generate_profile(*role, frame.environment, now, cfg_.ranking);
                it = profiles_.insert_or_assign(trackId, std::move(p)).first;
            }
            it->second = rag::adapt_profile(it->second, frame, db_, embedder_, now, cfg_.adapt);
            send(dataset::ProfileUpdate{trackId, text::round9(m.similarity), it->second});
            any = true;
        }
        if (!any) send(dataset::ControlMessage{"no_match", Json{{"tracks", frame.faceTracks.size()}}});

        if (engine_ && engine_->awaiting_response()) {
            std::string reply;
            for (const auto& s : frame.transcript) {
                if (s.speaker != Speaker::Other) continue;
                if (!reply.empty()) reply += ' ';
                reply += s.text;
            }
            if (!reply.empty()) on_reply(reply);
        }
    }

    void on_control(const dataset::ControlMessage& c) {
        if (c.command == "start") start(c.args);
        else if (c.command == "reply") {
            if (!c.args.contains("text") || !c.args["text"].is_string())
                throw ProtocolError("reply needs a string args.text");
            if (!engine_) throw StateError("no active conversation");
            on_reply(c.args["text"].get<std::string>());
        } else if (c.command == "end") {
            if (!engine_) throw StateError("no active conversation");
            finish();
        } else {
            throw ProtocolError("unknown control command '" + c.command + "'");
        }
    }

    void start(const Json& args) {
        if (engine_) throw StateError("a conversation is already active");
        SocialProfile profile;
        if (args.contains("trackId")) {
            auto it = profiles_.find(args["trackId"].get<std::string>());
            if (it == profiles_.end()) throw StateError("no profile for track " + args["trackId"].get<std::string>());
            profile = it->second;
        } else if (args.contains("roleId")) {
            const auto* role = db_.find(args["roleId"].get<std::string>());
            if (!role) throw StateError("unknown role " + args["roleId"].get<std::string>());
            profile = rag::generate_profile(*role, {}, clock(*role), cfg_.ranking);
        } else if (profiles_.size() == 1) {
            profile = profiles_.begin()->second;
        } else {
            throw StateError("start needs args.trackId or args.roleId");
        }
        const StrategyTemplate* tpl = nullptr;
        if (args.contains("templateId")) {
            const auto id = args["templateId"].get<std::string>();
            for (const auto& t : templates_) {
                if (t.templateId == id) tpl = &t;
            }
            if (!tpl) throw StateError("unknown template " + id);
        } else {
            tpl = agent::check_se_strategies(templates_, profile).selected;
        }
        engine_ = std::make_unique<agent::ConversationEngine>(*tpl, profile, *backend_, cfg_.loop);
        emit_next();
    }

    void on_reply(const std::string& reply) {
        if (!engine_->awaiting_response()) throw StateError("no agent utterance is awaiting a reply");
        engine_->accept(reply);
        if (engine_->done()) finish();
        else emit_next();
    }

    void emit_next() {
        const auto* stage = engine_->current_stage();
        const std::string stageName = stage ? stage->name : "";
        try {
            const auto& text = engine_->next_utterance();
            const auto turn = static_cast<int>(engine_->state().history.size());
            send(dataset::AgentUtterance{{Author::Agent, text, stageName, turn}});
        } catch (const Error&) {
            finish();
            throw;
        }
    }

    void finish() {
        const auto history = engine_->state().history;
        const auto& outcome = engine_->state().outcome;
        send(dataset::TranscriptExport{history});
        send(dataset::ControlMessage{"ended", Json{{"outcome", outcome ? Json(std::string(to_string(*outcome)))
                                                                       : Json(nullptr)}}});
        finished_.push_back(history);
        engine_.reset();
    }

    const config::Config& cfg_;
    rag::RoleDatabase db_;
    std::vector<StrategyTemplate> templates_;
    rag::MockEmbedder embedder_;
    std::unique_ptr<dialogue::DialogueBackend> backend_;
    Streams io_;
    std::map<std::string, SocialProfile> profiles_;
    std::unique_ptr<agent::ConversationEngine> engine_;
    std::vector<std::vector<Utterance>> finished_;
};

int cmd_serve(const Globals& g, const ServeArgs& a, Streams io) {
    const auto cfg = config::load_config(g.config, g.overrides);
    Server server(cfg, rag::load_role_database(a.roles, cfg.dimension), templates_from(a.templates), io);
    std::string line;
    std::size_t n = 0;
    while (std::getline(io.in, line)) {
        ++n;
        if (text::normalize_whitespace(line).empty()) continue;
        server.handle(line, n);
    }
    const auto transcripts = server.shutdown();
    if (g.out) {
        std::ostringstream buf;
        for (const auto& t : transcripts) agent::write_transcript(buf, t);
        write_file(*g.out, buf.str());
    }
    return kOk;
}

// ------------------------------------------------------------------ anonymize

struct AnonymizeArgs {
    fs::path in;
    std::string kind = "auto";
    std::optional<std::string> keyEnv;
};

std::string detect_kind(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (text::normalize_whitespace(line).empty()) continue;
        const auto j = Json::parse(line, nullptr, false);
        if (j.is_object() && j.value("type", "") == "header") return "session";
        if (j.is_object() && j.contains("questionId")) return "responses";
        return "corpus";
    }
    return "corpus";
}

int cmd_anonymize(const Globals& g, const AnonymizeArgs& a, Streams io) {
    auto cfg = config::load_config(g.config, g.overrides);
    const auto out = require_out(g, "anonymize");
    const auto keyRef = a.keyEnv.value_or(cfg.anonymizeKeyRef);
    const char* key = std::getenv(keyRef.c_str());
    if (!key || !*key) throw ArgumentError("anonymization key: environment variable " + keyRef + " is not set");
    cfg.anonymize.key = key;

    const auto kind = a.kind == "auto" ? detect_kind(a.in) : a.kind;
    std::ostringstream buf;
    std::string digest;
    std::size_t names = 0;
    if (kind == "corpus") {
        const auto r = dataset::anonymize(dataset::load_corpus(a.in), cfg.anonymize);
        dataset::write_corpus(buf, r.data);
        digest = r.mappingDigest;
        names = r.namesMapped;
    } else if (kind == "session") {
        const auto load = dataset::load_session(a.in);
        if (!load.errors.empty()) {
            std::string all;
            for (const auto& e : load.errors) all += (all.empty() ? "" : "; ") + e.message;
            throw FormatError(all);
        }
        const auto r = dataset::anonymize(load.session, cfg.anonymize);
        dataset::write_session(buf, r.data);
        digest = r.mappingDigest;
        names = r.namesMapped;
    } else if (kind == "responses") {
        const auto load = survey::load_responses(a.in);
        if (!load.rejects.empty())
            throw FormatError(load.rejects.front().reason, load.rejects.front().line);
        const auto r = dataset::anonymize(load.records, cfg.anonymize);
        survey::write_responses(buf, r.data);
        digest = r.mappingDigest;
        names = r.namesMapped;
    } else {
        throw ArgumentError("--kind must be auto, corpus, session or responses");
    }
    write_file(out, buf.str());
    io.out << "kind=" << kind << " names=" << names << " digest=" << digest << '\n';
    return kOk;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ArgumentError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
        dynamic_cast<const IoError*>(&e) || dynamic_cast<const ProtocolError*>(&e) ||
        dynamic_cast<const StateError*>(&e) || dynamic_cast<const CLI::Error*>(&e))
        return kInputError;
    return kRuntimeError;
}

int run(const std::vector<std::string>& args, Streams io) {
    CLI::App app{"Social-engineering research pipeline: roles, simulation, survey analysis, serving, anonymization",
                 "sear"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--set", g.overrides, "Override a config key: section.key=value (repeatable)");
    app.add_option("--out", g.out, "Output directory or file");
    app.add_option("--format", g.format, "Output format (csv or json)");

    BuildRolesArgs br;
    auto* buildRoles = app.add_subcommand("build-roles", "Build roles.json and embeddings.ndjson from a corpus");
    buildRoles->fallthrough();
    buildRoles->add_option("corpus", br.corpus, "Corpus NDJSON")->required();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run one conversation against a persona or a REPL");
    simulate->fallthrough();
    simulate->add_option("--roles", sim.roles, "Directory written by build-roles")->required();
    simulate->add_option("--templates", sim.templates, "templates.json (default: built-in three-stage)");
    simulate->add_option("--personas", sim.personas, "personas.json");
    simulate->add_option("--persona", sim.persona, "Persona id (default: first)");
    simulate->add_option("--preset", sim.preset, "bare, ar-llm or full")
        ->check(CLI::IsMember({"bare", "ar-llm", "full"}));
    simulate->add_option("--role", sim.role, "Declared role id");
    simulate->add_option("--session", sim.session, "Session NDJSON used to identify the role");
    simulate->add_option("--target", sim.target, "persona or repl")->check(CLI::IsMember({"persona", "repl"}));
    simulate->add_option("--script", sim.script, "Scripted backend replies");

    SurveyArgs sv;
    auto* analyze = app.add_subcommand("analyze-survey", "Aggregate questionnaire responses");
    analyze->fallthrough();
    analyze->add_option("responses", sv.responses, "responses.ndjson")->required();
    analyze->add_option("--schema", sv.schema, "Questionnaire schema JSON");

    ServeArgs srv;
    auto* serve = app.add_subcommand("serve", "Answer v1 wire messages on stdin/stdout");
    serve->fallthrough();
    serve->add_option("--roles", srv.roles, "Directory written by build-roles")->required();
    serve->add_option("--templates", srv.templates, "templates.json");

    AnonymizeArgs an;
    auto* anonymize = app.add_subcommand("anonymize", "Pseudonymize a corpus, session or response file");
    anonymize->fallthrough();
    anonymize->add_option("input", an.in, "Input file")->required();
    anonymize->add_option("--kind", an.kind, "auto, corpus, session or responses");
    anonymize->add_option("--key-env", an.keyEnv, "Environment variable holding the key");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, io.out, io.err) == 0 ? kOk : kInputError;
    }

    try {
        if (*buildRoles) return cmd_build_roles(g, br, io);
        if (*simulate) return cmd_simulate(g, sim, io);
        if (*analyze) return cmd_analyze_survey(g, sv, io);
        if (*serve) return cmd_serve(g, srv, io);
        if (*anonymize) return cmd_anonymize(g, an, io);
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kInputError;
}

}  // namespace sear::cli
