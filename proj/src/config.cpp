#include "sear/config.hpp"

#include "sear/errors.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace sear::config {

namespace {

// Objects replaced wholesale rather than merged key by key.
const std::set<std::string> kFreeMaps{"/ranking/categoryWeights", "/vocabularies/environment",
                                      "/vocabularies/emotions"};

Json category_weights_json(const std::map<FactCategory, double>& w) {
    Json j = Json::object();
    for (const auto& [c, v] : w) j[std::string(to_string(c))] = v;
    return j;
}

void merge(Json& base, const Json& user, const std::string& where) {
    if (!user.is_object()) throw FormatError("config" + (where.empty() ? "" : " key " + where) + " must be an object");
    for (const auto& [key, value] : user.items()) {
        const auto path = where + "/" + key;
        if (!base.contains(key)) throw FormatError("unknown config key " + path);
        auto& slot = base[key];
        if (slot.is_object() && !kFreeMaps.count(path)) merge(slot, value, path);
        else slot = value;
    }
}

template <typename T>
T get(const Json& j, const char* section, const char* key) {
    try {
        return j.at(section).at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw FormatError(std::string("config key ") + section + "." + key + " has the wrong type");
    }
}

template <typename T>
std::optional<T> get_opt(const Json& j, const char* section, const char* key) {
    if (j.at(section).at(key).is_null()) return std::nullopt;
    return get<T>(j, section, key);
}

}  // namespace

Json default_config_json() {
    const rag::BuildOptions build;
    const rag::RankingOptions ranking;
    const rag::AdaptOptions adapt;
    const context::SpeakerCalibration cal;
    const agent::LoopPolicy loop;
    const dialogue::EndpointConfig ep;
    const dataset::AnonymizeOptions anon;

    Json env = Json::object();
    for (const auto& [label, setting] : context::default_environment_vocabulary()) env[label] = to_string(setting);

    return Json{
        {"embedder", {{"dimension", rag::kDefaultDimension}}},
        {"roles",
         {{"tau", rag::kDefaultRoleThreshold},
          {"traitVocabulary", build.traitVocabulary},
          {"dedupeJaccard", build.dedupeJaccard},
          {"defaultSalience", build.defaultSalience},
          {"nowMs", nullptr}}},
        {"ranking", {{"halfLifeDays", ranking.halfLifeDays}, {"categoryWeights", category_weights_json(ranking.categoryWeights)}}},
        {"adapt", {{"topK", adapt.topK}, {"salienceBump", adapt.salienceBump}}},
        {"calibration",
         {{"ratioThreshold", cal.ratioThreshold},
          {"silenceFloor", cal.silenceFloor},
          {"bandLowHz", cal.bandLowHz},
          {"bandHighHz", cal.bandHighHz}}},
        {"vocabularies", {{"environment", env}, {"emotions", context::default_emotion_table()}}},
        {"lexicons",
         {{"positive", loop.lexicon.positive}, {"negative", loop.lexicon.negative}, {"abortTokens", loop.abortTokens}}},
        {"loop", {{"maxRetries", nullptr}, {"historyWindow", loop.historyWindow}, {"topicBoost", loop.topicBoost}}},
        {"backend",
         {{"kind", "scripted"},
          {"script", nullptr},
          {"baseUrl", "http://127.0.0.1:8080/v1"},
          {"apiKeyRef", "SEAR_CHAT_API_KEY"},
          {"model", ep.model},
          {"timeoutMs", ep.timeoutMs},
          {"maxAttempts", ep.maxAttempts},
          {"backoffBaseMs", ep.backoffBaseMs},
          {"backoffFactor", ep.backoffFactor},
          {"jitter", ep.jitter},
          {"seed", ep.seed}}},
        {"anonymize",
         {{"keyRef", "SEAR_ANON_KEY"},
          {"payloadDenylist", anon.payloadDenylist},
          {"identityPayloadKeys", anon.identityPayloadKeys},
          {"knownNames", anon.knownNames},
          {"replaceNameParts", anon.replaceNameParts}}}};
}

void apply_overrides(Json& doc, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ArgumentError("override '" + o + "' is not key=value");
        std::string ptr = "/" + o.substr(0, eq);
        for (auto& c : ptr) {
            if (c == '.') c = '/';
        }
        const Json::json_pointer p(ptr);
        if (!doc.contains(p)) throw ArgumentError("unknown config key " + o.substr(0, eq));
        if (doc.at(p).is_object() && !kFreeMaps.count(ptr))
            throw ArgumentError("config key " + o.substr(0, eq) + " is a section");
        const auto raw = o.substr(eq + 1);
        Json value = Json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;
        doc[p] = value;
    }
}

Config config_from_json(const Json& user, const std::filesystem::path& baseDir) {
    Json doc = default_config_json();
    merge(doc, user, "");

    Config c;
    c.dimension = get<std::size_t>(doc, "embedder", "dimension");
    if (c.dimension == 0) throw FormatError("config key embedder.dimension must be positive");

    c.tau = get<double>(doc, "roles", "tau");
    if (!(c.tau > 0.0 && c.tau <= 1.0)) throw FormatError("config key roles.tau must lie in (0, 1]");
    c.nowMs = get_opt<Millis>(doc, "roles", "nowMs");
    c.build.traitVocabulary = get<TraitVocabulary>(doc, "roles", "traitVocabulary");
    c.build.dedupeJaccard = get<double>(doc, "roles", "dedupeJaccard");
    c.build.defaultSalience = get<double>(doc, "roles", "defaultSalience");

    c.ranking.halfLifeDays = get<double>(doc, "ranking", "halfLifeDays");
    if (!(c.ranking.halfLifeDays > 0)) throw FormatError("config key ranking.halfLifeDays must be positive");
    c.ranking.categoryWeights.clear();
    for (const auto& [name, w] : get<std::map<std::string, double>>(doc, "ranking", "categoryWeights")) {
        const auto cat = parse_enum<FactCategory>(name);
        if (!cat) throw FormatError("config ranking.categoryWeights: unknown category '" + name + "'");
        c.ranking.categoryWeights[*cat] = w;
    }
    c.adapt.topK = get<std::size_t>(doc, "adapt", "topK");
    c.adapt.salienceBump = get<double>(doc, "adapt", "salienceBump");
    c.adapt.ranking = c.ranking;

    auto& cal = c.synthesis.calibration;
    cal.ratioThreshold = get<double>(doc, "calibration", "ratioThreshold");
    cal.silenceFloor = get<double>(doc, "calibration", "silenceFloor");
    cal.bandLowHz = get<double>(doc, "calibration", "bandLowHz");
    cal.bandHighHz = get<double>(doc, "calibration", "bandHighHz");
    if (auto r = context::validate(cal); !r.ok()) throw FormatError("config calibration: " + r.summary());

    c.synthesis.environment.clear();
    for (const auto& [label, name] : get<std::map<std::string, std::string>>(doc, "vocabularies", "environment")) {
        const auto s = parse_enum<Setting>(name);
        if (!s) throw FormatError("config vocabularies.environment: unknown setting '" + name + "'");
        c.synthesis.environment[label] = *s;
    }
    c.synthesis.emotions = get<context::EmotionTable>(doc, "vocabularies", "emotions");

    c.loop.lexicon.positive = get<std::vector<std::string>>(doc, "lexicons", "positive");
    c.loop.lexicon.negative = get<std::vector<std::string>>(doc, "lexicons", "negative");
    c.loop.abortTokens = get<std::vector<std::string>>(doc, "lexicons", "abortTokens");
    c.loop.maxRetriesOverride = get_opt<int>(doc, "loop", "maxRetries");
    c.loop.historyWindow = get<std::size_t>(doc, "loop", "historyWindow");
    c.loop.topicBoost = get<double>(doc, "loop", "topicBoost");
    if (auto r = agent::validate(c.loop); !r.ok()) throw FormatError("config loop: " + r.summary());

    const auto kind = get<std::string>(doc, "backend", "kind");
    if (kind == "scripted") c.backend.kind = BackendKind::Scripted;
    else if (kind == "http") c.backend.kind = BackendKind::Http;
    else throw FormatError("config backend.kind must be scripted or http, got '" + kind + "'");
    if (auto script = get_opt<std::string>(doc, "backend", "script")) {
        std::filesystem::path p(*script);
        c.backend.script = p.is_relative() && !baseDir.empty() ? baseDir / p : p;
    }
    auto& ep = c.backend.endpoint;
    ep.baseUrl = get<std::string>(doc, "backend", "baseUrl");
    ep.apiKeyRef = get<std::string>(doc, "backend", "apiKeyRef");
    ep.model = get<std::string>(doc, "backend", "model");
    ep.timeoutMs = get<int>(doc, "backend", "timeoutMs");
    ep.maxAttempts = get<int>(doc, "backend", "maxAttempts");
    ep.backoffBaseMs = get<int>(doc, "backend", "backoffBaseMs");
    ep.backoffFactor = get<double>(doc, "backend", "backoffFactor");
    ep.jitter = get<double>(doc, "backend", "jitter");
    ep.seed = get<std::uint64_t>(doc, "backend", "seed");
    if (auto r = dialogue::validate(ep); !r.ok()) throw FormatError("config backend: " + r.summary());

    // Secrets come from the environment only; these keys hold variable names.
    static const std::regex envName("[A-Za-z_][A-Za-z0-9_]*");
    if (!ep.apiKeyRef.empty() && !std::regex_match(ep.apiKeyRef, envName))
        throw FormatError("config backend.apiKeyRef must name an environment variable");
    c.anonymizeKeyRef = get<std::string>(doc, "anonymize", "keyRef");
    if (!std::regex_match(c.anonymizeKeyRef, envName))
        throw FormatError("config anonymize.keyRef must name an environment variable");
    c.anonymize.payloadDenylist = get<std::set<std::string>>(doc, "anonymize", "payloadDenylist");
    c.anonymize.identityPayloadKeys = get<std::set<std::string>>(doc, "anonymize", "identityPayloadKeys");
    c.anonymize.knownNames = get<std::vector<std::string>>(doc, "anonymize", "knownNames");
    c.anonymize.replaceNameParts = get<bool>(doc, "anonymize", "replaceNameParts");
    return c;
}

Config load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
    Json doc = Json::object();
    std::filesystem::path base;
    if (path) {
        std::ifstream in(*path, std::ios::binary);
        if (!in) throw IoError("cannot read config " + path->string());
        std::ostringstream buf;
        buf << in.rdbuf();
        doc = parse_json(buf.str());
        base = path->parent_path();
    }
    // Overrides land on the merged document so they are checked like file keys.
    Json merged = default_config_json();
    merge(merged, doc, "");
    try {
        apply_overrides(merged, overrides);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("bad override: ") + e.what());
    }
    return config_from_json(merged, base);
}

}  // namespace sear::config
