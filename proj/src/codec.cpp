#include "sear/codec.hpp"

#include "sear/text.hpp"

namespace sear {

namespace {

Json real(double v) { return text::round9(v); }

Json reals(const std::vector<double>& v) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(real(x));
    return arr;
}

template <typename T>
T opt_field(const Json& j, const char* field, T fallback) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

}  // namespace

void to_json(Json& j, const CueEvent& v) {
    Json payload = Json::object();
    for (const auto& [key, value] : v.payload) {
        if (const auto* d = std::get_if<double>(&value)) payload[key] = real(*d);
        else payload[key] = std::get<std::string>(value);
    }
    j = Json{{"timestampMs", v.timestampMs}, {"modality", to_string(v.modality)}, {"payload", payload}};
    if (v.trackId) j["trackId"] = *v.trackId;
}

void from_json(const Json& j, CueEvent& v) {
    v.timestampMs = j.at("timestampMs").get<Millis>();
    v.modality = enum_from_json<Modality>(j, "modality");
    v.trackId.reset();
    if (auto it = j.find("trackId"); it != j.end() && !it->is_null()) v.trackId = it->get<std::string>();
    v.payload.clear();
    if (auto it = j.find("payload"); it != j.end()) {
        for (const auto& [key, value] : it->items()) {
            if (value.is_number()) v.payload[key] = value.get<double>();
            else if (value.is_string()) v.payload[key] = value.get<std::string>();
            else throw FormatError("payload." + key + " must be a number or string");
        }
    }
}

void to_json(Json& j, const Segment& v) {
    j = Json{{"speaker", to_string(v.speaker)}, {"text", v.text}, {"startMs", v.startMs}, {"endMs", v.endMs}};
}

void from_json(const Json& j, Segment& v) {
    v.speaker = enum_from_json<Speaker>(j, "speaker");
    v.text = j.at("text").get<std::string>();
    v.startMs = j.at("startMs").get<Millis>();
    v.endMs = j.at("endMs").get<Millis>();
}

void to_json(Json& j, const Emotion& v) { j = Json{{"label", v.label}, {"confidence", real(v.confidence)}}; }

void from_json(const Json& j, Emotion& v) {
    v.label = j.at("label").get<std::string>();
    v.confidence = j.at("confidence").get<double>();
}

void to_json(Json& j, const FaceTrack& v) {
    Json scores = Json::object();
    for (const auto& [k, s] : v.expressionScores) scores[k] = real(s);
    j = Json{{"trackId", v.trackId},
             {"expressionScores", scores},
             {"dominantExpression", v.dominantExpression},
             {"emotion", v.emotion}};
}

void from_json(const Json& j, FaceTrack& v) {
    v.trackId = j.at("trackId").get<std::string>();
    v.expressionScores = opt_field(j, "expressionScores", std::map<std::string, double>{});
    v.dominantExpression = opt_field(j, "dominantExpression", std::string{});
    v.emotion = opt_field(j, "emotion", Emotion{});
}

void to_json(Json& j, const EnvironmentContext& v) {
    j = Json{{"objectLabels", v.objectLabels}, {"setting", to_string(v.setting)}};
}

void from_json(const Json& j, EnvironmentContext& v) {
    v.objectLabels = opt_field(j, "objectLabels", std::vector<std::string>{});
    v.setting = enum_from_json<Setting>(j, "setting");
}

void to_json(Json& j, const SocialContextFrame& v) {
    j = Json{{"windowStartMs", v.windowStartMs},
             {"windowEndMs", v.windowEndMs},
             {"faceTracks", v.faceTracks},
             {"transcript", v.transcript},
             {"environment", v.environment}};
}

void from_json(const Json& j, SocialContextFrame& v) {
    v.windowStartMs = j.at("windowStartMs").get<Millis>();
    v.windowEndMs = j.at("windowEndMs").get<Millis>();
    v.faceTracks = opt_field(j, "faceTracks", std::vector<FaceTrack>{});
    v.transcript = opt_field(j, "transcript", std::vector<Segment>{});
    v.environment = opt_field(j, "environment", EnvironmentContext{});
}

void to_json(Json& j, const Fact& v) {
    j = Json{{"category", to_string(v.category)},
             {"text", v.text},
             {"salience", real(v.salience)},
             {"sourceModality", to_string(v.sourceModality)},
             {"observedAtMs", v.observedAtMs}};
}

void from_json(const Json& j, Fact& v) {
    v.category = enum_from_json<FactCategory>(j, "category");
    v.text = j.at("text").get<std::string>();
    v.salience = j.at("salience").get<double>();
    v.sourceModality = enum_from_json<SourceModality>(j, "sourceModality");
    v.observedAtMs = j.at("observedAtMs").get<Millis>();
}

void to_json(Json& j, const RoleRecord& v) {
    j = Json{{"roleId", v.roleId},
             {"pseudonym", v.pseudonym},
             {"traits", v.traits},
             {"facts", v.facts},
             {"embeddingIds", v.embeddingIds}};
}

void from_json(const Json& j, RoleRecord& v) {
    v.roleId = j.at("roleId").get<std::string>();
    v.pseudonym = opt_field(j, "pseudonym", v.roleId);
    v.traits = opt_field(j, "traits", TraitMap{});
    v.facts = opt_field(j, "facts", std::vector<Fact>{});
    v.embeddingIds = opt_field(j, "embeddingIds", std::vector<EntryId>{});
}

void to_json(Json& j, const EmbeddingEntry& v) {
    j = Json{{"entryId", v.entryId},
             {"vector", reals(v.vector)},
             {"roleId", v.roleId},
             {"sourceRef", v.sourceRef},
             {"modality", to_string(v.modality)}};
}

void from_json(const Json& j, EmbeddingEntry& v) {
    v.entryId = j.at("entryId").get<EntryId>();
    v.vector = j.at("vector").get<std::vector<double>>();
    v.roleId = j.at("roleId").get<std::string>();
    v.sourceRef = opt_field(j, "sourceRef", std::string{});
    v.modality = enum_from_json<SourceModality>(j, "modality");
}

void to_json(Json& j, const RankedFact& v) { j = Json{{"fact", v.fact}, {"rankScore", real(v.rankScore)}}; }

void from_json(const Json& j, RankedFact& v) {
    v.fact = j.at("fact").get<Fact>();
    v.rankScore = j.at("rankScore").get<double>();
}

void to_json(Json& j, const SocialProfile& v) {
    j = Json{{"roleId", v.roleId},
             {"coreIdentity", v.coreIdentity},
             {"rankedFacts", v.rankedFacts},
             {"environmentContext", v.environmentContext},
             {"lastUpdatedMs", v.lastUpdatedMs}};
}

void from_json(const Json& j, SocialProfile& v) {
    v.roleId = j.at("roleId").get<std::string>();
    v.coreIdentity = opt_field(j, "coreIdentity", TraitMap{});
    v.rankedFacts = opt_field(j, "rankedFacts", std::vector<RankedFact>{});
    v.environmentContext = opt_field(j, "environmentContext", EnvironmentContext{});
    v.lastUpdatedMs = opt_field<Millis>(j, "lastUpdatedMs", 0);
}

void to_json(Json& j, const Predicate& v) {
    j = Json{{"kind", to_string(v.kind)}, {"argument", v.argument}, {"weight", real(v.weight)}};
}

void from_json(const Json& j, Predicate& v) {
    v.kind = enum_from_json<PredicateKind>(j, "kind");
    v.argument = j.at("argument").get<std::string>();
    v.weight = opt_field(j, "weight", 1.0);
}

void to_json(Json& j, const StageSpec& v) {
    j = Json{{"name", v.name},
             {"objective", v.objective},
             {"promptSkeleton", v.promptSkeleton},
             {"successCues", v.successCues},
             {"maxRetries", v.maxRetries}};
}

void from_json(const Json& j, StageSpec& v) {
    v.name = j.at("name").get<std::string>();
    v.objective = opt_field(j, "objective", std::string{});
    v.promptSkeleton = j.at("promptSkeleton").get<std::string>();
    v.successCues = opt_field(j, "successCues", std::vector<std::string>{});
    v.maxRetries = opt_field(j, "maxRetries", 0);
}

void to_json(Json& j, const StrategyTemplate& v) {
    j = Json{{"templateId", v.templateId},
             {"priority", v.priority},
             {"requirements", v.requirements},
             {"stages", v.stages}};
}

void from_json(const Json& j, StrategyTemplate& v) {
    v.templateId = j.at("templateId").get<std::string>();
    v.priority = opt_field(j, "priority", 0);
    v.requirements = opt_field(j, "requirements", std::vector<Predicate>{});
    v.stages = j.at("stages").get<std::vector<StageSpec>>();
}

void to_json(Json& j, const Utterance& v) {
    j = Json{{"author", to_string(v.author)}, {"text", v.text}, {"stageName", v.stageName}, {"turnIndex", v.turnIndex}};
}

void from_json(const Json& j, Utterance& v) {
    v.author = enum_from_json<Author>(j, "author");
    v.text = j.at("text").get<std::string>();
    v.stageName = j.at("stageName").get<std::string>();
    v.turnIndex = j.at("turnIndex").get<int>();
}

void to_json(Json& j, const ConversationState& v) {
    Json weights = Json::object();
    for (const auto& [k, w] : v.topicWeights) weights[k] = real(w);
    j = Json{{"history", v.history}, {"currentStageIndex", v.currentStageIndex}, {"topicWeights", weights}};
    j["outcome"] = v.outcome ? Json(to_string(*v.outcome)) : Json(nullptr);
}

void from_json(const Json& j, ConversationState& v) {
    v.history = opt_field(j, "history", std::vector<Utterance>{});
    v.currentStageIndex = opt_field(j, "currentStageIndex", 0);
    v.topicWeights = opt_field(j, "topicWeights", std::map<std::string, double>{});
    v.outcome.reset();
    if (auto it = j.find("outcome"); it != j.end() && !it->is_null()) v.outcome = enum_from_json<Outcome>(j, "outcome");
}

void to_json(Json& j, const QuestionnaireResponse& v) {
    j = Json{{"participantPseudonym", v.participantPseudonym},
             {"section", to_string(v.section)},
             {"questionId", v.questionId}};
    std::visit([&](const auto& x) { j["value"] = x; }, v.value);
}

void from_json(const Json& j, QuestionnaireResponse& v) {
    v.participantPseudonym = j.at("participantPseudonym").get<std::string>();
    v.section = enum_from_json<Section>(j, "section");
    v.questionId = j.at("questionId").get<std::string>();
    const auto& value = j.at("value");
    if (value.is_boolean()) v.value = value.get<bool>();
    else if (value.is_number_integer()) v.value = value.get<int>();
    else if (value.is_string()) v.value = value.get<std::string>();
    else throw FormatError("value must be an integer, boolean or string");
}

Json parse_json(const std::string& text, std::size_t line) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what(), line);
    }
}

std::string dump_line(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

std::string dump_pretty(const Json& j) { return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n"; }

}  // namespace sear
