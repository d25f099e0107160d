#pragma once

// Canonical JSON encoding: one object per value, lowerCamelCase field names.
// Reals are written rounded to 9 significant digits.

#include "sear/errors.hpp"
#include "sear/model.hpp"

#include <json.hpp>

#include <string>

namespace sear {

using Json = nlohmann::json;

void to_json(Json& j, const CueEvent& v);
void from_json(const Json& j, CueEvent& v);
void to_json(Json& j, const Segment& v);
void from_json(const Json& j, Segment& v);
void to_json(Json& j, const Emotion& v);
void from_json(const Json& j, Emotion& v);
void to_json(Json& j, const FaceTrack& v);
void from_json(const Json& j, FaceTrack& v);
void to_json(Json& j, const EnvironmentContext& v);
void from_json(const Json& j, EnvironmentContext& v);
void to_json(Json& j, const SocialContextFrame& v);
void from_json(const Json& j, SocialContextFrame& v);
void to_json(Json& j, const Fact& v);
void from_json(const Json& j, Fact& v);
void to_json(Json& j, const RoleRecord& v);
void from_json(const Json& j, RoleRecord& v);
void to_json(Json& j, const EmbeddingEntry& v);
void from_json(const Json& j, EmbeddingEntry& v);
void to_json(Json& j, const RankedFact& v);
void from_json(const Json& j, RankedFact& v);
void to_json(Json& j, const SocialProfile& v);
void from_json(const Json& j, SocialProfile& v);
void to_json(Json& j, const Predicate& v);
void from_json(const Json& j, Predicate& v);
void to_json(Json& j, const StageSpec& v);
void from_json(const Json& j, StageSpec& v);
void to_json(Json& j, const StrategyTemplate& v);
void from_json(const Json& j, StrategyTemplate& v);
void to_json(Json& j, const Utterance& v);
void from_json(const Json& j, Utterance& v);
void to_json(Json& j, const ConversationState& v);
void from_json(const Json& j, ConversationState& v);
void to_json(Json& j, const QuestionnaireResponse& v);
void from_json(const Json& j, QuestionnaireResponse& v);

/// Enum fields encode as their canonical names.
template <typename E>
E enum_from_json(const Json& j, const char* field) {
    const auto& name = j.at(field).template get_ref<const std::string&>();
    if (auto e = parse_enum<E>(name)) return *e;
    throw FormatError(std::string("unknown value '") + name + "' for field " + field);
}

/// Decodes, turning any library exception into FormatError.
template <typename T>
T decode(const Json& j, std::size_t line = 0) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what(), line);
    }
}

/// Parses one JSON text, turning syntax errors into FormatError.
Json parse_json(const std::string& text, std::size_t line = 0);

/// Compact, single-line dump. Non-ASCII is kept as UTF-8.
std::string dump_line(const Json& j);

/// Pretty dump used for whole-file artifacts (roles.json, summary.json, ...).
std::string dump_pretty(const Json& j);

}  // namespace sear
