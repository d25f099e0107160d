#pragma once

// Shared domain values. Everything here is a plain aggregate: immutable by
// convention once built, safe to share read-only across threads.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sear {

using Millis = std::int64_t;
using EntryId = std::int64_t;

enum class Modality { Visual, Audio, Environment };
enum class Speaker { Primary, Other };
enum class Setting { Indoor, Outdoor, Unknown };
enum class FactCategory { Demographic, Relational, Interest, Event, Vulnerability };
enum class SourceModality { Text, ImageCaption, VideoCaption };
enum class PredicateKind { TraitEquals, HasFactCategory, FactKeyword };
enum class Author { Agent, Target };
enum class Outcome { Completed, AbortedByTarget, Exhausted };
enum class Section { BaselineComparison, SubjectiveExperience, SEEffectiveness, OpenText };

std::string_view to_string(Modality v);
std::string_view to_string(Speaker v);
std::string_view to_string(Setting v);
std::string_view to_string(FactCategory v);
std::string_view to_string(SourceModality v);
std::string_view to_string(PredicateKind v);
std::string_view to_string(Author v);
std::string_view to_string(Outcome v);
std::string_view to_string(Section v);

/// Parses the canonical enum name; returns nullopt for anything else.
template <typename E>
std::optional<E> parse_enum(std::string_view name);

template <> std::optional<Modality> parse_enum(std::string_view);
template <> std::optional<Speaker> parse_enum(std::string_view);
template <> std::optional<Setting> parse_enum(std::string_view);
template <> std::optional<FactCategory> parse_enum(std::string_view);
template <> std::optional<SourceModality> parse_enum(std::string_view);
template <> std::optional<PredicateKind> parse_enum(std::string_view);
template <> std::optional<Author> parse_enum(std::string_view);
template <> std::optional<Outcome> parse_enum(std::string_view);
template <> std::optional<Section> parse_enum(std::string_view);

using PayloadValue = std::variant<double, std::string>;

/// One timestamped annotation from the AR stream. Ambient (Environment)
/// cues carry no track.
struct CueEvent {
    Millis timestampMs = 0;
    std::optional<std::string> trackId;
    Modality modality = Modality::Visual;
    std::map<std::string, PayloadValue> payload;

    bool operator==(const CueEvent&) const = default;
};

struct Segment {
    Speaker speaker = Speaker::Primary;
    std::string text;
    Millis startMs = 0;
    Millis endMs = 0;

    bool operator==(const Segment&) const = default;
};

struct Emotion {
    std::string label = "neutral";
    double confidence = 0.0;

    bool operator==(const Emotion&) const = default;
};

struct FaceTrack {
    std::string trackId;
    std::map<std::string, double> expressionScores;
    std::string dominantExpression;
    Emotion emotion;

    bool operator==(const FaceTrack&) const = default;
};

struct EnvironmentContext {
    std::vector<std::string> objectLabels;  // multiset, kept sorted
    Setting setting = Setting::Unknown;

    bool operator==(const EnvironmentContext&) const = default;
};

struct SocialContextFrame {
    Millis windowStartMs = 0;
    Millis windowEndMs = 1;
    std::vector<FaceTrack> faceTracks;
    std::vector<Segment> transcript;
    EnvironmentContext environment;

    bool operator==(const SocialContextFrame&) const = default;
};

struct Fact {
    FactCategory category = FactCategory::Interest;
    std::string text;
    double salience = 0.5;
    SourceModality sourceModality = SourceModality::Text;
    Millis observedAtMs = 0;

    bool operator==(const Fact&) const = default;
};

using TraitMap = std::map<std::string, std::string>;
using TraitVocabulary = std::set<std::string>;

struct RoleRecord {
    std::string roleId;
    std::string pseudonym;
    TraitMap traits;
    std::vector<Fact> facts;
    /// Parallel to `facts`: embeddingIds[i] is the store entry for facts[i].
    std::vector<EntryId> embeddingIds;

    bool operator==(const RoleRecord&) const = default;
};

struct EmbeddingEntry {
    EntryId entryId = 0;
    std::vector<double> vector;
    std::string roleId;
    std::string sourceRef;
    SourceModality modality = SourceModality::Text;

    bool operator==(const EmbeddingEntry&) const = default;
};

struct RankedFact {
    Fact fact;
    double rankScore = 0.0;

    bool operator==(const RankedFact&) const = default;
};

struct SocialProfile {
    std::string roleId;
    TraitMap coreIdentity;
    std::vector<RankedFact> rankedFacts;
    EnvironmentContext environmentContext;
    Millis lastUpdatedMs = 0;

    bool operator==(const SocialProfile&) const = default;
};

struct Predicate {
    PredicateKind kind = PredicateKind::HasFactCategory;
    /// TraitEquals: "key=value"; HasFactCategory: category name; FactKeyword: phrase.
    std::string argument;
    double weight = 1.0;

    bool operator==(const Predicate&) const = default;
};

struct StageSpec {
    std::string name;
    std::string objective;
    /// Placeholders: {FACT_0}, {FACT_1}, ..., {HISTORY}, {STAGE_OBJECTIVE}.
    std::string promptSkeleton;
    std::vector<std::string> successCues;
    int maxRetries = 0;

    bool operator==(const StageSpec&) const = default;
};

struct StrategyTemplate {
    std::string templateId;
    int priority = 0;
    std::vector<Predicate> requirements;
    std::vector<StageSpec> stages;

    bool operator==(const StrategyTemplate&) const = default;
};

struct Utterance {
    Author author = Author::Agent;
    std::string text;
    std::string stageName;
    int turnIndex = 0;

    bool operator==(const Utterance&) const = default;
};

struct ConversationState {
    std::vector<Utterance> history;
    int currentStageIndex = 0;
    std::map<std::string, double> topicWeights;
    /// Unset while the conversation is still running.
    std::optional<Outcome> outcome;

    bool operator==(const ConversationState&) const = default;
};

/// Likert answers are ints 1..5, YesNo answers are bools, free text is a string.
using ResponseValue = std::variant<int, bool, std::string>;

struct QuestionnaireResponse {
    std::string participantPseudonym;
    Section section = Section::SEEffectiveness;
    std::string questionId;
    ResponseValue value = 3;

    bool operator==(const QuestionnaireResponse&) const = default;
};

}  // namespace sear
