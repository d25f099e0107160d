#pragma once

#include "sear/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sear {

struct Violation {
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

/// Validation never throws; an empty report means every invariant holds.
struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool mentions(std::string_view message) const;
    void add(std::string path, std::string message);
    void merge(const ValidationReport& other, std::string_view prefix);
    std::string summary() const;
};

ValidationReport validate(const CueEvent& v);
ValidationReport validate(const SocialContextFrame& v);
ValidationReport validate(const Fact& v);
ValidationReport validate(const RoleRecord& v, const TraitVocabulary& vocabulary);
/// Role database: per-record checks plus roleId uniqueness.
ValidationReport validate(const std::vector<RoleRecord>& roles, const TraitVocabulary& vocabulary);
ValidationReport validate(const EmbeddingEntry& v, std::size_t dimension);
ValidationReport validate(const SocialProfile& v);
ValidationReport validate(const StrategyTemplate& v);
ValidationReport validate(const ConversationState& v);
/// Also checks currentStageIndex against the active template.
ValidationReport validate(const ConversationState& v, const StrategyTemplate& active);
/// Range check only; schema membership is checked by the survey module.
ValidationReport validate(const QuestionnaireResponse& v);

/// Invariant checks shared with the codecs.
constexpr double kUnitNormTolerance = 1e-6;

}  // namespace sear
